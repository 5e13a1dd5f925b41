#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pinch {

/// Raised when an operation is called outside its domain (unreduced input,
/// word in a forbidden subgroup, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Generator id 0 is the shift generator (beta); ids 1..n are alpha_1..alpha_n.
inline constexpr int kBeta = 0;

struct Letter {
  int gen = kBeta;
  int sign = 1;

  constexpr Letter inverse() const { return Letter{gen, -sign}; }
  constexpr bool is_beta() const { return gen == kBeta; }
  constexpr bool cancels(const Letter& other) const {
    return gen == other.gen && sign == -other.sign;
  }

  friend constexpr bool operator==(const Letter&, const Letter&) = default;
  friend constexpr auto operator<=>(const Letter&, const Letter&) = default;
};

/// A word w = w_m ... w_1 over {beta, alpha_1, ...}.  Storage index 0 holds
/// w_1, the rightmost factor, which acts first.
class Word {
 public:
  Word() = default;
  explicit Word(std::vector<Letter> letters) : letters_(std::move(letters)) {}

  /// Builds from letters written left to right (w_m first), the way the
  /// word is printed.
  static Word from_left_to_right(std::span<const Letter> written);
  static Word letter(int gen, int sign = 1) { return Word({Letter{gen, sign}}); }
  static Word beta_power(std::int64_t k);

  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  /// 0-based: at(0) is w_1.
  const Letter& at(std::size_t i) const { return letters_.at(i); }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }
  const Letter& first_applied() const { return letters_.front(); }
  const Letter& last_applied() const { return letters_.back(); }
  std::span<const Letter> letters() const { return letters_; }

  Word inverse() const;
  /// Rotation moving the k rightmost letters to the left end.
  Word rotated(std::size_t k) const;
  int max_generator() const;
  bool contains_alpha() const;

  void push_applied_after(Letter l) { letters_.push_back(l); }

  /// Group product u*v: v acts first, then u.
  friend Word operator*(const Word& u, const Word& v);
  friend bool operator==(const Word&, const Word&) = default;
  friend auto operator<=>(const Word& a, const Word& b) {
    return a.letters_ <=> b.letters_;
  }

 private:
  std::vector<Letter> letters_;
};

/// Unreduced repetition u^k (inverse letters when k < 0).
Word power(const Word& u, std::int64_t k);

bool is_reduced(const Word& w);
/// Reduced and w_m != w_1^{-1}.  Equal end letters are allowed.
bool is_cyclically_reduced(const Word& w);
bool in_beta_subgroup(const Word& w);

Word free_reduce(const Word& w);

struct CyclicReduction {
  Word conjugator;
  Word core;
};
/// w = conjugator * core * conjugator^{-1} after free reduction.
CyclicReduction cyclic_reduce(const Word& w);

struct ExponentReport {
  std::int64_t total = 0;
  std::int64_t positive = 0;
  std::int64_t negative = 0;
  friend bool operator==(const ExponentReport&, const ExponentReport&) = default;
};
/// Computed on the spelling given; no reduction is applied.
ExponentReport exponent_sums(const Word& w, int gen);
/// Exponent sums of every generator 0..generators-1.
std::vector<std::int64_t> abelianize(const Word& w, int generators);

/// k with free_reduce(w) == free_reduce(c^k), if any.
std::optional<std::int64_t> is_power_of(const Word& w, const Word& c);

/// True iff the cyclic reductions of u and v are rotations of each other.
bool cyclic_conjugacy_check(const Word& u, const Word& v);

// ---------------------------------------------------------------------------
// Text syntax: tokens `a1`, `a2`, ..., `b` with optional `^k` exponent,
// separated by whitespace or `*`, written left to right.  `1` is the
// empty word.

struct Alphabet {
  std::string alpha_prefix = "a";
  std::string beta_name = "b";
};

Word parse_word(std::string_view text, const Alphabet& alphabet = {});
std::string format_word(const Word& w, const Alphabet& alphabet = {});
std::string format_letter(const Letter& l, const Alphabet& alphabet = {});

// ---------------------------------------------------------------------------
// Nielsen moves on the basis {t_0, ..., t_{N-1}} (t_0 = beta).

struct NielsenMove {
  enum class Kind { Invert, Swap, Multiply };
  enum class Side { Left, Right };

  Kind kind = Kind::Invert;
  int i = 0;
  int j = 0;
  Side side = Side::Right;
  int sign = 1;

  /// t_i -> t_i^{-1}
  static NielsenMove invert(int i) { return {Kind::Invert, i, i, Side::Right, 1}; }
  /// t_i <-> t_j
  static NielsenMove swap(int i, int j) { return {Kind::Swap, i, j, Side::Right, 1}; }
  /// t_i -> t_i t_j^sign (Right) or t_j^sign t_i (Left)
  static NielsenMove multiply(int i, int j, Side side, int sign) {
    return {Kind::Multiply, i, j, side, sign};
  }

  friend bool operator==(const NielsenMove&, const NielsenMove&) = default;
};

using IntMatrix = std::vector<std::vector<std::int64_t>>;

/// Applies the moves in order (each one substitutes into the current word)
/// and freely reduces.  Throws PreconditionError on an index outside
/// [0, generators).
Word apply_moves(std::span<const NielsenMove> moves, const Word& w, int generators);

/// Matrix M with abelianize(apply_moves(moves, w)) = M * abelianize(w).
IntMatrix abelianized_matrix(std::span<const NielsenMove> moves, int generators);
std::int64_t determinant(IntMatrix m);
std::vector<std::int64_t> multiply(const IntMatrix& m, std::span<const std::int64_t> v);

struct ZeroSumResult {
  std::vector<NielsenMove> moves;
  Word image;
  int witness = 0;
  IntMatrix matrix;
};

/// Finds an automorphism (as a Nielsen move sequence) after which some
/// generator occurring in the image has exponent sum zero.  `sums` holds the
/// exponent sum of every generator in c; its size is the basis size.
ZeroSumResult zero_sum_automorphism(std::span<const std::int64_t> sums, const Word& c);

/// The 2x2 block [[m1, -m2], [b, a]] with m1*s1 = m2*s2 = lcm and
/// m1*a + m2*b = 1; it sends (s1, s2) to (0, b*s1 + a*s2).
IntMatrix bezout_matrix(std::int64_t s1, std::int64_t s2);

}  // namespace pinch
