#include "pinch/word.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <sstream>

namespace pinch {

Word Word::from_left_to_right(std::span<const Letter> written) {
  return Word(std::vector<Letter>(written.rbegin(), written.rend()));
}

Word Word::beta_power(std::int64_t k) {
  std::vector<Letter> letters(static_cast<std::size_t>(std::llabs(k)),
                              Letter{kBeta, k < 0 ? -1 : 1});
  return Word(std::move(letters));
}

Word Word::inverse() const {
  std::vector<Letter> out;
  out.reserve(letters_.size());
  for (auto it = letters_.rbegin(); it != letters_.rend(); ++it) out.push_back(it->inverse());
  return Word(std::move(out));
}

Word Word::rotated(std::size_t k) const {
  if (letters_.empty()) return *this;
  k %= letters_.size();
  std::vector<Letter> out(letters_);
  std::rotate(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), out.end());
  return Word(std::move(out));
}

int Word::max_generator() const {
  int best = 0;
  for (const auto& l : letters_) best = std::max(best, l.gen);
  return best;
}

bool Word::contains_alpha() const {
  return std::any_of(letters_.begin(), letters_.end(), [](const Letter& l) { return !l.is_beta(); });
}

Word operator*(const Word& u, const Word& v) {
  std::vector<Letter> out;
  out.reserve(u.size() + v.size());
  out.insert(out.end(), v.letters_.begin(), v.letters_.end());
  out.insert(out.end(), u.letters_.begin(), u.letters_.end());
  return Word(std::move(out));
}

Word power(const Word& u, std::int64_t k) {
  const Word base = k < 0 ? u.inverse() : u;
  std::vector<Letter> out;
  out.reserve(base.size() * static_cast<std::size_t>(std::llabs(k)));
  for (std::int64_t r = 0; r < std::llabs(k); ++r) {
    out.insert(out.end(), base.letters().begin(), base.letters().end());
  }
  return Word(std::move(out));
}

bool is_reduced(const Word& w) {
  for (std::size_t k = 1; k < w.size(); ++k) {
    if (w[k].cancels(w[k - 1])) return false;
  }
  return true;
}

bool is_cyclically_reduced(const Word& w) {
  if (!is_reduced(w)) return false;
  if (w.size() < 2) return true;
  return !w.last_applied().cancels(w.first_applied());
}

bool in_beta_subgroup(const Word& w) { return !free_reduce(w).contains_alpha(); }

Word free_reduce(const Word& w) {
  std::vector<Letter> stack;
  stack.reserve(w.size());
  for (const auto& l : w.letters()) {
    if (!stack.empty() && stack.back().cancels(l)) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  return Word(std::move(stack));
}

CyclicReduction cyclic_reduce(const Word& w) {
  const Word r = free_reduce(w);
  const auto letters = r.letters();
  std::size_t lo = 0;
  std::size_t hi = letters.size();  // core is letters[lo, hi)
  std::vector<Letter> outer_first;
  while (hi - lo >= 2 && letters[hi - 1].cancels(letters[lo])) {
    outer_first.push_back(letters[hi - 1]);
    ++lo;
    --hi;
  }
  CyclicReduction out;
  out.conjugator = Word::from_left_to_right(outer_first);
  out.core = Word(std::vector<Letter>(letters.begin() + static_cast<std::ptrdiff_t>(lo),
                                      letters.begin() + static_cast<std::ptrdiff_t>(hi)));
  return out;
}

ExponentReport exponent_sums(const Word& w, int gen) {
  ExponentReport rep;
  for (const auto& l : w.letters()) {
    if (l.gen != gen) continue;
    if (l.sign > 0) {
      ++rep.positive;
    } else {
      --rep.negative;
    }
  }
  rep.total = rep.positive + rep.negative;
  return rep;
}

std::vector<std::int64_t> abelianize(const Word& w, int generators) {
  std::vector<std::int64_t> v(static_cast<std::size_t>(generators), 0);
  for (const auto& l : w.letters()) {
    if (l.gen < 0 || l.gen >= generators) {
      throw PreconditionError("abelianize: generator outside basis");
    }
    v[static_cast<std::size_t>(l.gen)] += l.sign;
  }
  return v;
}

std::optional<std::int64_t> is_power_of(const Word& w, const Word& c) {
  if (c.empty() || !is_reduced(c)) {
    throw PreconditionError("is_power_of: c must be nontrivial and reduced");
  }
  const auto [u, root] = cyclic_reduce(c);
  const Word inner = free_reduce(u.inverse() * w * u);
  if (inner.empty()) return 0;
  if (inner.size() % root.size() != 0) return std::nullopt;
  const auto k = static_cast<std::int64_t>(inner.size() / root.size());
  // root is cyclically reduced, so its powers are already reduced.
  if (inner == power(root, k)) return k;
  if (inner == power(root, -k)) return -k;
  return std::nullopt;
}

bool cyclic_conjugacy_check(const Word& u, const Word& v) {
  const Word p = cyclic_reduce(u).core;
  const Word q = cyclic_reduce(v).core;
  if (p.size() != q.size()) return false;
  if (p.empty()) return true;
  std::vector<Letter> doubled(p.letters().begin(), p.letters().end());
  doubled.insert(doubled.end(), p.letters().begin(), p.letters().end());
  return std::search(doubled.begin(), doubled.end(), q.letters().begin(), q.letters().end()) !=
         doubled.end();
}

// ---------------------------------------------------------------------------
// Text syntax

namespace {

std::int64_t parse_int(std::string_view s, std::string_view token) {
  std::int64_t value = 0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end || begin == end) {
    throw PreconditionError("bad exponent in token '" + std::string(token) + "'");
  }
  return value;
}

bool starts_with(std::string_view s, std::string_view prefix) {
  return s.size() >= prefix.size() && s.substr(0, prefix.size()) == prefix;
}

}  // namespace

Word parse_word(std::string_view text, const Alphabet& alphabet) {
  std::vector<Letter> written;
  std::size_t pos = 0;
  auto is_sep = [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) || ch == '*'; };
  while (pos < text.size()) {
    while (pos < text.size() && is_sep(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    if (end == pos) break;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;

    if (token == "1") continue;
    std::string_view head = token;
    std::int64_t exponent = 1;
    if (auto caret = token.find('^'); caret != std::string_view::npos) {
      head = token.substr(0, caret);
      exponent = parse_int(token.substr(caret + 1), token);
    }
    int gen = -1;
    if (head == alphabet.beta_name) {
      gen = kBeta;
    } else if (starts_with(head, alphabet.alpha_prefix) && head.size() > alphabet.alpha_prefix.size()) {
      const auto digits = head.substr(alphabet.alpha_prefix.size());
      if (std::all_of(digits.begin(), digits.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
        const auto idx = parse_int(digits, token);
        if (idx >= 1 && idx < 1'000'000) gen = static_cast<int>(idx);
      }
    }
    if (gen < 0) throw PreconditionError("unknown letter '" + std::string(token) + "'");
    const Letter l{gen, exponent < 0 ? -1 : 1};
    for (std::int64_t r = 0; r < std::llabs(exponent); ++r) written.push_back(l);
  }
  return Word::from_left_to_right(written);
}

std::string format_letter(const Letter& l, const Alphabet& alphabet) {
  std::string out = l.is_beta() ? alphabet.beta_name : alphabet.alpha_prefix + std::to_string(l.gen);
  if (l.sign < 0) out += "^-1";
  return out;
}

std::string format_word(const Word& w, const Alphabet& alphabet) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t k = w.size(); k-- > 0;) {
    out += format_letter(w[k], alphabet);
    if (k != 0) out += ' ';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Nielsen moves

namespace {

void check_move(const NielsenMove& m, int generators) {
  auto in_range = [&](int idx) { return idx >= 0 && idx < generators; };
  if (!in_range(m.i) || !in_range(m.j)) throw PreconditionError("Nielsen move index out of rank");
  if (m.kind != NielsenMove::Kind::Invert && m.i == m.j) {
    throw PreconditionError("Nielsen move indices must be distinct");
  }
  if (m.kind == NielsenMove::Kind::Multiply && m.sign != 1 && m.sign != -1) {
    throw PreconditionError("Nielsen multiply sign must be +1 or -1");
  }
}

Word substitute(const Word& w, const std::vector<Word>& images) {
  std::vector<Letter> out;
  out.reserve(w.size() * 2);
  for (const auto& l : w.letters()) {
    const Word& img = images[static_cast<std::size_t>(l.gen)];
    if (l.sign > 0) {
      out.insert(out.end(), img.letters().begin(), img.letters().end());
    } else {
      const Word inv = img.inverse();
      out.insert(out.end(), inv.letters().begin(), inv.letters().end());
    }
  }
  return free_reduce(Word(std::move(out)));
}

std::vector<Word> move_images(const NielsenMove& m, int generators) {
  std::vector<Word> images;
  images.reserve(static_cast<std::size_t>(generators));
  for (int g = 0; g < generators; ++g) images.push_back(Word::letter(g));
  const auto i = static_cast<std::size_t>(m.i);
  const auto j = static_cast<std::size_t>(m.j);
  switch (m.kind) {
    case NielsenMove::Kind::Invert:
      images[i] = Word::letter(m.i, -1);
      break;
    case NielsenMove::Kind::Swap:
      std::swap(images[i], images[j]);
      break;
    case NielsenMove::Kind::Multiply: {
      const Word tj = Word::letter(m.j, m.sign);
      images[i] = m.side == NielsenMove::Side::Right ? Word::letter(m.i) * tj : tj * Word::letter(m.i);
      break;
    }
  }
  return images;
}

IntMatrix identity_matrix(int n) {
  IntMatrix m(static_cast<std::size_t>(n), std::vector<std::int64_t>(static_cast<std::size_t>(n), 0));
  for (int k = 0; k < n; ++k) m[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 1;
  return m;
}

// Left-multiplies m by the elementary matrix of the move, in place.
void apply_elementary(IntMatrix& m, const NielsenMove& mv) {
  const auto i = static_cast<std::size_t>(mv.i);
  const auto j = static_cast<std::size_t>(mv.j);
  switch (mv.kind) {
    case NielsenMove::Kind::Invert:
      for (auto& x : m[i]) x = -x;
      break;
    case NielsenMove::Kind::Swap:
      std::swap(m[i], m[j]);
      break;
    case NielsenMove::Kind::Multiply:
      // column i of the elementary matrix gains sign at row j
      for (std::size_t col = 0; col < m[j].size(); ++col) m[j][col] += mv.sign * m[i][col];
      break;
  }
}

std::pair<std::int64_t, std::int64_t> extended_gcd(std::int64_t a, std::int64_t b, std::int64_t& g) {
  // returns (x, y) with a*x + b*y = g = gcd(a, b) (g may be negative)
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::make_pair(r, old_r - q * r);
    std::tie(old_s, s) = std::make_pair(s, old_s - q * s);
    std::tie(old_t, t) = std::make_pair(t, old_t - q * t);
  }
  g = old_r;
  return {old_s, old_t};
}

}  // namespace

Word apply_moves(std::span<const NielsenMove> moves, const Word& w, int generators) {
  if (w.max_generator() >= generators) throw PreconditionError("apply_moves: word outside basis");
  Word current = free_reduce(w);
  for (const auto& m : moves) {
    check_move(m, generators);
    current = substitute(current, move_images(m, generators));
  }
  return current;
}

IntMatrix abelianized_matrix(std::span<const NielsenMove> moves, int generators) {
  IntMatrix m = identity_matrix(generators);
  for (const auto& mv : moves) {
    check_move(mv, generators);
    apply_elementary(m, mv);
  }
  return m;
}

__extension__ typedef __int128 Wide;

std::int64_t determinant(IntMatrix m) {
  // Bareiss fraction-free elimination
  const std::size_t n = m.size();
  if (n == 0) return 1;
  std::int64_t sign = 1;
  std::int64_t prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == 0) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == 0) ++swap_row;
      if (swap_row == n) return 0;
      std::swap(m[k], m[swap_row]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        const Wide num = static_cast<Wide>(m[i][j]) * m[k][k] - static_cast<Wide>(m[i][k]) * m[k][j];
        m[i][j] = static_cast<std::int64_t>(num / prev);
      }
    }
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

std::vector<std::int64_t> multiply(const IntMatrix& m, std::span<const std::int64_t> v) {
  std::vector<std::int64_t> out(m.size(), 0);
  for (std::size_t r = 0; r < m.size(); ++r) {
    for (std::size_t c = 0; c < v.size(); ++c) out[r] += m[r][c] * v[c];
  }
  return out;
}

IntMatrix bezout_matrix(std::int64_t s1, std::int64_t s2) {
  if (s1 == 0 || s2 == 0) throw PreconditionError("bezout_matrix: sums must be nonzero");
  const std::int64_t m = std::lcm(s1, s2);
  const std::int64_t m1 = m / s1;
  const std::int64_t m2 = m / s2;
  std::int64_t g = 0;
  auto [a, b] = extended_gcd(m1, m2, g);
  if (g < 0) {
    a = -a;
    b = -b;
  }
  return {{m1, -m2}, {b, a}};
}

ZeroSumResult zero_sum_automorphism(std::span<const std::int64_t> sums, const Word& c) {
  const int n = static_cast<int>(sums.size());
  if (!is_reduced(c)) throw PreconditionError("zero_sum_automorphism: c must be reduced");
  if (c.max_generator() >= n) throw PreconditionError("zero_sum_automorphism: c uses a generator outside the basis");
  const auto actual = abelianize(c, n);
  if (!std::equal(actual.begin(), actual.end(), sums.begin())) {
    throw PreconditionError("zero_sum_automorphism: sums do not match c");
  }

  std::vector<bool> occurs(static_cast<std::size_t>(n), false);
  for (const auto& l : c.letters()) occurs[static_cast<std::size_t>(l.gen)] = true;
  if (c.empty()) throw PreconditionError("zero_sum_automorphism: trivial word");

  ZeroSumResult out;
  for (int g = 0; g < n; ++g) {
    if (occurs[static_cast<std::size_t>(g)] && sums[static_cast<std::size_t>(g)] == 0) {
      out.image = c;
      out.witness = g;
      out.matrix = identity_matrix(n);
      return out;
    }
  }

  std::vector<int> candidates;
  for (int g = 0; g < n; ++g) {
    if (occurs[static_cast<std::size_t>(g)]) candidates.push_back(g);
  }
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
    const auto sa = std::llabs(sums[static_cast<std::size_t>(a)]);
    const auto sb = std::llabs(sums[static_cast<std::size_t>(b)]);
    return sa != sb ? sa < sb : a < b;
  });

  std::vector<std::int64_t> v(sums.begin(), sums.end());
  int p = candidates[0];
  int q = 0;
  if (candidates.size() >= 2) {
    q = candidates[1];
  } else {
    if (n < 2) throw PreconditionError("zero_sum_automorphism: no automorphism of a rank-1 group zeroes a nonzero sum");
    q = p == 0 ? 1 : 0;
    out.moves.push_back(NielsenMove::multiply(p, q, NielsenMove::Side::Right, 1));
    v[static_cast<std::size_t>(q)] += v[static_cast<std::size_t>(p)];
  }

  // Euclid on (v_p, v_q); multiply(i, j, ., s) adds s*v_i to v_j.
  auto& vp = v[static_cast<std::size_t>(p)];
  auto& vq = v[static_cast<std::size_t>(q)];
  while (vp != 0 && vq != 0) {
    if (std::llabs(vp) >= std::llabs(vq)) {
      const std::int64_t k = vp / vq;
      const int s = k > 0 ? -1 : 1;
      for (std::int64_t r = 0; r < std::llabs(k); ++r) {
        out.moves.push_back(NielsenMove::multiply(q, p, NielsenMove::Side::Right, s));
      }
      vp -= k * vq;
    } else {
      const std::int64_t k = vq / vp;
      const int s = k > 0 ? -1 : 1;
      for (std::int64_t r = 0; r < std::llabs(k); ++r) {
        out.moves.push_back(NielsenMove::multiply(p, q, NielsenMove::Side::Right, s));
      }
      vq -= k * vp;
    }
  }
  out.witness = vp == 0 ? p : q;
  out.image = apply_moves(out.moves, c, n);

  auto occurs_in = [](const Word& w, int g) {
    return std::any_of(w.letters().begin(), w.letters().end(), [g](const Letter& l) { return l.gen == g; });
  };
  if (!occurs_in(out.image, out.witness)) {
    // Conjugate every other basis element by the witness: the image becomes
    // t_w * image * t_w^{-1}, which spells t_w while keeping its sum at zero.
    for (int g = 0; g < n; ++g) {
      if (g == out.witness) continue;
      out.moves.push_back(NielsenMove::multiply(g, out.witness, NielsenMove::Side::Left, 1));
      out.moves.push_back(NielsenMove::multiply(g, out.witness, NielsenMove::Side::Right, -1));
    }
    out.image = apply_moves(out.moves, c, n);
  }
  out.matrix = abelianized_matrix(out.moves, n);
  return out;
}

}  // namespace pinch
