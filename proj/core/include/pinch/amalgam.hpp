#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pinch/extension.hpp"
#include "pinch/word.hpp"

namespace pinch {

enum class Factor { G, H };

struct AmalgamLetter {
  Factor factor = Factor::G;
  Letter letter;
  friend bool operator==(const AmalgamLetter&, const AmalgamLetter&) = default;
};

/// Word over both alphabets; index 0 acts first.
using RawWord = std::vector<AmalgamLetter>;

struct Syllable {
  Factor factor = Factor::G;
  Word word;
  friend bool operator==(const Syllable&, const Syllable&) = default;
};

/// c^prefix * s_n * ... * s_1 with syllables[0] = s_1.
struct AmalgamWord {
  std::int64_t prefix = 0;
  std::vector<Syllable> syllables;
  friend bool operator==(const AmalgamWord&, const AmalgamWord&) = default;
};

/// G letters a1.. and b, H letters x1.. and y.
struct AmalgamAlphabet {
  Alphabet g{"a", "b"};
  Alphabet h{"x", "y"};
};

RawWord parse_raw(std::string_view text, const AmalgamAlphabet& alphabet = {});
std::string format_raw(const RawWord& w, const AmalgamAlphabet& alphabet = {});
std::string format_amalgam(const AmalgamWord& w, const AmalgamAlphabet& alphabet = {});
RawWord to_raw(const AmalgamWord& w, const Word& c);
RawWord embed_factor(Factor f, const Word& w);

/// Syllable decomposition; syllables lying in <c> or <d> cross over and
/// merge, a leftmost one becomes the prefix.
AmalgamWord normal_form(const RawWord& raw, const Word& c, const Word& d);
/// Strict alternation and no syllable in the amalgamated subgroup.
bool is_normal(const AmalgamWord& w, const Word& c, const Word& d);

struct OrbitMatch {
  std::int64_t size = 0;
  Point c_base = 0;
  Point d_base = 0;
  friend bool operator==(const OrbitMatch&, const OrbitMatch&) = default;
};

/// A permutation sigma with sigma c = d sigma, the identity off a finite set.
class SigmaState {
 public:
  Point apply(Point x) const { return perm_.apply(x); }
  Point apply_inverse(Point y) const { return perm_.apply_inverse(y); }
  /// sigma(x) := y; the old preimage of y takes the old image of x.
  void rewire(Point x, Point y) { perm_.rewire(x, y); }
  const FinitePermutation& permutation() const { return perm_; }

  /// Points whose sigma-value later steps must keep.
  const PointSet& forbidden() const { return forbidden_; }
  void protect(Point x) { forbidden_.insert(x); }
  /// x outside forbidden and sigma(forbidden).
  bool is_new(Point x) const { return !forbidden_.contains(x) && !forbidden_.contains(apply_inverse(x)); }

  const std::vector<OrbitMatch>& orbit_matches() const { return matches_; }
  void add_match(OrbitMatch m) { matches_.push_back(m); }

  friend bool operator==(const SigmaState&, const SigmaState&) = default;

  static SigmaState restore(FinitePermutation perm, PointSet forbidden, std::vector<OrbitMatch> matches);

 private:
  FinitePermutation perm_;
  PointSet forbidden_;
  std::vector<OrbitMatch> matches_;
};

/// The factor actions with the windows holding their non-fixed orbits.
struct FactorPair {
  const ClosedAction* ga = nullptr;
  const ClosedAction* ha = nullptr;
  Word c;
  Word d;
  Interval g_window;
  Interval h_window;
};

class CensusMismatch : public PreconditionError {
 public:
  CensusMismatch(std::int64_t size, std::int64_t g_count, std::int64_t h_count);
  std::int64_t size;
  std::int64_t g_count;
  std::int64_t h_count;
};

/// {x in window : cx = x, cgx = gx, gx != x}.
PointSet witness_set(const ClosedAction& a, const Word& c, const Word& g, const Interval& window);

/// Pairs the non-fixed c-orbits of G with the d-orbits of H of equal size.
SigmaState match_orbits_sigma(const FactorPair& f);

struct ForceResult {
  Point x0 = 0;
  Point image = 0;
  std::vector<Point> chain;
};

/// Extends sigma so that w moves a new point x0.
ForceResult force_amalgam_witness(SigmaState& sigma, const AmalgamWord& w, const FactorPair& f);

/// sigma(a_i) := b_i for sorted A, B.
void match_folner_sigma(SigmaState& sigma, const PointSet& a, const PointSet& b, const FactorPair& f);

Point evaluate_amalgam(const RawWord& w, Point x, const SigmaState& sigma, const FactorPair& f);
Point evaluate_amalgam(const AmalgamWord& w, Point x, const SigmaState& sigma, const FactorPair& f);

/// Points x of the window with sigma(c x) != d(sigma x).
std::vector<Point> intertwining_violations(const SigmaState& sigma, const FactorPair& f, const Interval& window);

nlohmann::json sigma_to_json(const SigmaState& sigma);
SigmaState sigma_from_json(const nlohmann::json& j);

}  // namespace pinch
