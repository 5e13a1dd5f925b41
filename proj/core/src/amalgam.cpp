#include "pinch/amalgam.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>

namespace pinch {

// ---------------------------------------------------------------------------
// Text

RawWord parse_raw(std::string_view text, const AmalgamAlphabet& alphabet) {
  auto is_sep = [](char ch) { return std::isspace(static_cast<unsigned char>(ch)) || ch == '*'; };
  RawWord written;  // left to right
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_sep(text[pos])) ++pos;
    std::size_t end = pos;
    while (end < text.size() && !is_sep(text[end])) ++end;
    if (end == pos) break;
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    Word w;
    Factor f = Factor::G;
    try {
      w = parse_word(token, alphabet.g);
    } catch (const PreconditionError&) {
      w = parse_word(token, alphabet.h);  // rethrows for unknown letters
      f = Factor::H;
    }
    for (std::size_t k = w.size(); k-- > 0;) written.push_back(AmalgamLetter{f, w[k]});
  }
  return RawWord(written.rbegin(), written.rend());
}

std::string format_raw(const RawWord& w, const AmalgamAlphabet& alphabet) {
  if (w.empty()) return "1";
  std::string out;
  for (std::size_t k = w.size(); k-- > 0;) {
    out += format_letter(w[k].letter, w[k].factor == Factor::G ? alphabet.g : alphabet.h);
    if (k != 0) out += ' ';
  }
  return out;
}

std::string format_amalgam(const AmalgamWord& w, const AmalgamAlphabet& alphabet) {
  std::string out = "c^" + std::to_string(w.prefix);
  for (std::size_t k = w.syllables.size(); k-- > 0;) {
    const auto& s = w.syllables[k];
    out += " | ";
    out += format_word(s.word, s.factor == Factor::G ? alphabet.g : alphabet.h);
  }
  return out;
}

RawWord embed_factor(Factor f, const Word& w) {
  RawWord out;
  for (const auto& l : w.letters()) out.push_back(AmalgamLetter{f, l});
  return out;
}

RawWord to_raw(const AmalgamWord& w, const Word& c) {
  RawWord out;
  for (const auto& s : w.syllables) {
    const auto part = embed_factor(s.factor, s.word);
    out.insert(out.end(), part.begin(), part.end());
  }
  const auto prefix = embed_factor(Factor::G, free_reduce(power(c, w.prefix)));
  out.insert(out.end(), prefix.begin(), prefix.end());
  return out;
}

// ---------------------------------------------------------------------------
// Normal form

AmalgamWord normal_form(const RawWord& raw, const Word& c, const Word& d) {
  AmalgamWord out;
  auto& syl = out.syllables;
  for (const auto& l : raw) {
    if (syl.empty() || syl.back().factor != l.factor) syl.push_back(Syllable{l.factor, Word()});
    syl.back().word.push_applied_after(l.letter);
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<Syllable> merged;
    for (auto& s : syl) {
      s.word = free_reduce(s.word);
      if (s.word.empty()) continue;
      if (!merged.empty() && merged.back().factor == s.factor) {
        merged.back().word = free_reduce(s.word * merged.back().word);
        if (merged.back().word.empty()) merged.pop_back();
        changed = true;
        continue;
      }
      merged.push_back(std::move(s));
    }
    syl = std::move(merged);
    for (std::size_t i = 0; i < syl.size(); ++i) {
      const bool in_g = syl[i].factor == Factor::G;
      const auto k = is_power_of(syl[i].word, in_g ? c : d);
      if (!k) continue;
      if (i + 1 == syl.size()) {
        out.prefix += *k;
        syl.pop_back();
      } else {
        syl[i] = Syllable{in_g ? Factor::H : Factor::G, free_reduce(power(in_g ? d : c, *k))};
      }
      changed = true;
      break;
    }
  }
  return out;
}

bool is_normal(const AmalgamWord& w, const Word& c, const Word& d) {
  for (std::size_t i = 0; i < w.syllables.size(); ++i) {
    const auto& s = w.syllables[i];
    if (s.word.empty() || !is_reduced(s.word)) return false;
    if (i > 0 && w.syllables[i - 1].factor == s.factor) return false;
    if (is_power_of(s.word, s.factor == Factor::G ? c : d)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Sigma

SigmaState SigmaState::restore(FinitePermutation perm, PointSet forbidden, std::vector<OrbitMatch> matches) {
  SigmaState s;
  s.perm_ = std::move(perm);
  s.forbidden_ = std::move(forbidden);
  s.matches_ = std::move(matches);
  return s;
}

CensusMismatch::CensusMismatch(std::int64_t size_, std::int64_t g, std::int64_t h)
    : PreconditionError("census mismatch at orbit size " + std::to_string(size_) + ": G has " + std::to_string(g) +
                        ", H has " + std::to_string(h)),
      size(size_),
      g_count(g),
      h_count(h) {}

PointSet witness_set(const ClosedAction& a, const Word& c, const Word& g, const Interval& window) {
  if (is_power_of(g, c)) throw PreconditionError("witness_set: g lies in <c>");
  PointSet out;
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (evaluate(a, c, x) != x) continue;
    const Point gx = evaluate(a, g, x);
    if (gx != x && evaluate(a, c, gx) == gx) out.insert(x);
  }
  return out;
}

namespace {

// Non-fixed orbits contained in the window, each listed from its least point.
std::map<std::int64_t, std::vector<std::vector<Point>>> moving_orbits(const ClosedAction& a, const Word& w,
                                                                      const Interval& window) {
  std::map<std::int64_t, std::vector<std::vector<Point>>> out;
  PointSet seen;
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (seen.contains(x)) continue;
    std::vector<Point> orbit{x};
    bool inside = true;
    for (Point y = evaluate(a, w, x); y != x; y = evaluate(a, w, y)) {
      if (!window.contains(y) || static_cast<std::int64_t>(orbit.size()) > window.size()) {
        inside = false;
        break;
      }
      orbit.push_back(y);
    }
    for (auto p : orbit) seen.insert(p);
    if (inside && orbit.size() > 1) out[static_cast<std::int64_t>(orbit.size())].push_back(std::move(orbit));
  }
  return out;
}

bool fixed_by(const ClosedAction& a, const Word& w, Point x) { return evaluate(a, w, x) == x; }

}  // namespace

SigmaState match_orbits_sigma(const FactorPair& f) {
  const auto g_orbits = moving_orbits(*f.ga, f.c, f.g_window);
  const auto h_orbits = moving_orbits(*f.ha, f.d, f.h_window);
  std::set<std::int64_t> sizes;
  for (const auto& [s, list] : g_orbits) sizes.insert(s);
  for (const auto& [s, list] : h_orbits) sizes.insert(s);
  for (auto s : sizes) {
    const auto g_count = g_orbits.contains(s) ? static_cast<std::int64_t>(g_orbits.at(s).size()) : 0;
    const auto h_count = h_orbits.contains(s) ? static_cast<std::int64_t>(h_orbits.at(s).size()) : 0;
    if (g_count != h_count) throw CensusMismatch(s, g_count, h_count);
  }
  SigmaState sigma;
  for (const auto& [s, list] : g_orbits) {
    const auto& partners = h_orbits.at(s);
    for (std::size_t i = 0; i < list.size(); ++i) {
      for (std::size_t j = 0; j < list[i].size(); ++j) {
        sigma.rewire(list[i][j], partners[i][j]);
        sigma.protect(list[i][j]);
        sigma.protect(partners[i][j]);
      }
      sigma.add_match(OrbitMatch{s, list[i].front(), partners[i].front()});
    }
  }
  return sigma;
}

namespace {

class ChainBuilder {
 public:
  ChainBuilder(SigmaState& work, const FactorPair& f) : work_(work), f_(f) {}

  bool fresh(Point p) const { return work_.is_new(p) && !used_.contains(p); }

  void take(Point p) {
    used_.insert(p);
    chain_.push_back(p);
  }

  // x in the factor's witness set with x and s.x both fresh.
  std::pair<Point, Point> pick_witness(const Syllable& s) {
    const bool in_g = s.factor == Factor::G;
    const ClosedAction& a = in_g ? *f_.ga : *f_.ha;
    const Word& z = in_g ? f_.c : f_.d;
    const Interval window = in_g ? f_.g_window : f_.h_window;
    for (Point x = window.lo; x <= window.hi; ++x) {
      if (!fresh(x) || !fixed_by(a, z, x)) continue;
      const Point sx = evaluate(a, s.word, x);
      if (sx == x || !fresh(sx) || !fixed_by(a, z, sx)) continue;
      return {x, sx};
    }
    throw PreconditionError("force_amalgam_witness: witness set of " +
                            format_word(s.word, in_g ? Alphabet{"a", "b"} : Alphabet{"x", "y"}) +
                            " is depleted; schedule more Witness conditions");
  }

  // Beyond the G window every point is c-fixed.
  Point pick_fixed() {
    for (Point x = f_.g_window.hi + 1;; ++x) {
      if (fresh(x) && fixed_by(*f_.ga, f_.c, x)) return x;
    }
  }

  void rewire(Point x, Point y) {
    if (!fixed_by(*f_.ga, f_.c, x) || !fixed_by(*f_.ha, f_.d, y)) {
      throw std::logic_error("force_amalgam_witness: rewiring outside Fix(c) x Fix(d)");
    }
    work_.rewire(x, y);
    work_.protect(x);
  }

  std::vector<Point> chain() const { return chain_; }

 private:
  SigmaState& work_;
  const FactorPair& f_;
  PointSet used_;
  std::vector<Point> chain_;
};

}  // namespace

ForceResult force_amalgam_witness(SigmaState& sigma, const AmalgamWord& w, const FactorPair& f) {
  if (!is_normal(w, f.c, f.d)) {
    throw PreconditionError("force_amalgam_witness: word is not in normal form (a syllable lies in <c> = <d>)");
  }
  ForceResult result;
  if (w.syllables.empty()) {
    if (w.prefix == 0) throw PreconditionError("force_amalgam_witness: trivial word");
    const Word ck = free_reduce(power(f.c, w.prefix));
    for (Point x = f.g_window.lo; x <= f.g_window.hi; ++x) {
      const Point y = evaluate(*f.ga, ck, x);
      if (y != x) return ForceResult{x, y, {x, y}};
    }
    throw PreconditionError("force_amalgam_witness: no point moved by the prefix");
  }

  SigmaState work = sigma;
  ChainBuilder cb(work, f);
  // Either the current point sits on the G side, or an H point waits for
  // its G preimage.
  Point at_g = 0;
  bool have_g = false;
  Point pending_h = 0;
  bool have_pending = false;
  for (const auto& s : w.syllables) {
    if (s.factor == Factor::H) {
      if (!have_g) {
        at_g = cb.pick_fixed();
        cb.take(at_g);
        result.x0 = at_g;
      }
      const auto [y, hy] = cb.pick_witness(s);
      cb.take(y);
      cb.take(hy);
      cb.rewire(at_g, y);
      have_g = false;
      pending_h = hy;
      have_pending = true;
    } else {
      const auto [z, gz] = cb.pick_witness(s);
      cb.take(z);
      cb.take(gz);
      if (have_pending) {
        cb.rewire(z, pending_h);
        have_pending = false;
      } else {
        result.x0 = z;
      }
      at_g = gz;
      have_g = true;
    }
  }
  if (have_pending) {
    const Point z = cb.pick_fixed();
    cb.take(z);
    cb.rewire(z, pending_h);
    at_g = z;
  }
  result.chain = cb.chain();
  result.image = evaluate(*f.ga, free_reduce(power(f.c, w.prefix)), at_g);
  for (auto p : result.chain) work.protect(p);
  if (evaluate_amalgam(w, result.x0, work, f) != result.image || result.image == result.x0) {
    throw std::logic_error("force_amalgam_witness: chain does not evaluate as built");
  }
  sigma = std::move(work);
  return result;
}

void match_folner_sigma(SigmaState& sigma, const PointSet& a, const PointSet& b, const FactorPair& f) {
  if (a.size() != b.size()) throw PreconditionError("match_folner_sigma: |A| != |B|");
  for (auto x : a) {
    if (!fixed_by(*f.ga, f.c, x)) throw PreconditionError("match_folner_sigma: A is not inside Fix(c)");
    if (sigma.forbidden().contains(x)) throw PreconditionError("match_folner_sigma: A meets sigma's fixed part");
  }
  for (auto y : b) {
    if (!fixed_by(*f.ha, f.d, y)) throw PreconditionError("match_folner_sigma: B is not inside Fix(d)");
    if (!sigma.is_new(y)) throw PreconditionError("match_folner_sigma: B meets sigma's fixed part");
  }
  auto it = b.begin();
  for (auto x : a) {
    sigma.rewire(x, *it++);
    sigma.protect(x);
  }
}

Point evaluate_amalgam(const RawWord& w, Point x, const SigmaState& sigma, const FactorPair& f) {
  for (const auto& l : w) {
    if (l.factor == Factor::G) {
      x = f.ga->apply(l.letter, x);
    } else {
      x = sigma.apply_inverse(f.ha->apply(l.letter, sigma.apply(x)));
    }
  }
  return x;
}

Point evaluate_amalgam(const AmalgamWord& w, Point x, const SigmaState& sigma, const FactorPair& f) {
  return evaluate_amalgam(to_raw(w, f.c), x, sigma, f);
}

std::vector<Point> intertwining_violations(const SigmaState& sigma, const FactorPair& f, const Interval& window) {
  std::vector<Point> bad;
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (sigma.apply(evaluate(*f.ga, f.c, x)) != evaluate(*f.ha, f.d, sigma.apply(x))) bad.push_back(x);
  }
  return bad;
}

nlohmann::json sigma_to_json(const SigmaState& sigma) {
  nlohmann::json j;
  j["schema"] = 1;
  j["pairs"] = nlohmann::json::array();
  for (const auto& [x, y] : sigma.permutation().moved()) j["pairs"].push_back({x, y});
  j["orbit_matches"] = nlohmann::json::array();
  for (const auto& m : sigma.orbit_matches()) {
    j["orbit_matches"].push_back({{"size", m.size}, {"c_base", m.c_base}, {"d_base", m.d_base}});
  }
  j["forbidden"] = std::vector<Point>(sigma.forbidden().begin(), sigma.forbidden().end());
  return j;
}

SigmaState sigma_from_json(const nlohmann::json& j) {
  if (!j.is_object() || j.value("schema", 0) != 1) throw PreconditionError("sigma: schema version mismatch");
  FinitePermutation perm;
  std::set<Point> images;
  for (const auto& p : j.at("pairs")) {
    const auto x = p.at(0).get<Point>();
    const auto y = p.at(1).get<Point>();
    if (x == y || !images.insert(y).second) throw PreconditionError("sigma: pairs do not form a permutation");
    perm.set(x, y);
  }
  for (const auto& [x, y] : perm.moved()) {
    if (!perm.moved().contains(y)) throw PreconditionError("sigma: pairs do not form a permutation");
  }
  std::vector<OrbitMatch> matches;
  for (const auto& m : j.at("orbit_matches")) {
    matches.push_back(
        OrbitMatch{m.at("size").get<std::int64_t>(), m.at("c_base").get<Point>(), m.at("d_base").get<Point>()});
  }
  const auto forbidden = j.at("forbidden").get<std::vector<Point>>();
  return SigmaState::restore(std::move(perm), PointSet(forbidden.begin(), forbidden.end()), std::move(matches));
}

}  // namespace pinch
