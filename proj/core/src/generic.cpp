#include "pinch/generic.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace pinch {

namespace {

void require_generic_word(const Word& c) {
  if (c.empty() || !is_cyclically_reduced(c)) throw PreconditionError("c must be cyclically reduced");
  if (!c.contains_alpha()) throw PreconditionError("c lies in <beta>");
  if (exponent_sums(c, kBeta).total != 0) throw PreconditionError("S_c(beta) must be zero");
}

std::int64_t folner_size(const Word& c, std::int64_t m) { return m + 2 * exponent_sums(c, kBeta).positive; }

// Prefix sums of the beta-exponents of c read left to right, taken at the
// end of every beta-run (includes the final sum 0).
std::pair<std::int64_t, std::int64_t> prefix_sum_range(const Word& c) {
  std::int64_t sum = 0;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  const auto letters = c.letters();
  for (auto it = letters.rbegin(); it != letters.rend(); ++it) {
    if (!it->is_beta()) continue;
    sum += it->sign;
    lo = std::min(lo, sum);
    hi = std::max(hi, sum);
  }
  return {lo, hi};
}

}  // namespace

FolnerPlan plan_folner_intervals(ActionState& state, const Word& c, int count) {
  if (c.empty() || !is_cyclically_reduced(c)) throw PreconditionError("plan_folner_intervals: c must be cyclically reduced");
  if (exponent_sums(c, kBeta).total != 0) throw PreconditionError("plan_folner_intervals: S_c(beta) must be zero");
  FolnerPlan plan;
  plan.s_plus = exponent_sums(c, kBeta).positive;
  for (int m = 1; m <= count; ++m) plan.intervals.push_back(state.allocate(folner_size(c, m) - 1));
  return plan;
}

Interval compute_E_m(const FolnerPlan& plan, const Word& c, int m, const ClosedAction& a) {
  if (m < 1 || static_cast<std::size_t>(m) > plan.intervals.size()) throw PreconditionError("compute_E_m: no interval A_m");
  const Interval am = plan.intervals[static_cast<std::size_t>(m - 1)];
  for (int i = 1; i <= a.rank(); ++i) {
    for (Point x = am.lo; x <= am.hi; ++x) {
      if (a.alpha(i).apply(x) != x) throw PreconditionError("compute_E_m: A_m is not fixed by every alpha");
    }
  }
  // Sums of beta-exponents applied before each alpha letter, measured from
  // the right end, are the negatives of the left-to-right prefix sums.
  const auto [lo, hi] = prefix_sum_range(c);
  return Interval{am.lo + hi, am.hi + lo};
}

Interval compute_E_prime(const FolnerPlan& plan, const Word& c, int m, const ClosedAction& a) {
  const Interval e = compute_E_m(plan, c, m, a);
  if (e.size() < m) throw std::logic_error("compute_E_prime: |E_m| < m");
  return Interval{e.lo, e.lo + m - 1};
}

std::string to_string(ConditionKind kind) {
  switch (kind) {
    case ConditionKind::PowerMoves: return "PowerMoves";
    case ConditionKind::Witness: return "Witness";
    case ConditionKind::FixInterval: return "FixInterval";
    case ConditionKind::OrbitOfSize: return "OrbitOfSize";
  }
  return "?";
}

std::vector<Condition> schedule(const Word& c, const Budgets& budgets) {
  for (const auto& w : budgets.witness_words) {
    if (w.empty() || !is_reduced(w)) throw PreconditionError("schedule: witness words must be reduced and nontrivial");
    if (is_power_of(w, c)) throw PreconditionError("schedule: witness word " + format_word(w) + " lies in <c>");
  }
  std::vector<Condition> out;
  for (int m = 1; m <= budgets.intervals; ++m) out.push_back(Condition{ConditionKind::FixInterval, m, 0, {}, false, {}});

  std::vector<Condition> orbits;
  for (int m = 1; m <= budgets.orbit_sizes; ++m) {
    for (int j = 1; j <= budgets.copies; ++j) orbits.push_back(Condition{ConditionKind::OrbitOfSize, m, j, {}, false, {}});
  }
  const std::size_t rounds = std::max({static_cast<std::size_t>(std::max(budgets.powers, 0)),
                                       budgets.witness_words.size(), orbits.size()});
  for (std::size_t r = 0; r < rounds; ++r) {
    if (r < static_cast<std::size_t>(std::max(budgets.powers, 0))) {
      out.push_back(Condition{ConditionKind::PowerMoves, static_cast<std::int64_t>(r + 1), 0, {}, false, {}});
    }
    if (r < budgets.witness_words.size()) {
      out.push_back(Condition{ConditionKind::Witness, 0, 0, budgets.witness_words[r], false, {}});
    }
    if (r < orbits.size()) out.push_back(orbits[r]);
  }
  return out;
}

Census orbit_census(const ClosedAction& a, const Word& c, const Interval& window) {
  Census census;
  PointSet seen;
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (seen.contains(x)) continue;
    std::vector<Point> orbit{x};
    bool inside = true;
    for (Point y = evaluate(a, c, x); y != x; y = evaluate(a, c, y)) {
      if (!window.contains(y) || static_cast<std::int64_t>(orbit.size()) > window.size()) {
        inside = false;
        break;
      }
      orbit.push_back(y);
    }
    for (auto p : orbit) seen.insert(p);
    if (inside) ++census[static_cast<std::int64_t>(orbit.size())];
  }
  return census;
}

bool all_orbits_finite(const ClosedAction& a, const Word& c, const Interval& window) {
  for (Point x = window.lo; x <= window.hi; ++x) {
    Point y = evaluate(a, c, x);
    std::int64_t steps = 1;
    while (y != x && steps <= window.size()) {
      y = evaluate(a, c, y);
      ++steps;
    }
    if (y != x) return false;
  }
  return true;
}

Rational folner_ratio(const ClosedAction& a, const PointSet& s, const Word& w) {
  if (s.empty()) throw PreconditionError("folner_ratio: empty set");
  PointSet image;
  for (auto x : s) image.insert(evaluate(a, w, x));
  std::int64_t sym = 0;
  for (auto x : s) sym += image.contains(x) ? 0 : 1;
  for (auto y : image) sym += s.contains(y) ? 0 : 1;
  return Rational{sym, static_cast<std::int64_t>(s.size())};
}

bool verify_subgroup_transitive(const ClosedAction& a, const std::vector<Word>& gens, const Interval& window,
                                std::int64_t margin) {
  if (gens.empty()) throw PreconditionError("verify_subgroup_transitive: no generators");
  if (window.size() == 0) return true;
  const Interval bound{window.lo - margin, window.hi + margin};
  std::vector<Word> moves;
  for (const auto& g : gens) {
    moves.push_back(g);
    moves.push_back(g.inverse());
  }
  PointSet reached{window.lo};
  std::deque<Point> queue{window.lo};
  while (!queue.empty()) {
    const Point x = queue.front();
    queue.pop_front();
    for (const auto& g : moves) {
      const Point y = evaluate(a, g, x);
      if (bound.contains(y) && reached.insert(y).second) queue.push_back(y);
    }
  }
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (!reached.contains(x)) return false;
  }
  return true;
}

PointSet interval_points(const Interval& i) {
  PointSet out;
  for (Point x = i.lo; x <= i.hi; ++x) out.insert(x);
  return out;
}

// ---------------------------------------------------------------------------
// GenericBuilder

GenericBuilder::GenericBuilder(Word c, int rank, Point origin, Growth growth)
    : c_(std::move(c)), state_(rank, origin, growth) {
  require_generic_word(c_);
  if (c_.max_generator() > rank) throw PreconditionError("c uses a generator beyond the rank");
  plan_.s_plus = exponent_sums(c_, kBeta).positive;
}

GenericBuilder::GenericBuilder(Word c, ActionState state, std::vector<Condition> conditions)
    : c_(std::move(c)), state_(std::move(state)), conditions_(std::move(conditions)) {
  require_generic_word(c_);
  plan_.s_plus = exponent_sums(c_, kBeta).positive;
  for (const auto& cond : conditions_) {
    if (cond.kind != ConditionKind::FixInterval || !cond.discharged) continue;
    if (cond.k != static_cast<std::int64_t>(plan_.intervals.size()) + 1 || cond.evidence.size() != 2) {
      throw PreconditionError("stored FixInterval conditions out of order");
    }
    plan_.intervals.push_back(Interval{cond.evidence[0], cond.evidence[1]});
  }
}

void GenericBuilder::discharge(Condition& cond) {
  if (cond.discharged) return;
  switch (cond.kind) {
    case ConditionKind::FixInterval: {
      if (cond.k != static_cast<std::int64_t>(plan_.intervals.size()) + 1) {
        throw PreconditionError("FixInterval conditions must arrive in order 1, 2, ...");
      }
      const Interval a = state_.allocate(folner_size(c_, cond.k) - 1);
      plan_.intervals.push_back(a);
      cond.evidence = {a.lo, a.hi};
      break;
    }
    case ConditionKind::PowerMoves: {
      const auto e = embed_path(state_, free_reduce(power(c_, cond.k)));
      cond.evidence = {e.start, e.end};
      break;
    }
    case ConditionKind::Witness: {
      cond.evidence = {embed_Q_witness(state_, c_, cond.word)};
      break;
    }
    case ConditionKind::OrbitOfSize: {
      cond.evidence = {embed_cycle(state_, free_reduce(power(c_, cond.k)))};
      break;
    }
  }
  cond.discharged = true;
}

void GenericBuilder::run(std::vector<Condition> conditions) {
  for (auto& cond : conditions) {
    discharge(cond);
    conditions_.push_back(std::move(cond));
  }
}

Interval GenericBuilder::window() const {
  const auto& r = state_.reserved();
  const auto pad = static_cast<std::int64_t>(c_.size());
  if (r.empty()) return Interval{state_.origin() - pad, state_.origin() + pad};
  return Interval{*r.begin() - pad, *r.rbegin() + pad};
}

GenericBuilder build_generic_action(const Word& c, int rank, const std::vector<Condition>& conditions, Point origin,
                                    Growth growth) {
  GenericBuilder b(c, rank, origin, growth);
  b.run(conditions);
  return b;
}

GenericReport make_report(const GenericBuilder& builder, const Alphabet& alphabet) {
  (void)alphabet;
  const ClosedAction a = builder.action();
  const Word& c = builder.c();
  const Interval window = builder.window();
  GenericReport r;
  r.census = orbit_census(a, c, window);
  r.orbits_finite = all_orbits_finite(a, c, window);
  r.transitive = verify_subgroup_transitive(a, {Word::letter(kBeta)}, window);

  r.witnesses_ok = true;
  std::map<std::int64_t, std::int64_t> orbit_demand;
  for (const auto& cond : builder.conditions()) {
    if (cond.kind == ConditionKind::OrbitOfSize && cond.discharged) ++orbit_demand[cond.k];
    if (cond.kind != ConditionKind::Witness || !cond.discharged) continue;
    const Point x = cond.evidence.at(0);
    const Point wx = evaluate(a, cond.word, x);
    r.witnesses.push_back(WitnessEntry{cond.word, x, wx});
    if (evaluate(a, c, x) != x || evaluate(a, c, wx) != wx || wx == x) r.witnesses_ok = false;
  }
  r.census_ok = true;
  for (const auto& [m, count] : orbit_demand) {
    auto it = r.census.find(m);
    if (it == r.census.end() || it->second < count) r.census_ok = false;
  }

  r.folner_ok = true;
  std::vector<Word> probes{Word::letter(kBeta)};
  for (int i = 1; i <= a.rank(); ++i) probes.push_back(Word::letter(i));
  probes.push_back(c);
  for (std::size_t m = 1; m <= builder.plan().intervals.size(); ++m) {
    const Interval e = compute_E_prime(builder.plan(), c, static_cast<int>(m), a);
    const PointSet s = interval_points(e);
    for (const auto& u : probes) {
      const Rational q = folner_ratio(a, s, u);
      r.folner.push_back(FolnerEntry{static_cast<int>(m), u, q});
      const std::int64_t expected = u == probes.front() ? 2 : 0;
      if (!(q == Rational{expected, static_cast<std::int64_t>(m)})) r.folner_ok = false;
    }
  }
  return r;
}

nlohmann::json conditions_to_json(const std::vector<Condition>& conditions, const Alphabet& alphabet) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& cond : conditions) {
    nlohmann::json j{{"kind", to_string(cond.kind)},
                     {"k", cond.k},
                     {"copy", cond.copy},
                     {"discharged", cond.discharged},
                     {"evidence", cond.evidence}};
    if (cond.kind == ConditionKind::Witness) j["word"] = format_word(cond.word, alphabet);
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<Condition> conditions_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  std::vector<Condition> out;
  for (const auto& item : j) {
    Condition cond;
    const auto kind = item.at("kind").get<std::string>();
    if (kind == "PowerMoves") {
      cond.kind = ConditionKind::PowerMoves;
    } else if (kind == "Witness") {
      cond.kind = ConditionKind::Witness;
      cond.word = parse_word(item.at("word").get<std::string>(), alphabet);
    } else if (kind == "FixInterval") {
      cond.kind = ConditionKind::FixInterval;
    } else if (kind == "OrbitOfSize") {
      cond.kind = ConditionKind::OrbitOfSize;
    } else {
      throw PreconditionError("unknown condition kind " + kind);
    }
    cond.k = item.at("k").get<std::int64_t>();
    cond.copy = item.at("copy").get<int>();
    cond.discharged = item.at("discharged").get<bool>();
    cond.evidence = item.at("evidence").get<std::vector<Point>>();
    out.push_back(std::move(cond));
  }
  return out;
}

nlohmann::json report_to_json(const GenericReport& r, const std::vector<Condition>& conditions,
                              const Alphabet& alphabet) {
  nlohmann::json j;
  j["census"] = nlohmann::json::object();
  for (const auto& [size, count] : r.census) j["census"][std::to_string(size)] = count;
  j["witnesses"] = nlohmann::json::array();
  for (const auto& w : r.witnesses) {
    j["witnesses"].push_back({{"word", format_word(w.word, alphabet)}, {"x", w.x}, {"wx", w.wx}});
  }
  j["folner"] = nlohmann::json::array();
  for (const auto& f : r.folner) {
    j["folner"].push_back(
        {{"set_id", f.set_id}, {"word", format_word(f.word, alphabet)}, {"num", f.ratio.num}, {"den", f.ratio.den}});
  }
  j["conditions"] = conditions_to_json(conditions, alphabet);
  j["flags"] = {{"transitive", r.transitive},
                {"witnesses", r.witnesses_ok},
                {"census", r.census_ok},
                {"orbits_finite", r.orbits_finite},
                {"folner", r.folner_ok}};
  return j;
}

std::vector<Word> enumerate_reduced_words(int rank, int max_length) {
  std::vector<Letter> alphabet;
  for (int g = 0; g <= rank; ++g) {
    alphabet.push_back(Letter{g, 1});
    alphabet.push_back(Letter{g, -1});
  }
  std::vector<Word> out;
  std::vector<Word> layer{Word()};
  for (int len = 1; len <= max_length; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      for (const auto& l : alphabet) {
        if (!w.empty() && w.last_applied().cancels(l)) continue;
        Word v = w;
        v.push_applied_after(l);
        next.push_back(std::move(v));
      }
    }
    std::sort(next.begin(), next.end());
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

}  // namespace pinch
