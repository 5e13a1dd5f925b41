#include "pinch/pipeline.hpp"

#include "pinch/balance.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace pinch {

namespace {

const char* kRemedy = "; `pinch word autzero` finds an automorphism after which some exponent sum is zero";

Word parse_config_word(const std::string& text, const Alphabet& alphabet, const char* name) {
  try {
    return parse_word(text, alphabet);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  }
}

void check_factor_word(const Word& w, int rank, const char* name) {
  if (w.empty() || !is_cyclically_reduced(w)) throw ConfigError(std::string(name) + " is not cyclically reduced");
  if (!w.contains_alpha()) throw ConfigError(std::string(name) + " lies in <b>" + kRemedy);
  if (exponent_sums(w, kBeta).total != 0) {
    throw ConfigError(std::string(name) + " has nonzero exponent sum in b" + kRemedy);
  }
  if (w.max_generator() > rank) throw ConfigError(std::string(name) + " uses a generator beyond the rank");
}

Word commutator(const Word& u, const Word& v) { return free_reduce(u * v * u.inverse() * v.inverse()); }

template <typename T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

std::vector<Word> witness_words(const Word& c, int rank, const FactorBudgets& b,
                                const std::map<Word, std::int64_t>& demand) {
  std::map<Word, std::int64_t> copies;
  if (b.witness_copies > 0) {
    for (const auto& w : enumerate_reduced_words(rank, b.witness_length)) {
      if (!is_power_of(w, c)) copies[w] = b.witness_copies;
    }
  }
  for (const auto& [w, n] : demand) copies[w] = std::max(copies[w], n);
  // copies of the same word are interleaved so short budgets still cover
  // every word once
  std::vector<Word> out;
  for (std::int64_t round = 0;; ++round) {
    bool any = false;
    for (const auto& [w, n] : copies) {
      if (round < n) {
        out.push_back(w);
        any = true;
      }
    }
    if (!any) break;
  }
  return out;
}

Census moving_census(const ClosedAction& a, const Word& c, const Interval& window) {
  Census census = orbit_census(a, c, window);
  census.erase(1);
  return census;
}

Interval hull(const Interval& x, const Interval& y) { return Interval{std::min(x.lo, y.lo), std::max(x.hi, y.hi)}; }

nlohmann::json amalgam_to_json(const AmalgamWord& w) {
  nlohmann::json syl = nlohmann::json::array();
  for (const auto& s : w.syllables) {
    const bool g = s.factor == Factor::G;
    syl.push_back({{"factor", g ? "G" : "H"}, {"word", format_word(s.word, g ? kAlphabetG : kAlphabetH)}});
  }
  return {{"prefix", w.prefix}, {"syllables", syl}};
}

AmalgamWord amalgam_from_json(const nlohmann::json& j) {
  AmalgamWord w;
  w.prefix = j.at("prefix").get<std::int64_t>();
  for (const auto& s : j.at("syllables")) {
    const bool g = s.at("factor").get<std::string>() == "G";
    w.syllables.push_back(
        Syllable{g ? Factor::G : Factor::H, parse_word(s.at("word").get<std::string>(), g ? kAlphabetG : kAlphabetH)});
  }
  return w;
}

std::string describe(const Census& census) {
  std::ostringstream out;
  for (const auto& [size, count] : census) out << size << ":" << count << " ";
  return out.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Config

void validate_config(const PipelineConfig& config) {
  if (config.rank_g < 1 || config.rank_h < 1) throw ConfigError("ranks must be at least 1");
  check_factor_word(parse_config_word(config.c, kAlphabetG, "c"), config.rank_g, "c");
  check_factor_word(parse_config_word(config.d, kAlphabetH, "d"), config.rank_h, "d");
  const auto& b = config.budgets;
  if (b.powers < 0 || b.witness_length < 0 || b.witness_copies < 0 || b.orbit_sizes < 0 || b.copies < 0 ||
      b.intervals < 0) {
    throw ConfigError("budgets must be nonnegative");
  }
  if (config.amalgam_words < 0) throw ConfigError("amalgam.words must be nonnegative");
  if (config.amalgam_words > 0 && (config.amalgam_pairs < 1 || config.syllable_length < 1)) {
    throw ConfigError("amalgam.pairs and amalgam.syllable_length must be positive");
  }
  for (int k : config.folner_match) {
    if (k < 1 || k > b.intervals) throw ConfigError("folner_match entry " + std::to_string(k) + " has no interval");
  }
  if (config.balance_rounds < 0 || config.margin < 0) throw ConfigError("balance_rounds and margin must be nonnegative");
}

PipelineConfig config_from_json(const nlohmann::json& j) {
  PipelineConfig c;
  try {
    c.rank_g = get_or(j, "rank_g", 1);
    c.rank_h = get_or(j, "rank_h", 1);
    c.c = j.at("c").get<std::string>();
    c.d = j.at("d").get<std::string>();
    if (j.contains("budgets")) {
      const auto& b = j.at("budgets");
      c.budgets.powers = get_or(b, "powers", 0);
      c.budgets.witness_length = get_or(b, "witness_length", 0);
      c.budgets.witness_copies = get_or(b, "witness_copies", 1);
      c.budgets.orbit_sizes = get_or(b, "orbit_sizes", 0);
      c.budgets.copies = get_or(b, "copies", 0);
      c.budgets.intervals = get_or(b, "intervals", 0);
    }
    if (j.contains("amalgam")) {
      const auto& a = j.at("amalgam");
      c.amalgam_words = get_or(a, "words", 0);
      c.amalgam_pairs = get_or(a, "pairs", 2);
      c.syllable_length = get_or(a, "syllable_length", 3);
      c.seed = get_or<std::uint64_t>(a, "seed", 1);
    }
    c.folner_match = get_or(j, "folner_match", std::vector<int>{});
    c.balance_rounds = get_or(j, "balance_rounds", 64);
    c.margin = get_or<std::int64_t>(j, "margin", 64);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate_config(c);
  return c;
}

nlohmann::json config_to_json(const PipelineConfig& c) {
  return {{"rank_g", c.rank_g},
          {"rank_h", c.rank_h},
          {"c", c.c},
          {"d", c.d},
          {"budgets",
           {{"powers", c.budgets.powers},
            {"witness_length", c.budgets.witness_length},
            {"witness_copies", c.budgets.witness_copies},
            {"orbit_sizes", c.budgets.orbit_sizes},
            {"copies", c.budgets.copies},
            {"intervals", c.budgets.intervals}}},
          {"amalgam",
           {{"words", c.amalgam_words},
            {"pairs", c.amalgam_pairs},
            {"syllable_length", c.syllable_length},
            {"seed", c.seed}}},
          {"folner_match", c.folner_match},
          {"balance_rounds", c.balance_rounds},
          {"margin", c.margin}};
}

PipelineConfig surface_preset(int genus) {
  if (genus < 2) throw ConfigError("surface preset needs genus >= 2");
  PipelineConfig config;
  const int g_gens = 2 * genus - 3;  // alphas of the first factor
  Word c;
  for (int i = 1; i <= g_gens; i += 2) {
    const Word u = Word::letter(i);
    const Word v = i + 1 <= g_gens ? Word::letter(i + 1) : Word::letter(kBeta);
    c = free_reduce(c * commutator(u, v));
  }
  const Word d = commutator(Word::letter(1), Word::letter(kBeta)).inverse();
  config.rank_g = g_gens;
  config.rank_h = 1;
  config.c = format_word(c, kAlphabetG);
  config.d = format_word(d, kAlphabetH);
  config.budgets = FactorBudgets{5, 3, 2, 5, 3, 50};
  config.amalgam_words = 100;
  config.amalgam_pairs = 2;
  config.syllable_length = 3;
  config.seed = 1;
  config.folner_match = {10, 50};
  return config;
}

// ---------------------------------------------------------------------------
// Pipeline

bool PipelineResult::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.ok; });
}

std::vector<AmalgamWord> sample_amalgam_words(const PipelineConfig& config) {
  const Word c = parse_word(config.c, kAlphabetG);
  const Word d = parse_word(config.d, kAlphabetH);
  std::vector<Word> g_pool;
  std::vector<Word> h_pool;
  for (auto& w : enumerate_reduced_words(config.rank_g, config.syllable_length)) {
    if (!is_power_of(w, c)) g_pool.push_back(std::move(w));
  }
  for (auto& w : enumerate_reduced_words(config.rank_h, config.syllable_length)) {
    if (!is_power_of(w, d)) h_pool.push_back(std::move(w));
  }
  std::vector<AmalgamWord> out;
  if (config.amalgam_words == 0) return out;
  std::mt19937_64 rng(config.seed);
  std::uniform_int_distribution<std::size_t> pick_g(0, g_pool.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_h(0, h_pool.size() - 1);
  std::uniform_int_distribution<int> pick_n(1, config.amalgam_pairs);
  for (int i = 0; i < config.amalgam_words; ++i) {
    AmalgamWord w;
    const int n = pick_n(rng);
    for (int p = 0; p < n; ++p) {
      w.syllables.push_back(Syllable{Factor::H, h_pool[pick_h(rng)]});
      w.syllables.push_back(Syllable{Factor::G, g_pool[pick_g(rng)]});
    }
    out.push_back(std::move(w));
  }
  return out;
}

FactorPair factor_pair(const PipelineResult& r, const ClosedAction& ga, const ClosedAction& ha) {
  return FactorPair{&ga, &ha, r.g->c(), r.h->c(), r.g->window(), r.h->window()};
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  validate_config(config);
  PipelineResult r;
  r.config = config;
  const Word c = parse_word(config.c, kAlphabetG);
  const Word d = parse_word(config.d, kAlphabetH);

  const auto words = sample_amalgam_words(config);
  std::map<Word, std::int64_t> g_demand;
  std::map<Word, std::int64_t> h_demand;
  for (const auto& w : words) {
    for (const auto& s : w.syllables) ++(s.factor == Factor::G ? g_demand : h_demand)[s.word];
  }

  // G grows upward from +sep, H downward from -sep.
  const auto sep = static_cast<Point>(std::max(c.size(), d.size())) + 1;
  r.g.emplace(c, config.rank_g, sep, Growth::Up);
  r.h.emplace(d, config.rank_h, -sep, Growth::Down);
  const auto& b = config.budgets;
  r.g->run(schedule(c, Budgets{b.powers, witness_words(c, config.rank_g, b, g_demand), b.orbit_sizes, b.copies,
                               b.intervals}));
  r.h->run(schedule(d, Budgets{b.powers, witness_words(d, config.rank_h, b, h_demand), b.orbit_sizes, b.copies,
                               b.intervals}));

  // Stray orbits make the censuses differ; settle them with gadgets whose
  // census increments are known in advance.
  GadgetLibrary g_library(c, config.rank_g);
  GadgetLibrary h_library(d, config.rank_h);
  for (;; ++r.balance_rounds_used) {
    const Census cg = moving_census(r.g->action(), c, r.g->window());
    const Census ch = moving_census(r.h->action(), d, r.h->window());
    if (cg == ch) break;
    if (r.balance_rounds_used >= config.balance_rounds) {
      throw PreconditionError("budget infeasible: orbit censuses still differ after " +
                              std::to_string(config.balance_rounds) + " rounds (G " + describe(cg) + "| H " +
                              describe(ch) + ")");
    }
    const auto plan = plan_balance(cg, ch, g_library, h_library);
    if (!plan.converged) {
      throw PreconditionError("budget infeasible: no gadget combination equalises the censuses (G " + describe(cg) +
                              "| H " + describe(ch) + ")");
    }
    for (const auto& g : plan.for_g) place_gadget(*r.g, g);
    for (const auto& g : plan.for_h) place_gadget(*r.h, g);
  }

  const ClosedAction ga = r.g->action();
  const ClosedAction ha = r.h->action();
  const FactorPair f = factor_pair(r, ga, ha);
  r.sigma = match_orbits_sigma(f);
  for (int k : config.folner_match) {
    const auto a = interval_points(compute_E_prime(r.g->plan(), c, k, ga));
    const auto bk = interval_points(compute_E_prime(r.h->plan(), d, k, ha));
    match_folner_sigma(r.sigma, a, bk, f);
  }
  for (const auto& w : words) r.forced.push_back(ForcedWitness{w, force_amalgam_witness(r.sigma, w, f)});
  r.checks = verify(r);
  return r;
}

std::vector<Check> verify(const PipelineResult& r) {
  std::vector<Check> checks;
  const ClosedAction ga = r.g->action();
  const ClosedAction ha = r.h->action();
  const FactorPair f = factor_pair(r, ga, ha);
  const Interval window = hull(f.g_window, f.h_window);

  const GenericReport gr = make_report(*r.g, kAlphabetG);
  const GenericReport hr = make_report(*r.h, kAlphabetH);
  auto flags = [](const GenericReport& x) {
    std::ostringstream out;
    out << "transitive=" << x.transitive << " witnesses=" << x.witnesses_ok << " census=" << x.census_ok
        << " orbits_finite=" << x.orbits_finite << " folner=" << x.folner_ok;
    return out.str();
  };
  checks.push_back(Check{"g_generic", gr.ok(), flags(gr)});
  checks.push_back(Check{"h_generic", hr.ok(), flags(hr)});

  const auto bad = intertwining_violations(r.sigma, f, window);
  checks.push_back(Check{"intertwining", bad.empty(),
                         std::to_string(bad.size()) + " violations on " + std::to_string(window.size()) + " points"});

  std::int64_t disagree = 0;
  const RawWord cw = embed_factor(Factor::G, f.c);
  const RawWord dw = embed_factor(Factor::H, f.d);
  for (Point x = window.lo; x <= window.hi; ++x) {
    if (evaluate_amalgam(cw, x, r.sigma, f) != evaluate_amalgam(dw, x, r.sigma, f)) ++disagree;
  }
  checks.push_back(Check{"c_equals_d", disagree == 0, std::to_string(disagree) + " points where c and d differ"});

  bool matches_ok = true;
  for (const auto& m : r.sigma.orbit_matches()) {
    Point x = m.c_base;
    Point y = m.d_base;
    for (std::int64_t j = 0; j < m.size; ++j) {
      matches_ok = matches_ok && r.sigma.apply(x) == y;
      x = evaluate(ga, f.c, x);
      y = evaluate(ha, f.d, y);
    }
    matches_ok = matches_ok && x == m.c_base && y == m.d_base;
  }
  checks.push_back(Check{"orbit_matches", matches_ok, std::to_string(r.sigma.orbit_matches().size()) + " matched orbits"});

  std::int64_t forced_bad = 0;
  for (const auto& fw : r.forced) {
    const Point img = evaluate_amalgam(fw.word, fw.result.x0, r.sigma, f);
    const std::set<Point> distinct(fw.result.chain.begin(), fw.result.chain.end());
    if (img == fw.result.x0 || img != fw.result.image || distinct.size() != fw.result.chain.size()) ++forced_bad;
  }
  checks.push_back(Check{"forced_witnesses", forced_bad == 0,
                         std::to_string(r.forced.size() - static_cast<std::size_t>(forced_bad)) + "/" +
                             std::to_string(r.forced.size()) + " words move their x0"});

  bool transfer_ok = true;
  std::ostringstream detail;
  for (int k : r.config.folner_match) {
    const auto a = interval_points(compute_E_prime(r.g->plan(), f.c, k, ga));
    const auto bk = interval_points(compute_E_prime(r.h->plan(), f.d, k, ha));
    PointSet image;
    for (auto x : a) image.insert(r.sigma.apply(x));
    transfer_ok = transfer_ok && image == bk;
    const Rational bound{2, k};
    for (int i = 0; i <= r.g->state().rank(); ++i) {
      transfer_ok = transfer_ok && folner_ratio(ga, a, Word::letter(i)) <= bound;
    }
    for (int i = 0; i <= r.h->state().rank(); ++i) {
      const RawWord hw = embed_factor(Factor::H, Word::letter(i));
      PointSet moved;
      for (auto x : a) moved.insert(evaluate_amalgam(hw, x, r.sigma, f));
      std::int64_t sym = 0;
      for (auto x : a) sym += moved.contains(x) ? 0 : 1;
      for (auto y : moved) sym += a.contains(y) ? 0 : 1;
      const Rational in_h = folner_ratio(ha, bk, Word::letter(i));
      transfer_ok = transfer_ok && Rational{sym, k} <= bound && Rational{sym, k} == in_h;
    }
    detail << "k=" << k << " ";
  }
  checks.push_back(Check{"folner_transfer", transfer_ok, detail.str()});
  return checks;
}

// ---------------------------------------------------------------------------
// Files

nlohmann::json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw PreconditionError("cannot read " + p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(p.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << j.dump(1) << '\n';
  if (!out) throw std::runtime_error("write failed: " + p.string());
}

nlohmann::json factor_snapshot(const GenericBuilder& b, const Alphabet& alphabet) {
  nlohmann::json j = state_to_json(b.state());
  j["c"] = format_word(b.c(), alphabet);
  j["conditions"] = conditions_to_json(b.conditions(), alphabet);
  return j;
}

GenericBuilder factor_from_snapshot(const nlohmann::json& j, const Alphabet& alphabet) {
  try {
    return GenericBuilder(parse_word(j.at("c").get<std::string>(), alphabet), state_from_json(j),
                          conditions_from_json(j.at("conditions"), alphabet));
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("snapshot: ") + e.what());
  }
}

nlohmann::json pipeline_report(const PipelineResult& r) {
  nlohmann::json j;
  j["ok"] = r.ok();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : r.checks) j["checks"].push_back({{"name", c.name}, {"ok", c.ok}, {"detail", c.detail}});
  j["balance_rounds"] = r.balance_rounds_used;
  j["g"] = report_to_json(make_report(*r.g, kAlphabetG), r.g->conditions(), kAlphabetG);
  j["h"] = report_to_json(make_report(*r.h, kAlphabetH), r.h->conditions(), kAlphabetH);
  j["forced"] = nlohmann::json::array();
  for (const auto& fw : r.forced) {
    j["forced"].push_back({{"word", amalgam_to_json(fw.word)},
                           {"text", format_amalgam(fw.word)},
                           {"x0", fw.result.x0},
                           {"image", fw.result.image},
                           {"chain", fw.result.chain}});
  }
  return j;
}

void write_outputs(const PipelineResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_json_file(dir / "config.json", config_to_json(r.config));
  write_json_file(dir / "g_action.json", factor_snapshot(*r.g, kAlphabetG));
  write_json_file(dir / "h_action.json", factor_snapshot(*r.h, kAlphabetH));
  write_json_file(dir / "sigma.json", sigma_to_json(r.sigma));
  write_json_file(dir / "report.json", pipeline_report(r));
}

PipelineResult load_outputs(const std::filesystem::path& dir) {
  PipelineResult r;
  r.config = config_from_json(read_json_file(dir / "config.json"));
  r.g.emplace(factor_from_snapshot(read_json_file(dir / "g_action.json"), kAlphabetG));
  r.h.emplace(factor_from_snapshot(read_json_file(dir / "h_action.json"), kAlphabetH));
  r.sigma = sigma_from_json(read_json_file(dir / "sigma.json"));
  const auto report = read_json_file(dir / "report.json");
  try {
    r.balance_rounds_used = report.at("balance_rounds").get<int>();
    for (const auto& c : report.at("checks")) {
      r.checks.push_back(Check{c.at("name").get<std::string>(), c.at("ok").get<bool>(), c.at("detail").get<std::string>()});
    }
    for (const auto& fw : report.at("forced")) {
      r.forced.push_back(ForcedWitness{amalgam_from_json(fw.at("word")),
                                       ForceResult{fw.at("x0").get<Point>(), fw.at("image").get<Point>(),
                                                   fw.at("chain").get<std::vector<Point>>()}});
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("report.json: ") + e.what());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Export

namespace {

LabeledGraph schreier_graph(const ActionState& state, bool explicit_beta) {
  const auto& reserved = state.reserved();
  const Interval window = reserved.empty() ? Interval{state.origin() - 1, state.origin() + 1}
                                           : Interval{*reserved.begin(), *reserved.rbegin()};
  const ClosedAction a = close(state);
  LabeledGraph g;
  for (Point x = window.lo; x <= window.hi; ++x) g.add_vertex(x);
  for (int i = 1; i <= a.rank(); ++i) {
    for (const auto& [x, y] : a.alpha(i).moved()) g.add_edge(x, y, i);
  }
  if (explicit_beta || reserved.empty()) {
    for (Point x = window.lo; x < window.hi; ++x) g.add_edge(x, x + 1, kBeta);
  }
  return g;
}

}  // namespace

std::string export_dot(const ActionState& state, bool explicit_beta, const Alphabet& alphabet) {
  return to_dot(schreier_graph(state, explicit_beta), alphabet);
}

nlohmann::json export_json(const ActionState& state, bool explicit_beta, const Alphabet& alphabet) {
  return {{"graph", to_json(schreier_graph(state, explicit_beta), alphabet)}, {"snapshot", state_to_json(state)}};
}

}  // namespace pinch
