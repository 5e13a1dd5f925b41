// Acceptance suite: one PASS/FAIL line per criterion.
//
//   pinch_acceptance [--only N]... [--expect-fail N]... [--workdir DIR]
//
// Exit status is 0 when every criterion matches its expectation.  A criterion
// listed under --expect-fail that passes counts as a mismatch (XPASS).

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "pinch/pipeline.hpp"

using namespace pinch;

namespace {

// Wall-clock limits for the timed criteria, in seconds.
constexpr double kWordEngineLimit = 30.0;
constexpr double kGenericStageLimit = 60.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

Word W(const char* text) { return parse_word(text); }

std::vector<Word> reduced_words(int rank, int max_length) { return enumerate_reduced_words(rank, max_length); }

// ---------------------------------------------------------------------------

Outcome word_engine() {
  const auto t0 = Clock::now();
  std::int64_t words = 0;
  std::int64_t bad = 0;
  auto check_one = [&](const oracle::Letters& l, const oracle::Letters& partner) {
    ++words;
    const Word w(l);
    const auto r = free_reduce(w);
    if (oracle::letters_of(r) != oracle::reduce(l)) ++bad;
    const auto cr = cyclic_reduce(w);
    if (oracle::letters_of(cr.core) != oracle::cyclic_core(l)) ++bad;
    if (free_reduce(cr.conjugator * cr.core * cr.conjugator.inverse()) != r) ++bad;
    if (cyclic_conjugacy_check(w, Word(partner)) != oracle::conjugate(l, partner)) ++bad;
  };

  // every word of length <= 8, paired with a rotation of itself and with a
  // one-letter mutation
  const auto letters = oracle::alphabet(2);
  for (std::size_t n = 0; n <= 8; ++n) {
    oracle::for_each_word(2, n, [&](const oracle::Letters& l) {
      oracle::Letters rot(l);
      if (!rot.empty()) std::rotate(rot.begin(), rot.begin() + static_cast<std::ptrdiff_t>(rot.size() / 2), rot.end());
      check_one(l, rot);
      if (!l.empty()) {
        oracle::Letters mut(l);
        mut[n / 2] = letters[(static_cast<std::size_t>(mut[n / 2].gen) * 2 + (mut[n / 2].sign > 0 ? 0 : 1) + 1) % 6];
        if (cyclic_conjugacy_check(Word(l), Word(mut)) != oracle::conjugate(l, mut)) ++bad;
      }
    });
  }
  // every pair of words of length <= 3
  std::vector<oracle::Letters> small;
  for (std::size_t n = 0; n <= 3; ++n) oracle::for_each_word(2, n, [&](const oracle::Letters& l) { small.push_back(l); });
  for (const auto& u : small) {
    for (const auto& v : small) {
      if (cyclic_conjugacy_check(Word(u), Word(v)) != oracle::conjugate(u, v)) ++bad;
    }
  }
  std::mt19937 rng(1001);
  for (int t = 0; t < 10000; ++t) {
    const auto l = oracle::random_letters(rng, 2, rng() % 31);
    const auto g = oracle::random_letters(rng, 2, rng() % 8);
    const auto conj = oracle::product(oracle::product(g, l), oracle::inverse(g));
    check_one(l, conj);
    const auto other = oracle::random_letters(rng, 2, rng() % 31);
    if (cyclic_conjugacy_check(Word(l), Word(other)) != oracle::conjugate(l, other)) ++bad;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << words << " words, " << bad << " disagreements, " << secs << " s (limit " << kWordEngineLimit << " s)";
  return {bad == 0 && secs < kWordEngineLimit, d.str()};
}

// ---------------------------------------------------------------------------

std::optional<std::int64_t> beta_exponent(const Word& w) {
  if (!in_beta_subgroup(w)) return std::nullopt;
  return exponent_sums(w, kBeta).total;
}

Outcome commuting_conjugates() {
  std::vector<Word> gammas;
  std::vector<Word> ws;
  for (const auto& w : reduced_words(2, 4)) {
    ws.push_back(w);
    if (w.contains_alpha()) gammas.push_back(w);
  }
  std::int64_t instances = 0;
  std::int64_t literal_bad = 0;
  std::int64_t literal_inverse = 0;
  std::int64_t element_instances = 0;
  std::int64_t element_bad = 0;
  std::string first;
  for (const auto& gamma : gammas) {
    for (int l = -2; l <= 2; ++l) {
      const Word lambda = Word::beta_power(l);
      const Word c = gamma * lambda;
      if (!is_reduced(c)) continue;
      // conjugation keeps the cyclic core, so the rotation test does not
      // depend on w
      const auto core = oracle::letters_of(cyclic_reduce(c).core);
      const auto bound = static_cast<std::int64_t>(core.size() + gamma.size()) + 2;
      bool rot_same = false;
      bool rot_inverse = false;
      for (std::int64_t k = -bound; k <= bound; ++k) {
        const Word lp = Word::beta_power(k);
        rot_same = rot_same || oracle::is_rotation(core, oracle::letters_of(free_reduce(gamma * lp)));
        rot_inverse = rot_inverse || oracle::is_rotation(core, oracle::letters_of(free_reduce(gamma.inverse() * lp)));
      }
      for (const auto& w : ws) {
        const Word conj = free_reduce(w.inverse() * c * w);
        const bool commute = free_reduce(w * c) == free_reduce(c * w);
        if (rot_same) {
          ++instances;
          if (!commute) {
            ++literal_bad;
            if (first.empty()) {
              first = "gamma=" + format_word(gamma) + " lambda=" + format_word(lambda) + " w=" + format_word(w);
            }
          }
        }
        if (rot_inverse) ++literal_inverse;
        // equality of elements rather than of cyclic words
        if (beta_exponent(free_reduce(gamma.inverse() * conj))) {
          ++element_instances;
          if (!commute) ++element_bad;
        }
        if (beta_exponent(free_reduce(gamma * conj))) ++element_bad;
      }
    }
  }
  std::ostringstream d;
  d << "cyclic-rotation reading: " << literal_bad << "/" << instances << " instances fail to commute";
  if (!first.empty()) d << " (first: " << first << ")";
  d << ", " << literal_inverse << " inverse rotations; element reading: " << element_bad << " counterexamples in "
    << element_instances << " instances";
  return {literal_bad == 0 && literal_inverse == 0, d.str()};
}

// ---------------------------------------------------------------------------

Outcome embeddings() {
  std::mt19937 rng(1003);
  ActionState s(2);
  struct Case {
    Word c;
    Word w;
    PathEmbedding path;
    Point base;
    Point witness;
  };
  std::vector<Case> cases;
  while (cases.size() < 200) {
    const Word c(oracle::random_reduced(rng, 2, 2 + rng() % 7));
    const Word w(oracle::random_reduced(rng, 2, 1 + rng() % 8));
    if (!is_cyclically_reduced(c) || !c.contains_alpha() || exponent_sums(c, kBeta).total != 0 || is_power_of(w, c)) {
      continue;
    }
    Case k{c, w, embed_path(s, w), embed_cycle(s, c), embed_Q_witness(s, c, w)};
    cases.push_back(k);
  }
  const auto a = close(s);
  int ok = 0;
  for (const auto& k : cases) {
    const Point wx = evaluate(a, k.w, k.witness);
    const bool good = evaluate(a, k.w, k.path.start) == k.path.end && evaluate(a, k.c, k.base) == k.base &&
                      evaluate(a, k.c, k.witness) == k.witness && evaluate(a, k.c, wx) == wx && wx != k.witness;
    ok += good ? 1 : 0;
  }
  return {ok == 200 && s.check_well_labeled(), std::to_string(ok) + "/200 pairs"};
}

// ---------------------------------------------------------------------------

Outcome generic_stage() {
  const auto t0 = Clock::now();
  const Word c = W("a1 b a1^-1 b^-1");
  Budgets b;
  b.powers = 5;
  for (const auto& w : reduced_words(2, 4)) {
    if (!is_power_of(w, c)) b.witness_words.push_back(w);
  }
  b.orbit_sizes = 5;
  b.copies = 3;
  b.intervals = 50;
  const auto builder = build_generic_action(c, 2, schedule(c, b));
  const auto a = builder.action();
  const auto window = builder.window();

  bool census_ok = true;
  const auto census = orbit_census(a, c, window);
  for (std::int64_t m = 1; m <= 5; ++m) census_ok = census_ok && census.contains(m) && census.at(m) >= 3;

  std::set<Word> moved;
  for (const auto& cond : builder.conditions()) {
    if (cond.kind != ConditionKind::Witness) continue;
    const Point x = cond.evidence.at(0);
    if (evaluate(a, cond.word, x) != x) moved.insert(cond.word);
  }
  const bool witnesses_ok = moved.size() == b.witness_words.size();

  const bool finite = all_orbits_finite(a, c, window);

  bool e_ok = true;
  for (int m = 1; m <= 50; ++m) {
    const auto e = compute_E_m(builder.plan(), c, m, a);
    e_ok = e_ok && e.size() >= m;
    for (Point x = e.lo; x <= e.hi; ++x) e_ok = e_ok && evaluate(a, c, x) == x;
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << "census=" << census_ok << " witnesses " << moved.size() << "/" << b.witness_words.size()
    << " finite=" << finite << " E_m=" << e_ok << ", " << secs << " s (limit " << kGenericStageLimit << " s)";
  return {census_ok && witnesses_ok && finite && e_ok && secs < kGenericStageLimit, d.str()};
}

// ---------------------------------------------------------------------------

Outcome folner_ratios() {
  const Word c = W("a1 b a1^-1 b^-1");
  Budgets b;
  b.intervals = 100;
  const auto builder = build_generic_action(c, 2, schedule(c, b));
  const auto a = builder.action();
  bool ok = true;
  std::ostringstream d;
  Rational previous{1, 1};
  for (int k : {10, 20, 50, 100}) {
    const auto set = interval_points(compute_E_prime(builder.plan(), c, k, a));
    ok = ok && static_cast<int>(set.size()) == k;
    for (int i = 1; i <= 2; ++i) ok = ok && folner_ratio(a, set, Word::letter(i)) == Rational{0, 1};
    const auto r = folner_ratio(a, set, Word::letter(kBeta));
    ok = ok && r == Rational{2, k} && r <= previous && !(r == previous);
    previous = r;
    d << "k=" << k << ":" << r.num << "/" << r.den << " ";
  }
  return {ok, d.str()};
}

// ---------------------------------------------------------------------------

struct Preset {
  PipelineResult r;
  ClosedAction ga;
  ClosedAction ha;
  FactorPair f;
  Interval window;
};

const Preset& genus_two() {
  static const Preset p = [] {
    Preset out{run_pipeline(surface_preset(2)), {}, {}, {}, {}};
    out.ga = out.r.g->action();
    out.ha = out.r.h->action();
    out.f = factor_pair(out.r, out.ga, out.ha);
    const auto margin = out.r.config.margin;
    out.window = Interval{std::min(out.f.g_window.lo, out.f.h_window.lo) - margin,
                          std::max(out.f.g_window.hi, out.f.h_window.hi) + margin};
    return out;
  }();
  return p;
}

Outcome intertwiner() {
  const auto& p = genus_two();
  const auto bad = intertwining_violations(p.r.sigma, p.f, p.window);
  const RawWord cw = embed_factor(Factor::G, p.f.c);
  const RawWord dw = embed_factor(Factor::H, p.f.d);
  std::int64_t differ = 0;
  for (Point x = p.window.lo; x <= p.window.hi; ++x) {
    if (evaluate_amalgam(cw, x, p.r.sigma, p.f) != evaluate_amalgam(dw, x, p.r.sigma, p.f)) ++differ;
  }
  std::ostringstream d;
  d << bad.size() << " intertwining violations, " << differ << " points with c != d, window " << p.window.size();
  return {bad.empty() && differ == 0, d.str()};
}

Outcome amalgam_witnesses() {
  const auto& p = genus_two();
  std::size_t ok = 0;
  for (const auto& fw : p.r.forced) {
    const auto n = static_cast<std::size_t>(fw.word.syllables.size() / 2);
    const std::set<Point> distinct(fw.result.chain.begin(), fw.result.chain.end());
    const Point img = evaluate_amalgam(fw.word, fw.result.x0, p.r.sigma, p.f);
    if (img != fw.result.x0 && distinct.size() == fw.result.chain.size() && distinct.size() >= 4 * n) ++ok;
  }
  std::ostringstream d;
  d << ok << "/" << p.r.forced.size() << " sampled words (<= 2 pairs, syllables of length <= 3)";
  return {ok == p.r.forced.size() && !p.r.forced.empty(), d.str()};
}

Outcome folner_transfer() {
  const auto& p = genus_two();
  bool ok = true;
  std::ostringstream d;
  for (int k : p.r.config.folner_match) {
    const auto a = interval_points(compute_E_prime(p.r.g->plan(), p.f.c, k, p.ga));
    const auto b = interval_points(compute_E_prime(p.r.h->plan(), p.f.d, k, p.ha));
    const Rational bound{2, k};
    Rational worst{0, 1};
    for (int i = 0; i <= p.r.g->state().rank(); ++i) {
      const auto r = folner_ratio(p.ga, a, Word::letter(i));
      ok = ok && r <= bound;
      if (worst <= r) worst = r;
    }
    PointSet sa;
    for (auto x : a) sa.insert(p.r.sigma.apply(x));
    ok = ok && sa == b;
    for (int i = 0; i <= p.r.h->state().rank(); ++i) {
      // |A - u A| with u acting through sigma, then |sigma A - h sigma A|
      const RawWord hw = embed_factor(Factor::H, Word::letter(i));
      PointSet ua;
      for (auto x : a) ua.insert(evaluate_amalgam(hw, x, p.r.sigma, p.f));
      PointSet hsa;
      for (auto y : sa) hsa.insert(p.ha.apply(Letter{i, 1}, y));
      std::vector<Point> diff_a;
      std::set_symmetric_difference(a.begin(), a.end(), ua.begin(), ua.end(), std::back_inserter(diff_a));
      std::vector<Point> diff_s;
      std::set_symmetric_difference(sa.begin(), sa.end(), hsa.begin(), hsa.end(), std::back_inserter(diff_s));
      const auto in_h = folner_ratio(p.ha, b, Word::letter(i));
      const Rational r{static_cast<std::int64_t>(diff_a.size()), k};
      ok = ok && r <= bound && diff_a.size() == diff_s.size() && Rational{static_cast<std::int64_t>(diff_s.size()), k} == in_h;
      if (worst <= r) worst = r;
    }
    d << "k=" << k << " worst " << worst.num << "/" << worst.den << " ";
  }
  return {ok && !p.r.config.folner_match.empty(), d.str()};
}

// ---------------------------------------------------------------------------

Outcome bezout() {
  std::mt19937 rng(1009);
  std::uniform_int_distribution<int> entry(-20, 19);
  int ok = 0;
  for (int t = 0; t < 1000; ++t) {
    const int n = 2 + static_cast<int>(rng() % 4);
    std::vector<std::int64_t> sums(static_cast<std::size_t>(n));
    for (auto& s : sums) {
      const int e = entry(rng);
      s = e >= 0 ? e + 1 : e;
    }
    // generator powers in a shuffled order
    std::vector<int> order(static_cast<std::size_t>(n));
    for (int g = 0; g < n; ++g) order[static_cast<std::size_t>(g)] = g;
    std::shuffle(order.begin(), order.end(), rng);
    Word c;
    for (int g : order) c = power(Word::letter(g), sums[static_cast<std::size_t>(g)]) * c;
    const auto z = zero_sum_automorphism(sums, c);
    const auto image_sums = abelianize(z.image, n);
    const auto det = determinant(z.matrix);
    const bool good = (det == 1 || det == -1) && image_sums[static_cast<std::size_t>(z.witness)] == 0 &&
                      multiply(z.matrix, sums) == image_sums &&
                      abelianize(apply_moves(z.moves, c, n), n) == multiply(abelianized_matrix(z.moves, n), sums) &&
                      apply_moves(z.moves, c, n) == z.image;
    ok += good ? 1 : 0;
  }
  return {ok == 1000, std::to_string(ok) + "/1000 vectors"};
}

// ---------------------------------------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

bool same_files(const std::filesystem::path& x, const std::filesystem::path& y) {
  for (const char* name : {"config.json", "g_action.json", "h_action.json", "sigma.json", "report.json"}) {
    if (slurp(x / name) != slurp(y / name)) return false;
  }
  return true;
}

Outcome persistence(const std::filesystem::path& workdir) {
  const auto config = surface_preset(2);
  const auto one = workdir / "run1";
  const auto two = workdir / "run2";
  const auto again = workdir / "reloaded";
  for (const auto& d : {one, two, again}) std::filesystem::remove_all(d);
  write_outputs(run_pipeline(config), one);
  write_outputs(run_pipeline(config), two);
  const bool identical = same_files(one, two);
  const auto loaded = load_outputs(one);
  write_outputs(loaded, again);
  const bool roundtrip = same_files(one, again);
  bool checks = true;
  for (const auto& c : verify(loaded)) checks = checks && c.ok;
  std::ostringstream d;
  d << "identical runs=" << identical << " load-save identity=" << roundtrip << " reloaded checks=" << checks;
  return {identical && roundtrip && checks, d.str()};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  std::vector<int> expect_fail;
  std::string workdir = (std::filesystem::temp_directory_path() / "pinch-acceptance").string();
  app.add_option("--only", only, "run only these criteria");
  app.add_option("--expect-fail", expect_fail, "criteria known to fail");
  app.add_option("--workdir", workdir, "scratch directory for snapshots");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"word engine matches naive oracles", word_engine},
      {"conjugates of gamma*lambda commute, exhaustive", commuting_conjugates},
      {"path, cycle and witness embeddings", embeddings},
      {"generic stage for the commutator", generic_stage},
      {"Folner ratios 2/k", folner_ratios},
      {"intertwiner exactness, genus 2", intertwiner},
      {"forced amalgam witnesses", amalgam_witnesses},
      {"Folner transfer through sigma", folner_transfer},
      {"zero-sum automorphisms", bezout},
      {"determinism and persistence", [&] { return persistence(workdir); }},
  };

  const std::set<int> selected(only.begin(), only.end());
  const std::set<int> expected(expect_fail.begin(), expect_fail.end());
  int mismatches = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.contains(id)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool xfail = expected.contains(id);
    if (o.pass == xfail) ++mismatches;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL");
    if (xfail) std::cout << (o.pass ? " (unexpected pass)" : " (expected)");
    std::cout << "  " << criteria[i].first << " | " << o.detail << std::endl;
  }
  std::filesystem::remove_all(workdir);
  return mismatches == 0 ? 0 : 1;
}
