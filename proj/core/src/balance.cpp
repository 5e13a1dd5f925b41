#include "pinch/balance.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

namespace pinch {

namespace {

std::int64_t padding(const Word& c) { return static_cast<std::int64_t>(c.size()) + 1; }

std::int64_t count_at(const Census& c, std::int64_t size) {
  auto it = c.find(size);
  return it == c.end() ? 0 : it->second;
}

// 0 for a single orbit, 1 for one extra 2-orbit, -1 if unusable.
int score(const Census& inc, std::int64_t size) {
  if (inc.empty() || inc.rbegin()->first != size) return -1;
  if (size == 2) return inc.at(2) <= 2 ? static_cast<int>(inc.at(2)) - 1 : -1;
  if (inc.at(size) != 1) return -1;
  if (inc.size() == 1) return 0;
  return inc.size() == 2 && count_at(inc, 2) == 1 ? 1 : -1;
}

}  // namespace

Census gadget_increment(const Gadget& g, const Word& c) {
  std::vector<FinitePermutation> alphas(g.images.size());
  for (std::size_t i = 0; i < g.images.size(); ++i) {
    for (std::int64_t x = 0; x < g.points; ++x) alphas[i].set(x, g.images[i][static_cast<std::size_t>(x)]);
  }
  const std::int64_t pad = padding(c);
  Census census = orbit_census(ClosedAction(std::move(alphas)), c, Interval{-pad, g.points - 1 + pad});
  census.erase(1);
  return census;
}

std::optional<Gadget> find_gadget(const Word& c, int rank, std::int64_t size, std::int64_t max_points) {
  std::vector<int> gens;
  for (const auto& l : c.letters()) {
    if (!l.is_beta() && std::find(gens.begin(), gens.end(), l.gen) == gens.end()) gens.push_back(l.gen);
  }
  if (gens.empty() || size < 2) return std::nullopt;
  if (max_points <= 0) max_points = 3 * size + 8;

  std::mt19937_64 rng(static_cast<std::uint64_t>(size));
  std::optional<Gadget> best;
  int best_score = 2;
  constexpr int kTries = 64;
  for (std::int64_t n = 2; n <= max_points; ++n) {
    for (int t = 0; t < kTries; ++t) {
      Gadget g;
      g.points = n;
      g.images.assign(static_cast<std::size_t>(rank), std::vector<std::int64_t>(static_cast<std::size_t>(n)));
      for (int i = 1; i <= rank; ++i) {
        auto& img = g.images[static_cast<std::size_t>(i - 1)];
        std::iota(img.begin(), img.end(), 0);
        if (std::find(gens.begin(), gens.end(), i) == gens.end()) continue;
        if (i == gens.front() && t % 2 == 1) {
          std::uniform_int_distribution<std::size_t> pick(0, img.size() - 1);
          for (int k = 0; k < 2; ++k) std::swap(img[pick(rng)], img[pick(rng)]);
        } else {
          std::shuffle(img.begin(), img.end(), rng);
        }
      }
      g.increment = gadget_increment(g, c);
      const int s = score(g.increment, size);
      if (s >= 0 && s < best_score) {
        best = std::move(g);
        best_score = s;
        if (s == 0) return best;
      }
    }
    if (best) return best;
  }
  return best;
}

void place_gadget(GenericBuilder& b, const Gadget& g) {
  ActionState& s = b.mutable_state();
  const std::int64_t pad = padding(b.c());
  const Interval block = s.allocate(g.points - 1 + 2 * pad);
  const Point base = block.lo + pad;
  for (std::size_t i = 0; i < g.images.size(); ++i) {
    for (std::int64_t x = 0; x < g.points; ++x) {
      const auto y = g.images[i][static_cast<std::size_t>(x)];
      if (y != x) s.add_alpha_edge(static_cast<int>(i + 1), base + x, base + y, "gadget");
    }
  }
}

const Gadget* GadgetLibrary::for_size(std::int64_t size) {
  auto it = cache_.find(size);
  if (it == cache_.end()) it = cache_.emplace(size, find_gadget(c_, rank_, size)).first;
  return it->second ? &*it->second : nullptr;
}

BalancePlan plan_balance(Census g_census, Census h_census, GadgetLibrary& g_library, GadgetLibrary& h_library,
                         int max_steps) {
  g_census.erase(1);
  h_census.erase(1);
  BalancePlan plan;
  for (int step = 0; step < max_steps; ++step) {
    std::set<std::int64_t> sizes;
    for (const auto& [k, n] : g_census) sizes.insert(k);
    for (const auto& [k, n] : h_census) sizes.insert(k);
    std::int64_t s = 0;
    for (auto it = sizes.rbegin(); it != sizes.rend(); ++it) {
      if (count_at(g_census, *it) != count_at(h_census, *it)) {
        s = *it;
        break;
      }
    }
    if (s == 0) {
      plan.converged = true;
      return plan;
    }
    const bool g_short = count_at(g_census, s) < count_at(h_census, s);
    const Gadget* g = (g_short ? g_library : h_library).for_size(s);
    if (!g) return plan;
    for (const auto& [k, n] : g->increment) (g_short ? g_census : h_census)[k] += n;
    (g_short ? plan.for_g : plan.for_h).push_back(*g);
  }
  return plan;
}

}  // namespace pinch
