#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "pinch/generic.hpp"

namespace pinch {

/// Explicit alpha-permutations of a few consecutive fresh points.  Placed
/// with |c| + 1 blank points on either side, its effect on the c-orbit
/// census does not depend on where it sits.
struct Gadget {
  std::int64_t points = 0;
  std::vector<std::vector<std::int64_t>> images;  // images[i-1][x] = alpha_i(x)
  Census increment;                               // non-fixed orbits added
};

/// Census increment of g for c, measured on a padded scratch copy.
Census gadget_increment(const Gadget& g, const Word& c);

/// Seeded search for a gadget whose largest orbit has the given size and
/// which adds at most one other orbit, of size 2.  Empty if none turns up
/// on at most `max_points` points.
std::optional<Gadget> find_gadget(const Word& c, int rank, std::int64_t size, std::int64_t max_points = 0);

/// Places g beyond everything reserved.
void place_gadget(GenericBuilder& b, const Gadget& g);

/// find_gadget with a per-size cache.
class GadgetLibrary {
 public:
  GadgetLibrary(Word c, int rank) : c_(std::move(c)), rank_(rank) {}
  const Gadget* for_size(std::int64_t size);

 private:
  Word c_;
  int rank_;
  std::map<std::int64_t, std::optional<Gadget>> cache_;
};

struct BalancePlan {
  std::vector<Gadget> for_g;
  std::vector<Gadget> for_h;
  bool converged = false;
};

/// Chooses gadgets that make both censuses (non-fixed orbits only) equal,
/// fixing the largest differing size first.
BalancePlan plan_balance(Census g_census, Census h_census, GadgetLibrary& g_library, GadgetLibrary& h_library,
                         int max_steps = 100000);

}  // namespace pinch
