#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinch/extension.hpp"
#include "pinch/word.hpp"

namespace pinch {

struct FolnerPlan {
  std::vector<Interval> intervals;  // intervals[m-1] is A_m
  std::int64_t s_plus = 0;
};

/// Places `count` consecutive disjoint intervals with |A_m| = m + 2 S+_c(beta)
/// beyond everything reserved in `state`, and reserves them.
FolnerPlan plan_folner_intervals(ActionState& state, const Word& c, int count);

/// E_m as an interval: the points x with x + P in A_m for every prefix sum P
/// of the beta-exponents of c read left to right.  Throws if A_m is not
/// fixed pointwise by every alpha.
Interval compute_E_m(const FolnerPlan& plan, const Word& c, int m, const ClosedAction& a);
/// The first m points of E_m.
Interval compute_E_prime(const FolnerPlan& plan, const Word& c, int m, const ClosedAction& a);

enum class ConditionKind { PowerMoves, Witness, FixInterval, OrbitOfSize };
std::string to_string(ConditionKind kind);

struct Condition {
  ConditionKind kind = ConditionKind::PowerMoves;
  std::int64_t k = 0;  // power, interval index or orbit size
  int copy = 0;        // OrbitOfSize copy number
  Word word;           // Witness only
  bool discharged = false;
  std::vector<Point> evidence;
};

struct Budgets {
  int powers = 0;
  std::vector<Word> witness_words;  // repeats ask for further witnesses
  int orbit_sizes = 0;
  int copies = 0;
  int intervals = 0;
};

/// FixInterval conditions first, then PowerMoves / Witness / OrbitOfSize
/// interleaved by index.
std::vector<Condition> schedule(const Word& c, const Budgets& budgets);

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Rational& x, const Rational& y) { return x.num * y.den == y.num * x.den; }
  friend bool operator<=(const Rational& x, const Rational& y) { return x.num * y.den <= y.num * x.den; }
};

using Census = std::map<std::int64_t, std::int64_t>;

/// Counts <c>-orbits contained in the window, by size.
Census orbit_census(const ClosedAction& a, const Word& c, const Interval& window);
/// Every point of the window returns to itself under c within |window| steps.
bool all_orbits_finite(const ClosedAction& a, const Word& c, const Interval& window);
Rational folner_ratio(const ClosedAction& a, const PointSet& s, const Word& w);
bool verify_subgroup_transitive(const ClosedAction& a, const std::vector<Word>& gens, const Interval& window,
                                std::int64_t margin = 64);
PointSet interval_points(const Interval& i);

struct WitnessEntry {
  Word word;
  Point x = 0;
  Point wx = 0;
};

struct FolnerEntry {
  int set_id = 0;
  Word word;
  Rational ratio;
};

struct GenericReport {
  Census census;
  std::vector<WitnessEntry> witnesses;
  std::vector<FolnerEntry> folner;
  bool transitive = false;
  bool witnesses_ok = false;
  bool census_ok = false;
  bool orbits_finite = false;
  bool folner_ok = false;
  bool ok() const { return transitive && witnesses_ok && census_ok && orbits_finite && folner_ok; }
};

/// Stateful forcing of one factor action.
class GenericBuilder {
 public:
  GenericBuilder(Word c, int rank, Point origin = 0, Growth growth = Growth::Up);
  /// Restarts from a stored state; the plan is re-read from FixInterval
  /// conditions.
  GenericBuilder(Word c, ActionState state, std::vector<Condition> conditions);

  void discharge(Condition& cond);
  /// Discharges and appends every condition, in order.
  void run(std::vector<Condition> conditions);

  const Word& c() const { return c_; }
  const ActionState& state() const { return state_; }
  const FolnerPlan& plan() const { return plan_; }
  const std::vector<Condition>& conditions() const { return conditions_; }
  ClosedAction action() const { return close(state_); }
  ActionState& mutable_state() { return state_; }
  /// Appends an already discharged condition.
  void record(Condition cond) { conditions_.push_back(std::move(cond)); }
  /// Reserved hull widened by |c|; holds every non-fixed c-orbit.
  Interval window() const;

 private:
  Word c_;
  ActionState state_;
  FolnerPlan plan_;
  std::vector<Condition> conditions_;
};

/// Convenience wrapper over GenericBuilder.
GenericBuilder build_generic_action(const Word& c, int rank, const std::vector<Condition>& conditions,
                                    Point origin = 0, Growth growth = Growth::Up);

GenericReport make_report(const GenericBuilder& builder, const Alphabet& alphabet = {});
nlohmann::json report_to_json(const GenericReport& r, const std::vector<Condition>& conditions,
                              const Alphabet& alphabet = {});
nlohmann::json conditions_to_json(const std::vector<Condition>& conditions, const Alphabet& alphabet = {});
std::vector<Condition> conditions_from_json(const nlohmann::json& j, const Alphabet& alphabet = {});

/// Reduced words of length 1..max_length over beta, alpha_1..alpha_rank, in
/// shortlex order.
std::vector<Word> enumerate_reduced_words(int rank, int max_length);

}  // namespace pinch
