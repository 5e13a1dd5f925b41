#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "pinch/graph.hpp"
#include "pinch/word.hpp"

namespace pinch {

using Point = std::int64_t;
using PointSet = std::set<Point>;

struct Interval {
  Point lo = 0;
  Point hi = -1;  // inclusive; empty when hi < lo
  std::int64_t size() const { return hi < lo ? 0 : hi - lo + 1; }
  bool contains(Point x) const { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite partial injection of the integers.
class PartialInjection {
 public:
  std::optional<Point> image(Point x) const;
  std::optional<Point> preimage(Point y) const;
  bool has_image(Point x) const { return fwd_.contains(x); }
  bool has_preimage(Point y) const { return bwd_.contains(y); }
  /// Throws std::logic_error if the pair would break injectivity or
  /// touch an existing assignment, even with the same value.
  void assign(Point x, Point y);
  const std::map<Point, Point>& pairs() const { return fwd_; }
  std::size_t size() const { return fwd_.size(); }
  bool empty() const { return fwd_.empty(); }

  /// Maximal open chains x_0 -> x_1 -> ... -> x_k (x_0 has no preimage).
  std::vector<std::vector<Point>> chains() const;
  /// Closed cycles, each listed from its least element.
  std::vector<std::vector<Point>> cycles() const;

  friend bool operator==(const PartialInjection&, const PartialInjection&) = default;

 private:
  std::map<Point, Point> fwd_;
  std::map<Point, Point> bwd_;
};

/// Permutation of the integers that is the identity off a finite set.
class FinitePermutation {
 public:
  Point apply(Point x) const;
  Point apply_inverse(Point y) const;
  /// Stores only moved points.  The caller keeps the map bijective.
  void set(Point x, Point y);
  /// x -> y, and the old preimage of y takes over the old image of x.
  void rewire(Point x, Point y);
  const std::map<Point, Point>& moved() const { return fwd_; }
  std::vector<std::vector<Point>> cycles() const;
  friend bool operator==(const FinitePermutation&, const FinitePermutation&) = default;

 private:
  std::map<Point, Point> fwd_;
  std::map<Point, Point> bwd_;
};

enum class Growth { Up, Down };

struct LogEntry {
  std::string op;
  int gen = 0;
  Point src = 0;
  Point dst = 0;
  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

/// Monotone partial assignment of alpha-edges over the shift pre-graph.
/// Fresh points are allocated in blocks beyond a moving frontier, upward or
/// downward from the origin.
class ActionState {
 public:
  static constexpr std::int64_t kGap = 1;

  explicit ActionState(int rank, Point origin = 0, Growth growth = Growth::Up);

  int rank() const { return rank_; }
  Point origin() const { return origin_; }
  Growth growth() const { return growth_; }
  /// Next block starts here (Up) or ends here (Down).
  Point frontier() const { return frontier_; }
  const PartialInjection& alpha(int i) const;
  const PointSet& reserved() const { return reserved_; }
  const std::vector<LogEntry>& log() const { return log_; }

  /// Fresh block of length+1 consecutive points avoiding reserved points and
  /// `forbidden`; the block is reserved.
  Interval allocate(std::int64_t length, const PointSet& forbidden = {});
  void reserve(const Interval& block);
  /// Adds alpha_gen^{+1}: src -> dst.  Existing edges are never changed.
  void add_alpha_edge(int gen, Point src, Point dst, const std::string& op);
  /// Convenience: a log marker with no edge (op records the step).
  void note(const std::string& op);

  bool check_well_labeled() const;
  /// Replays the log and compares with the current assignment.
  bool audit_log() const;

  friend bool operator==(const ActionState&, const ActionState&) = default;

  // snapshot support
  static ActionState restore(int rank, Point origin, Growth growth, Point frontier,
                             std::vector<PartialInjection> alphas, PointSet reserved,
                             std::vector<LogEntry> log);

 private:
  int rank_;
  Point origin_;
  Growth growth_;
  Point frontier_;
  std::vector<PartialInjection> alphas_;
  PointSet reserved_;
  std::vector<LogEntry> log_;
};

/// Every alpha_i a finitely supported permutation; beta is x -> x+1.
class ClosedAction {
 public:
  ClosedAction() = default;
  explicit ClosedAction(std::vector<FinitePermutation> alphas) : alphas_(std::move(alphas)) {}

  int rank() const { return static_cast<int>(alphas_.size()); }
  const FinitePermutation& alpha(int i) const { return alphas_.at(static_cast<std::size_t>(i - 1)); }
  Point apply(Letter l, Point x) const;
  /// Smallest interval containing every moved point, if any.
  std::optional<Interval> support() const;

  friend bool operator==(const ClosedAction&, const ClosedAction&) = default;

 private:
  std::vector<FinitePermutation> alphas_;
};

struct PathEmbedding {
  Point start = 0;
  Point end = 0;
};

/// Embeds an arbitrary finite labeled graph whose beta-subgraph has no
/// cycle: each beta-path occupies a fresh block, alpha edges are added
/// between the blocks.  Returns the vertex placement.
std::map<VertexId, Point> embed_graph(ActionState& state, const LabeledGraph& g, const PointSet& forbidden,
                                      const std::string& op);

PathEmbedding embed_path(ActionState& state, const Word& w, const PointSet& forbidden = {});
Point embed_cycle(ActionState& state, const Word& w, const PointSet& forbidden = {});
/// x with c.x = x, c.(w.x) = w.x and w.x != x once the state is closed.
Point embed_Q_witness(ActionState& state, const Word& c, const Word& w, const PointSet& forbidden = {});

/// Closes every open alpha chain x_0 -> ... -> x_k with x_k -> x_0.
ClosedAction close(const ActionState& state);
/// The same closure recorded in the state (monotone; idempotent).
void close_in_place(ActionState& state);

Point evaluate(const ClosedAction& a, const Word& w, Point x);

nlohmann::json state_to_json(const ActionState& state);
ActionState state_from_json(const nlohmann::json& j);

}  // namespace pinch
