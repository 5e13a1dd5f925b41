#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pinch/word.hpp"

namespace pinch {

using VertexId = std::int64_t;

/// Directed edge stored in its positive orientation; the inverse edge is
/// implicit.
struct Edge {
  VertexId src = 0;
  VertexId dst = 0;
  int gen = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Finite labeled graph over {beta, alpha_1, ...}.  Construction does not
/// enforce well-labeledness; fold() produces a well-labeled quotient.
class LabeledGraph {
 public:
  void add_vertex(VertexId v) { vertices_.insert(v); }
  void add_edge(VertexId src, VertexId dst, int gen);
  /// Edge traversed by letter l from `from` to `to`.
  void add_letter_edge(VertexId from, VertexId to, Letter l);
  void mark(const std::string& name, VertexId v) { marks_[name] = v; }

  const std::set<VertexId>& vertices() const { return vertices_; }
  const std::set<Edge>& edges() const { return edges_; }
  const std::map<std::string, VertexId>& marks() const { return marks_; }
  std::optional<VertexId> marker(const std::string& name) const;

  bool is_well_labeled() const;
  /// Target reached from v along letter l, if the edge exists.  Meaningful
  /// on well-labeled graphs (returns the first match otherwise).
  std::optional<VertexId> follow(VertexId v, Letter l) const;
  /// Incident edge ends, counting a loop twice.
  std::size_t degree(VertexId v) const;
  /// Number of connected components of the underlying undirected graph.
  std::size_t components() const;

  friend bool operator==(const LabeledGraph&, const LabeledGraph&) = default;

 private:
  std::set<VertexId> vertices_;
  std::set<Edge> edges_;
  std::map<std::string, VertexId> marks_;
  std::multimap<std::pair<VertexId, int>, VertexId> out_;
  std::multimap<std::pair<VertexId, int>, VertexId> in_;
};

/// P(w, v0): vertices v0, v0+1, ..., v0+m; edge j carries w_j.
LabeledGraph path_graph(const Word& w, VertexId v0);
/// C(w, v0): vertices v0, ..., v0+m-1; the last edge closes at v0.
LabeledGraph cycle_graph(const Word& w, VertexId v0);
/// The beta skeleton on [lo, hi]: edges x -> x+1.
LabeledGraph shift_window_graph(std::int64_t lo, std::int64_t hi);

struct FoldResult {
  LabeledGraph graph;
  /// Original vertex -> vertex of the folded graph (the least original id
  /// of its class).
  std::map<VertexId, VertexId> vertex_map;
};
FoldResult fold(const LabeledGraph& g);

enum class QKind { OneCycle, TwoCycles, ThreeCycles };
std::string to_string(QKind kind);

struct QShape {
  QKind kind = QKind::OneCycle;
  /// The three branch-to-branch paths, filled for ThreeCycles only.
  std::vector<Word> paths;
  int betti = 0;
  /// Folding identified the markers v0 and w.v0.
  bool markers_collide = false;
  /// The quotient map is injective on C(c, v0) and on C(c, w.v0).
  bool c_cycles_injective = true;
};

struct QGraph {
  LabeledGraph graph;  // folded, marks "v0" and "wv0"
  QShape shape;
};

/// Q0(c, w): C(c, v0), P(w, v0) and C(c, w.v0) glued at v0 and w.v0.
LabeledGraph build_Q0(const Word& c, const Word& w);
QGraph build_and_classify_Q(const Word& c, const Word& w);

/// Injective label-preserving homomorphism small -> big, if one exists.
/// With an anchor (small vertex, big vertex) the search is pinned there.
std::optional<std::map<VertexId, VertexId>> embed_check(
    const LabeledGraph& small, const LabeledGraph& big,
    std::optional<std::pair<VertexId, VertexId>> anchor = std::nullopt);

std::string to_dot(const LabeledGraph& g, const Alphabet& alphabet = {});
nlohmann::json to_json(const LabeledGraph& g, const Alphabet& alphabet = {});
LabeledGraph graph_from_json(const nlohmann::json& j, const Alphabet& alphabet = {});

}  // namespace pinch
