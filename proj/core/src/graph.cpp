#include "pinch/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace pinch {

void LabeledGraph::add_edge(VertexId src, VertexId dst, int gen) {
  vertices_.insert(src);
  vertices_.insert(dst);
  if (edges_.insert(Edge{src, dst, gen}).second) {
    out_.emplace(std::make_pair(src, gen), dst);
    in_.emplace(std::make_pair(dst, gen), src);
  }
}

void LabeledGraph::add_letter_edge(VertexId from, VertexId to, Letter l) {
  if (l.sign > 0) {
    add_edge(from, to, l.gen);
  } else {
    add_edge(to, from, l.gen);
  }
}

std::optional<VertexId> LabeledGraph::marker(const std::string& name) const {
  auto it = marks_.find(name);
  if (it == marks_.end()) return std::nullopt;
  return it->second;
}

bool LabeledGraph::is_well_labeled() const {
  auto functional = [](const auto& mm) {
    for (auto it = mm.begin(); it != mm.end();) {
      if (mm.count(it->first) > 1) return false;
      it = mm.upper_bound(it->first);
    }
    return true;
  };
  return functional(out_) && functional(in_);
}

std::optional<VertexId> LabeledGraph::follow(VertexId v, Letter l) const {
  const auto& mm = l.sign > 0 ? out_ : in_;
  auto it = mm.find({v, l.gen});
  if (it == mm.end()) return std::nullopt;
  return it->second;
}

std::size_t LabeledGraph::degree(VertexId v) const {
  std::size_t d = 0;
  for (const auto& e : edges_) {
    if (e.src == v) ++d;
    if (e.dst == v) ++d;
  }
  return d;
}

std::size_t LabeledGraph::components() const {
  std::map<VertexId, VertexId> parent;
  for (auto v : vertices_) parent[v] = v;
  std::function<VertexId(VertexId)> find = [&](VertexId v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  std::size_t count = vertices_.size();
  for (const auto& e : edges_) {
    auto a = find(e.src);
    auto b = find(e.dst);
    if (a != b) {
      parent[a] = b;
      --count;
    }
  }
  return count;
}

LabeledGraph path_graph(const Word& w, VertexId v0) {
  if (w.empty()) throw PreconditionError("path_graph: empty word");
  if (!is_reduced(w)) throw PreconditionError("path_graph: word is not reduced");
  LabeledGraph g;
  g.add_vertex(v0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    const auto from = v0 + static_cast<VertexId>(j);
    g.add_letter_edge(from, from + 1, w[j]);
  }
  g.mark("start", v0);
  g.mark("end", v0 + static_cast<VertexId>(w.size()));
  return g;
}

LabeledGraph cycle_graph(const Word& w, VertexId v0) {
  if (w.empty()) throw PreconditionError("cycle_graph: empty word");
  if (!is_cyclically_reduced(w)) throw PreconditionError("cycle_graph: word is not weakly cyclically reduced");
  LabeledGraph g;
  g.add_vertex(v0);
  const auto m = static_cast<VertexId>(w.size());
  for (VertexId j = 0; j < m; ++j) {
    const VertexId from = v0 + j;
    const VertexId to = j + 1 == m ? v0 : from + 1;
    g.add_letter_edge(from, to, w[static_cast<std::size_t>(j)]);
  }
  g.mark("start", v0);
  return g;
}

LabeledGraph shift_window_graph(std::int64_t lo, std::int64_t hi) {
  LabeledGraph g;
  for (auto x = lo; x <= hi; ++x) g.add_vertex(x);
  for (auto x = lo; x < hi; ++x) g.add_edge(x, x + 1, kBeta);
  return g;
}

// ---------------------------------------------------------------------------
// Folding: union-find over vertices, per-class out/in maps keyed by label,
// and a worklist of pending identifications.

FoldResult fold(const LabeledGraph& g) {
  std::vector<VertexId> ids(g.vertices().begin(), g.vertices().end());
  std::unordered_map<VertexId, std::size_t> index;
  for (std::size_t k = 0; k < ids.size(); ++k) index[ids[k]] = k;

  std::vector<std::size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<std::map<int, std::size_t>> out(ids.size());
  std::vector<std::map<int, std::size_t>> in(ids.size());
  std::deque<std::pair<std::size_t, std::size_t>> pending;

  auto find = [&](std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  };
  auto attach = [&](std::map<int, std::size_t>& table, int gen, std::size_t nb) {
    auto [it, inserted] = table.emplace(gen, nb);
    if (!inserted) pending.emplace_back(it->second, nb);
  };

  for (const auto& e : g.edges()) {
    const auto s = find(index.at(e.src));
    const auto t = find(index.at(e.dst));
    attach(out[s], e.gen, t);
    attach(in[t], e.gen, s);
    while (!pending.empty()) {
      auto [a, b] = pending.front();
      pending.pop_front();
      a = find(a);
      b = find(b);
      if (a == b) continue;
      // keep the class with the smaller original id as representative
      if (ids[b] < ids[a]) std::swap(a, b);
      parent[b] = a;
      for (const auto& [gen, nb] : out[b]) attach(out[a], gen, nb);
      for (const auto& [gen, nb] : in[b]) attach(in[a], gen, nb);
      out[b].clear();
      in[b].clear();
    }
  }

  FoldResult result;
  // Representative = least original id of the class.
  std::vector<VertexId> label(ids.size(), 0);
  std::vector<bool> seen(ids.size(), false);
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const auto r = find(k);
    if (!seen[r]) {
      seen[r] = true;
      label[r] = ids[k];
    }
  }
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const VertexId image = label[find(k)];
    result.vertex_map[ids[k]] = image;
    result.graph.add_vertex(image);
  }
  for (const auto& e : g.edges()) {
    result.graph.add_edge(result.vertex_map.at(e.src), result.vertex_map.at(e.dst), e.gen);
  }
  for (const auto& [name, v] : g.marks()) result.graph.mark(name, result.vertex_map.at(v));
  return result;
}

std::string to_string(QKind kind) {
  switch (kind) {
    case QKind::OneCycle: return "OneCycle";
    case QKind::TwoCycles: return "TwoCycles";
    case QKind::ThreeCycles: return "ThreeCycles";
  }
  return "?";
}

namespace {

struct EdgeEnd {
  std::size_t edge;
  bool forward;  // traversing src -> dst
};

// Strips degree-1 vertices (except markers) and returns the remaining edges.
std::vector<Edge> core_edges(const LabeledGraph& g, std::set<VertexId>& core_vertices) {
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  std::vector<bool> alive(edges.size(), true);
  core_vertices = g.vertices();
  std::set<VertexId> keep;
  for (const auto& [name, v] : g.marks()) keep.insert(v);

  std::map<VertexId, std::size_t> deg;
  for (auto v : core_vertices) deg[v] = 0;
  for (const auto& e : edges) {
    ++deg[e.src];
    ++deg[e.dst];
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t k = 0; k < edges.size(); ++k) {
      if (!alive[k]) continue;
      const auto& e = edges[k];
      for (VertexId leaf : {e.src, e.dst}) {
        if (e.src != e.dst && deg[leaf] == 1 && !keep.contains(leaf)) {
          alive[k] = false;
          --deg[e.src];
          --deg[e.dst];
          core_vertices.erase(leaf);
          changed = true;
          break;
        }
      }
    }
    for (auto it = core_vertices.begin(); it != core_vertices.end();) {
      if (deg[*it] == 0 && !keep.contains(*it) && core_vertices.size() > 1) {
        it = core_vertices.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }
  std::vector<Edge> out;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    if (alive[k]) out.push_back(edges[k]);
  }
  return out;
}

QShape classify(const LabeledGraph& folded) {
  QShape shape;
  std::set<VertexId> vs;
  const auto edges = core_edges(folded, vs);
  LabeledGraph core;
  for (auto v : vs) core.add_vertex(v);
  for (const auto& e : edges) core.add_edge(e.src, e.dst, e.gen);
  shape.betti = static_cast<int>(edges.size()) - static_cast<int>(vs.size()) + static_cast<int>(core.components());

  if (shape.betti <= 1) {
    shape.kind = QKind::OneCycle;
    return shape;
  }

  std::map<VertexId, std::vector<EdgeEnd>> ends;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    ends[edges[k].src].push_back({k, true});
    ends[edges[k].dst].push_back({k, false});
  }
  std::set<VertexId> branch;
  for (const auto& [v, list] : ends) {
    if (list.size() >= 3) branch.insert(v);
  }

  struct Segment {
    VertexId from;
    VertexId to;
    Word label;
  };
  std::vector<Segment> segments;
  std::vector<bool> used(edges.size(), false);
  for (auto b : branch) {
    for (const auto& start : ends[b]) {
      if (used[start.edge]) continue;
      std::vector<Letter> letters;
      EdgeEnd cur = start;
      VertexId at = b;
      while (true) {
        used[cur.edge] = true;
        const auto& e = edges[cur.edge];
        letters.push_back(Letter{e.gen, cur.forward ? 1 : -1});
        at = cur.forward ? e.dst : e.src;
        if (branch.contains(at)) break;
        const auto& list = ends[at];
        auto next = std::find_if(list.begin(), list.end(), [&](const EdgeEnd& x) { return !used[x.edge]; });
        if (next == list.end()) break;
        cur = *next;
      }
      segments.push_back({b, at, Word(std::move(letters))});
    }
  }

  const bool theta = branch.size() == 2 && segments.size() == 3 &&
                     std::all_of(segments.begin(), segments.end(), [](const Segment& s) { return s.from != s.to; });
  if (theta) {
    shape.kind = QKind::ThreeCycles;
    const VertexId origin = *branch.begin();
    for (const auto& s : segments) {
      // orient every path from the first branch vertex to the second
      shape.paths.push_back(s.from == origin ? s.label : s.label.inverse());
    }
  } else {
    shape.kind = QKind::TwoCycles;
  }
  return shape;
}

}  // namespace

LabeledGraph build_Q0(const Word& c, const Word& w) {
  const auto nc = static_cast<VertexId>(c.size());
  const auto nw = static_cast<VertexId>(w.size());
  LabeledGraph q0;
  // C(c, v0) on 0 .. nc-1
  for (VertexId j = 0; j < nc; ++j) {
    q0.add_letter_edge(j, j + 1 == nc ? 0 : j + 1, c[static_cast<std::size_t>(j)]);
  }
  // P(w, v0) on 0, nc, nc+1, ..., nc+nw-1
  auto path_vertex = [&](VertexId j) { return j == 0 ? VertexId{0} : nc + j - 1; };
  for (VertexId j = 0; j < nw; ++j) {
    q0.add_letter_edge(path_vertex(j), path_vertex(j + 1), w[static_cast<std::size_t>(j)]);
  }
  const VertexId wv0 = path_vertex(nw);
  // C(c, w.v0) on wv0, nc+nw, ..., nc+nw+nc-2
  auto cyc_vertex = [&](VertexId j) { return j % nc == 0 ? wv0 : nc + nw + j - 1; };
  for (VertexId j = 0; j < nc; ++j) {
    q0.add_letter_edge(cyc_vertex(j), cyc_vertex(j + 1), c[static_cast<std::size_t>(j)]);
  }
  q0.mark("v0", 0);
  q0.mark("wv0", wv0);
  return q0;
}

QGraph build_and_classify_Q(const Word& c, const Word& w) {
  if (c.empty() || !is_cyclically_reduced(c)) throw PreconditionError("Q(c,w): c must be weakly cyclically reduced");
  if (!c.contains_alpha()) throw PreconditionError("Q(c,w): c lies in <beta>");
  if (!is_reduced(w)) throw PreconditionError("Q(c,w): w must be reduced");
  if (is_power_of(w, c)) throw PreconditionError("Q(c,w): w lies in <c>");

  const LabeledGraph q0 = build_Q0(c, w);
  FoldResult folded = fold(q0);
  QGraph out;
  out.shape = classify(folded.graph);

  const auto nc = static_cast<VertexId>(c.size());
  const auto nw = static_cast<VertexId>(w.size());
  const VertexId wv0 = *q0.marker("wv0");
  std::set<VertexId> first;
  std::set<VertexId> second;
  for (VertexId j = 0; j < nc; ++j) {
    first.insert(folded.vertex_map.at(j));
    second.insert(folded.vertex_map.at(j == 0 ? wv0 : nc + nw + j - 1));
  }
  out.shape.c_cycles_injective = first.size() == static_cast<std::size_t>(nc) &&
                                 second.size() == static_cast<std::size_t>(nc);
  out.shape.markers_collide = folded.vertex_map.at(0) == folded.vertex_map.at(wv0);
  out.graph = std::move(folded.graph);
  return out;
}

// ---------------------------------------------------------------------------
// Embedding search: once one vertex of a connected component is placed,
// well-labeledness of the target forces the rest.

std::optional<std::map<VertexId, VertexId>> embed_check(
    const LabeledGraph& small, const LabeledGraph& big,
    std::optional<std::pair<VertexId, VertexId>> anchor) {
  if (!small.is_well_labeled() || !big.is_well_labeled()) {
    throw PreconditionError("embed_check: both graphs must be well-labeled");
  }
  // connected components of small, in vertex order, anchor's first
  std::vector<std::vector<VertexId>> comps;
  {
    std::set<VertexId> seen;
    std::vector<VertexId> roots;
    if (anchor) roots.push_back(anchor->first);
    roots.insert(roots.end(), small.vertices().begin(), small.vertices().end());
    std::map<VertexId, std::vector<VertexId>> nbr;
    for (const auto& e : small.edges()) {
      nbr[e.src].push_back(e.dst);
      nbr[e.dst].push_back(e.src);
    }
    for (auto r : roots) {
      if (!small.vertices().contains(r)) throw PreconditionError("embed_check: anchor not in small graph");
      if (seen.contains(r)) continue;
      std::vector<VertexId> comp{r};
      seen.insert(r);
      for (std::size_t k = 0; k < comp.size(); ++k) {
        for (auto u : nbr[comp[k]]) {
          if (seen.insert(u).second) comp.push_back(u);
        }
      }
      comps.push_back(std::move(comp));
    }
  }
  std::map<VertexId, std::vector<Letter>> incident;
  for (const auto& e : small.edges()) {
    incident[e.src].push_back(Letter{e.gen, 1});
    incident[e.dst].push_back(Letter{e.gen, -1});
  }

  std::map<VertexId, VertexId> f;
  std::set<VertexId> used;

  // Places one component rooted at comp[0] -> target; returns placed vertices
  // or nullopt (with no residue left in f/used).
  auto place = [&](const std::vector<VertexId>& comp, VertexId target) -> bool {
    if (used.contains(target)) return false;
    std::vector<VertexId> placed;
    auto rollback = [&] {
      for (auto v : placed) {
        used.erase(f[v]);
        f.erase(v);
      }
      return false;
    };
    f[comp[0]] = target;
    used.insert(target);
    placed.push_back(comp[0]);
    for (std::size_t k = 0; k < placed.size(); ++k) {
      const VertexId v = placed[k];
      for (const auto& l : incident[v]) {
        const auto u = small.follow(v, l);
        const auto image = big.follow(f[v], l);
        if (!image) return rollback();
        if (auto it = f.find(*u); it != f.end()) {
          if (it->second != *image) return rollback();
          continue;
        }
        if (used.contains(*image)) return rollback();
        f[*u] = *image;
        used.insert(*image);
        placed.push_back(*u);
      }
    }
    return true;
  };
  auto unplace = [&](const std::vector<VertexId>& comp) {
    for (auto v : comp) {
      used.erase(f[v]);
      f.erase(v);
    }
  };

  std::function<bool(std::size_t)> search = [&](std::size_t idx) {
    if (idx == comps.size()) return true;
    const auto& comp = comps[idx];
    if (idx == 0 && anchor) {
      if (!big.vertices().contains(anchor->second)) return false;
      if (!place(comp, anchor->second)) return false;
      if (search(idx + 1)) return true;
      unplace(comp);
      return false;
    }
    for (auto target : big.vertices()) {
      if (!place(comp, target)) continue;
      if (search(idx + 1)) return true;
      unplace(comp);
    }
    return false;
  };
  if (!search(0)) return std::nullopt;
  return f;
}

// ---------------------------------------------------------------------------
// Export

std::string to_dot(const LabeledGraph& g, const Alphabet& alphabet) {
  std::ostringstream os;
  os << "digraph schreier {\n";
  for (auto v : g.vertices()) os << "  " << v << ";\n";
  for (const auto& e : g.edges()) {
    os << "  " << e.src << " -> " << e.dst << " [label=\"" << format_letter(Letter{e.gen, 1}, alphabet) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

nlohmann::json to_json(const LabeledGraph& g, const Alphabet& alphabet) {
  nlohmann::json j;
  j["vertices"] = std::vector<VertexId>(g.vertices().begin(), g.vertices().end());
  j["edges"] = nlohmann::json::array();
  for (const auto& e : g.edges()) {
    j["edges"].push_back({{"src", e.src}, {"dst", e.dst}, {"label", format_letter(Letter{e.gen, 1}, alphabet)}});
  }
  j["marks"] = nlohmann::json::object();
  for (const auto& [name, v] : g.marks()) j["marks"][name] = v;
  return j;
}

LabeledGraph graph_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  LabeledGraph g;
  for (const auto& v : j.at("vertices")) g.add_vertex(v.get<VertexId>());
  for (const auto& e : j.at("edges")) {
    const Word label = parse_word(e.at("label").get<std::string>(), alphabet);
    if (label.size() != 1 || label[0].sign != 1) throw PreconditionError("graph JSON: bad edge label");
    g.add_edge(e.at("src").get<VertexId>(), e.at("dst").get<VertexId>(), label[0].gen);
  }
  if (j.contains("marks")) {
    for (const auto& [name, v] : j.at("marks").items()) g.mark(name, v.get<VertexId>());
  }
  return g;
}

}  // namespace pinch
