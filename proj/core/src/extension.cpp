#include "pinch/extension.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace pinch {

// ---------------------------------------------------------------------------
// PartialInjection / FinitePermutation

std::optional<Point> PartialInjection::image(Point x) const {
  auto it = fwd_.find(x);
  if (it == fwd_.end()) return std::nullopt;
  return it->second;
}

std::optional<Point> PartialInjection::preimage(Point y) const {
  auto it = bwd_.find(y);
  if (it == bwd_.end()) return std::nullopt;
  return it->second;
}

void PartialInjection::assign(Point x, Point y) {
  if (fwd_.contains(x) || bwd_.contains(y)) {
    throw std::logic_error("partial injection: slot already assigned at " + std::to_string(x) + " -> " +
                           std::to_string(y));
  }
  fwd_.emplace(x, y);
  bwd_.emplace(y, x);
}

std::vector<std::vector<Point>> PartialInjection::chains() const {
  std::vector<std::vector<Point>> out;
  for (const auto& [x, y] : fwd_) {
    if (bwd_.contains(x)) continue;
    std::vector<Point> chain{x};
    Point cur = x;
    while (auto next = image(cur)) {
      chain.push_back(*next);
      cur = *next;
    }
    out.push_back(std::move(chain));
  }
  return out;
}

std::vector<std::vector<Point>> PartialInjection::cycles() const {
  std::vector<std::vector<Point>> out;
  PointSet seen;
  for (const auto& [x, y] : fwd_) {
    if (seen.contains(x)) continue;
    // walk backward: a cycle returns to x, a chain runs out
    bool closed = false;
    Point cur = x;
    std::vector<Point> members{x};
    while (auto next = image(cur)) {
      if (*next == x) {
        closed = true;
        break;
      }
      members.push_back(*next);
      cur = *next;
    }
    if (closed) {
      for (auto m : members) seen.insert(m);
      out.push_back(std::move(members));
    } else {
      seen.insert(x);
    }
  }
  return out;
}

Point FinitePermutation::apply(Point x) const {
  auto it = fwd_.find(x);
  return it == fwd_.end() ? x : it->second;
}

Point FinitePermutation::apply_inverse(Point y) const {
  auto it = bwd_.find(y);
  return it == bwd_.end() ? y : it->second;
}

void FinitePermutation::set(Point x, Point y) {
  if (x == y) return;
  fwd_[x] = y;
  bwd_[y] = x;
}

void FinitePermutation::rewire(Point x, Point y) {
  const Point old_image = apply(x);
  const Point old_preimage = apply_inverse(y);
  if (old_image == y) return;
  for (Point p : {x, old_preimage}) fwd_.erase(p);
  for (Point p : {y, old_image}) bwd_.erase(p);
  set(x, y);
  set(old_preimage, old_image);
}

std::vector<std::vector<Point>> FinitePermutation::cycles() const {
  std::vector<std::vector<Point>> out;
  PointSet seen;
  for (const auto& [x, y] : fwd_) {
    if (seen.contains(x)) continue;
    std::vector<Point> cycle{x};
    seen.insert(x);
    for (Point cur = y; cur != x; cur = apply(cur)) {
      cycle.push_back(cur);
      seen.insert(cur);
    }
    out.push_back(std::move(cycle));
  }
  return out;
}

// ---------------------------------------------------------------------------
// ActionState

ActionState::ActionState(int rank, Point origin, Growth growth)
    : rank_(rank), origin_(origin), growth_(growth), frontier_(origin), alphas_(static_cast<std::size_t>(rank)) {
  if (rank < 0) throw PreconditionError("ActionState: negative rank");
}

const PartialInjection& ActionState::alpha(int i) const {
  if (i < 1 || i > rank_) throw PreconditionError("alpha index out of rank");
  return alphas_[static_cast<std::size_t>(i - 1)];
}

Interval ActionState::allocate(std::int64_t length, const PointSet& forbidden) {
  if (length < 0) throw PreconditionError("allocate: negative length");
  auto blocked = [&](const Interval& block) -> std::optional<Point> {
    // returns the offending point nearest the far side of the block
    std::optional<Point> hit;
    for (const PointSet* set : std::array<const PointSet*, 2>{&forbidden, &reserved_}) {
      auto it = set->lower_bound(block.lo);
      for (; it != set->end() && *it <= block.hi; ++it) {
        if (growth_ == Growth::Up) {
          hit = hit ? std::max(*hit, *it) : *it;
        } else if (!hit || *it < *hit) {
          hit = *it;
        }
      }
    }
    return hit;
  };
  Interval block;
  Point t = frontier_;
  while (true) {
    block = growth_ == Growth::Up ? Interval{t, t + length} : Interval{t - length, t};
    const auto hit = blocked(block);
    if (!hit) break;
    t = growth_ == Growth::Up ? *hit + 1 + kGap : *hit - 1 - kGap;
  }
  reserve(block);
  return block;
}

void ActionState::reserve(const Interval& block) {
  for (Point x = block.lo; x <= block.hi; ++x) reserved_.insert(x);
  if (block.size() == 0) return;
  if (growth_ == Growth::Up) {
    frontier_ = std::max(frontier_, block.hi + 1 + kGap);
  } else {
    frontier_ = std::min(frontier_, block.lo - 1 - kGap);
  }
}

void ActionState::add_alpha_edge(int gen, Point src, Point dst, const std::string& op) {
  if (gen < 1 || gen > rank_) throw PreconditionError("add_alpha_edge: generator out of rank");
  alphas_[static_cast<std::size_t>(gen - 1)].assign(src, dst);
  reserved_.insert(src);
  reserved_.insert(dst);
  log_.push_back(LogEntry{op, gen, src, dst});
}

void ActionState::note(const std::string& op) { log_.push_back(LogEntry{op, 0, 0, 0}); }

bool ActionState::check_well_labeled() const {
  for (const auto& a : alphas_) {
    std::set<Point> images;
    for (const auto& [x, y] : a.pairs()) {
      if (!images.insert(y).second) return false;
      if (a.preimage(y) != x) return false;
    }
  }
  return true;
}

bool ActionState::audit_log() const {
  std::vector<PartialInjection> replay(static_cast<std::size_t>(rank_));
  try {
    for (const auto& e : log_) {
      if (e.gen == 0) continue;
      replay[static_cast<std::size_t>(e.gen - 1)].assign(e.src, e.dst);
    }
  } catch (const std::logic_error&) {
    return false;
  }
  return replay == alphas_;
}

ActionState ActionState::restore(int rank, Point origin, Growth growth, Point frontier,
                                 std::vector<PartialInjection> alphas, PointSet reserved,
                                 std::vector<LogEntry> log) {
  ActionState s(rank, origin, growth);
  if (alphas.size() != static_cast<std::size_t>(rank)) throw PreconditionError("restore: alpha count != rank");
  s.frontier_ = frontier;
  s.alphas_ = std::move(alphas);
  s.reserved_ = std::move(reserved);
  s.log_ = std::move(log);
  return s;
}

// ---------------------------------------------------------------------------
// ClosedAction

Point ClosedAction::apply(Letter l, Point x) const {
  if (l.is_beta()) return x + l.sign;
  const auto& p = alpha(l.gen);
  return l.sign > 0 ? p.apply(x) : p.apply_inverse(x);
}

std::optional<Interval> ClosedAction::support() const {
  std::optional<Interval> out;
  for (const auto& p : alphas_) {
    if (p.moved().empty()) continue;
    const Point lo = p.moved().begin()->first;
    const Point hi = p.moved().rbegin()->first;
    out = out ? Interval{std::min(out->lo, lo), std::max(out->hi, hi)} : Interval{lo, hi};
  }
  return out;
}

Point evaluate(const ClosedAction& a, const Word& w, Point x) {
  for (const auto& l : w.letters()) x = a.apply(l, x);
  return x;
}

// ---------------------------------------------------------------------------
// Embeddings

std::map<VertexId, Point> embed_graph(ActionState& state, const LabeledGraph& g, const PointSet& forbidden,
                                      const std::string& op) {
  if (!g.is_well_labeled()) throw PreconditionError("embed_graph: graph is not well-labeled");
  for (const auto& e : g.edges()) {
    if (e.gen > state.rank()) throw PreconditionError("embed_graph: label outside the alphabet");
  }
  std::map<VertexId, Point> place;
  const Letter up{kBeta, 1};
  const Letter down{kBeta, -1};
  for (auto v : g.vertices()) {
    if (g.follow(v, down)) continue;  // not the start of a beta-run
    std::vector<VertexId> run{v};
    while (auto next = g.follow(run.back(), up)) run.push_back(*next);
    const Interval block = state.allocate(static_cast<std::int64_t>(run.size()) - 1, forbidden);
    for (std::size_t k = 0; k < run.size(); ++k) place[run[k]] = block.lo + static_cast<Point>(k);
  }
  if (place.size() != g.vertices().size()) {
    throw PreconditionError("embed_graph: a cycle labeled only by beta cannot embed over the shift");
  }
  for (const auto& e : g.edges()) {
    if (e.gen == kBeta) continue;
    state.add_alpha_edge(e.gen, place.at(e.src), place.at(e.dst), op);
  }
  return place;
}

PathEmbedding embed_path(ActionState& state, const Word& w, const PointSet& forbidden) {
  if (w.empty() || !is_reduced(w)) throw PreconditionError("embed_path: word must be reduced and nonempty");
  const LabeledGraph g = path_graph(w, 0);
  const auto place = embed_graph(state, g, forbidden, "path");
  return PathEmbedding{place.at(0), place.at(static_cast<VertexId>(w.size()))};
}

Point embed_cycle(ActionState& state, const Word& w, const PointSet& forbidden) {
  if (w.empty() || !is_cyclically_reduced(w)) {
    throw PreconditionError("embed_cycle: word must be weakly cyclically reduced");
  }
  if (!w.contains_alpha()) throw PreconditionError("embed_cycle: word lies in <beta>");
  const LabeledGraph g = cycle_graph(w, 0);
  return embed_graph(state, g, forbidden, "cycle").at(0);
}

Point embed_Q_witness(ActionState& state, const Word& c, const Word& w, const PointSet& forbidden) {
  if (c.empty() || !is_cyclically_reduced(c)) throw PreconditionError("embed_Q_witness: c must be cyclically reduced");
  if (!c.contains_alpha()) throw PreconditionError("embed_Q_witness: c lies in <beta>");
  if (exponent_sums(c, kBeta).total != 0) throw PreconditionError("embed_Q_witness: S_c(beta) must be zero");
  if (w.empty() || !is_reduced(w)) throw PreconditionError("embed_Q_witness: w must be reduced and nontrivial");
  if (is_power_of(w, c)) throw PreconditionError("embed_Q_witness: w lies in <c>");
  const QGraph q = build_and_classify_Q(c, w);
  if (q.shape.markers_collide) throw std::logic_error("embed_Q_witness: folding identified v0 with w.v0");
  const auto place = embed_graph(state, q.graph, forbidden, "q-witness");
  return place.at(*q.graph.marker("v0"));
}

ClosedAction close(const ActionState& state) {
  std::vector<FinitePermutation> perms(static_cast<std::size_t>(state.rank()));
  for (int i = 1; i <= state.rank(); ++i) {
    auto& p = perms[static_cast<std::size_t>(i - 1)];
    const auto& a = state.alpha(i);
    for (const auto& [x, y] : a.pairs()) p.set(x, y);
    for (const auto& chain : a.chains()) p.set(chain.back(), chain.front());
  }
  return ClosedAction(std::move(perms));
}

void close_in_place(ActionState& state) {
  for (int i = 1; i <= state.rank(); ++i) {
    for (const auto& chain : state.alpha(i).chains()) {
      state.add_alpha_edge(i, chain.back(), chain.front(), "close");
    }
  }
}

// ---------------------------------------------------------------------------
// Snapshot JSON

namespace {
constexpr int kSchemaVersion = 1;
}

nlohmann::json state_to_json(const ActionState& state) {
  nlohmann::json j;
  j["schema"] = kSchemaVersion;
  j["rank"] = state.rank();
  j["origin"] = state.origin();
  j["growth"] = state.growth() == Growth::Up ? "up" : "down";
  j["frontier"] = state.frontier();
  j["alphas"] = nlohmann::json::array();
  for (int i = 1; i <= state.rank(); ++i) {
    j["alphas"].push_back({{"cycles", state.alpha(i).cycles()}, {"chains", state.alpha(i).chains()}});
  }
  j["reserved"] = std::vector<Point>(state.reserved().begin(), state.reserved().end());
  j["log"] = nlohmann::json::array();
  for (const auto& e : state.log()) {
    j["log"].push_back({{"op", e.op}, {"gen", e.gen}, {"src", e.src}, {"dst", e.dst}});
  }
  return j;
}

ActionState state_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema")) throw PreconditionError("snapshot: missing schema version");
  if (j.at("schema").get<int>() != kSchemaVersion) throw PreconditionError("snapshot: schema version mismatch");
  const int rank = j.at("rank").get<int>();
  const auto growth_name = j.at("growth").get<std::string>();
  if (growth_name != "up" && growth_name != "down") throw PreconditionError("snapshot: bad growth");
  if (j.at("alphas").size() != static_cast<std::size_t>(rank)) throw PreconditionError("snapshot: alpha count != rank");

  std::vector<PartialInjection> alphas;
  for (const auto& a : j.at("alphas")) {
    PartialInjection p;
    for (const auto& cyc : a.at("cycles")) {
      const auto pts = cyc.get<std::vector<Point>>();
      for (std::size_t k = 0; k < pts.size(); ++k) p.assign(pts[k], pts[(k + 1) % pts.size()]);
    }
    for (const auto& chain : a.at("chains")) {
      const auto pts = chain.get<std::vector<Point>>();
      for (std::size_t k = 0; k + 1 < pts.size(); ++k) p.assign(pts[k], pts[k + 1]);
    }
    alphas.push_back(std::move(p));
  }
  const auto reserved_list = j.at("reserved").get<std::vector<Point>>();
  std::vector<LogEntry> log;
  for (const auto& e : j.at("log")) {
    log.push_back(LogEntry{e.at("op").get<std::string>(), e.at("gen").get<int>(), e.at("src").get<Point>(),
                           e.at("dst").get<Point>()});
  }
  ActionState s = ActionState::restore(rank, j.at("origin").get<Point>(),
                                       growth_name == "up" ? Growth::Up : Growth::Down,
                                       j.at("frontier").get<Point>(), std::move(alphas),
                                       PointSet(reserved_list.begin(), reserved_list.end()), std::move(log));
  if (!s.audit_log()) throw PreconditionError("snapshot: log does not replay to the stored assignment");
  return s;
}

}  // namespace pinch
