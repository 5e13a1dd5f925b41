#include <doctest.h>

#include "oracles.hpp"
#include "pinch/graph.hpp"
#include "pinch/generic.hpp"

using namespace pinch;

namespace {

Word W(const char* text) { return parse_word(text); }

bool same_edges(const LabeledGraph& a, const LabeledGraph& b) {
  return a.vertices() == b.vertices() && a.edges() == b.edges();
}

std::int64_t betti(const LabeledGraph& g) {
  return static_cast<std::int64_t>(g.edges().size()) - static_cast<std::int64_t>(g.vertices().size()) +
         static_cast<std::int64_t>(g.components());
}

std::vector<Word> cyclic_words(int rank, int max_length) {
  std::vector<Word> out;
  for (const auto& w : enumerate_reduced_words(rank, max_length)) {
    if (is_cyclically_reduced(w) && w.contains_alpha()) out.push_back(w);
  }
  return out;
}

}  // namespace

TEST_CASE("path_graph") {
  const auto p = path_graph(W("b"), 0);
  CHECK(p.vertices().size() == 2);
  CHECK(p.edges() == std::set<Edge>{{0, 1, kBeta}});

  const auto q = path_graph(W("a1 b"), 10);
  CHECK(q.vertices() == std::set<VertexId>{10, 11, 12});
  CHECK(q.edges() == std::set<Edge>{{10, 11, kBeta}, {11, 12, 1}});

  const auto r = path_graph(W("a1^-1"), 0);
  CHECK(r.edges() == std::set<Edge>{{1, 0, 1}});

  CHECK_THROWS_AS(path_graph(W("a1 a1^-1"), 0), PreconditionError);
  CHECK_THROWS_AS(path_graph(Word{}, 0), PreconditionError);
}

TEST_CASE("cycle_graph") {
  const auto loop = cycle_graph(W("a1"), 3);
  CHECK(loop.vertices() == std::set<VertexId>{3});
  CHECK(loop.edges() == std::set<Edge>{{3, 3, 1}});

  const auto two = cycle_graph(W("a1 b"), 0);
  CHECK(two.vertices().size() == 2);
  CHECK(two.edges() == std::set<Edge>{{0, 1, kBeta}, {1, 0, 1}});

  CHECK_THROWS_AS(cycle_graph(W("b a1 b^-1"), 0), PreconditionError);
}

TEST_CASE("path and cycle graphs are well-labeled") {
  std::mt19937 rng(21);
  for (int t = 0; t < 500; ++t) {
    const Word w(oracle::random_reduced(rng, 2, 1 + rng() % 12));
    const auto p = path_graph(w, 0);
    CHECK(p.is_well_labeled());
    CHECK(p.vertices().size() == w.size() + 1);
    if (is_cyclically_reduced(w)) {
      const auto c = cycle_graph(w, 0);
      CHECK(c.is_well_labeled());
      CHECK(c.vertices().size() == w.size());
      CHECK(c.edges().size() == w.size());
    }
  }
}

TEST_CASE("fold") {
  SUBCASE("single fold") {
    LabeledGraph g;
    g.add_edge(0, 1, 1);
    g.add_edge(0, 2, 1);
    const auto f = fold(g);
    CHECK(f.graph.vertices() == std::set<VertexId>{0, 1});
    CHECK(f.vertex_map.at(2) == 1);
    CHECK(f.graph.is_well_labeled());
  }
  SUBCASE("well-labeled input is unchanged") {
    const auto g = path_graph(W("a1 b a2^-1 b"), 0);
    const auto f = fold(g);
    CHECK(same_edges(f.graph, g));
    for (const auto& [v, img] : f.vertex_map) CHECK(v == img);
  }
  SUBCASE("Q0 against the fixpoint oracle") {
    std::mt19937 rng(22);
    int checked = 0;
    while (checked < 300) {
      const Word c(oracle::random_reduced(rng, 2, 1 + rng() % 5));
      const Word w(oracle::random_reduced(rng, 2, 1 + rng() % 6));
      if (!is_cyclically_reduced(c) || !c.contains_alpha() || is_power_of(w, c)) continue;
      const auto q0 = build_Q0(c, w);
      const auto f = fold(q0);
      CHECK(same_edges(f.graph, oracle::fold(q0)));
      CHECK(f.graph.is_well_labeled());
      // the vertex map is a surjective homomorphism
      for (const auto& e : q0.edges()) {
        CHECK(f.graph.edges().contains(Edge{f.vertex_map.at(e.src), f.vertex_map.at(e.dst), e.gen}));
      }
      ++checked;
    }
  }
  SUBCASE("confluence under relabelling") {
    std::mt19937 rng(23);
    for (int t = 0; t < 200; ++t) {
      LabeledGraph g;
      const int n = 2 + static_cast<int>(rng() % 7);
      for (int k = 0; k < n + 3; ++k) g.add_edge(rng() % n, rng() % n, static_cast<int>(rng() % 3));
      // reverse the vertex ids, fold, and map back
      LabeledGraph r;
      for (const auto& e : g.edges()) r.add_edge(n - 1 - e.src, n - 1 - e.dst, e.gen);
      const auto a = fold(g).graph;
      const auto b = fold(r).graph;
      CHECK(a.vertices().size() == b.vertices().size());
      CHECK(a.edges().size() == b.edges().size());
      CHECK(betti(a) == betti(b));
    }
  }
}

TEST_CASE("build_and_classify_Q") {
  const Word gamma = W("a1 b");
  CHECK(build_and_classify_Q(power(gamma, 2), power(gamma, 3)).shape.kind == QKind::OneCycle);

  const auto two = build_and_classify_Q(W("a1"), W("a2"));
  CHECK(two.shape.kind == QKind::TwoCycles);
  CHECK(two.shape.betti == 2);

  const Word c = W("a1 b a1^-1 b^-1");
  const auto q = build_and_classify_Q(c, W("a1"));
  CHECK(q.shape.betti == betti(oracle::fold(build_Q0(c, W("a1")))));
  CHECK(q.shape.c_cycles_injective);

  CHECK_THROWS_AS(build_and_classify_Q(W("b"), W("a1")), PreconditionError);
  CHECK_THROWS_AS(build_and_classify_Q(c, power(c, 2)), PreconditionError);
}

TEST_CASE("Q shapes: cycles spell c, beta-only paths force alpha elsewhere") {
  const auto cs = cyclic_words(2, 4);
  const auto ws = enumerate_reduced_words(2, 3);
  int three = 0;
  int bad = 0;
  for (const auto& c : cs) {
    for (const auto& w : ws) {
      if (is_power_of(w, c)) continue;
      const auto q = build_and_classify_Q(c, w);
      bool ok = q.shape.c_cycles_injective && q.shape.betti == betti(q.graph) &&
                (q.shape.kind == QKind::OneCycle) == (q.shape.betti == 1);
      if (q.shape.kind == QKind::ThreeCycles) {
        ++three;
        ok = ok && q.shape.paths.size() == 3;
        for (std::size_t i = 0; ok && i < 3; ++i) {
          if (q.shape.paths[i].contains_alpha()) continue;
          for (std::size_t j = 0; j < 3; ++j) ok = ok && (j == i || q.shape.paths[j].contains_alpha());
        }
      }
      if (!ok) {
        ++bad;
        MESSAGE("c = " << format_word(c) << ", w = " << format_word(w));
      }
    }
  }
  CHECK(bad == 0);
  CHECK(three > 0);
}

TEST_CASE("embed_check") {
  SUBCASE("graph into itself") {
    const auto g = cycle_graph(W("a1 b a2 b^-1"), 0);
    const auto f = embed_check(g, g, std::pair<VertexId, VertexId>{0, 0});
    REQUIRE(f);
    for (const auto& [v, img] : *f) CHECK(v == img);
  }
  SUBCASE("beta path into the shift window") {
    const auto p = path_graph(W("b^3"), 0);
    const auto f = embed_check(p, shift_window_graph(-5, 10), std::pair<VertexId, VertexId>{0, 4});
    REQUIRE(f);
    for (VertexId i = 0; i <= 3; ++i) CHECK(f->at(i) == 4 + i);
  }
  SUBCASE("alpha^2 path into loops") {
    LabeledGraph big;
    for (VertexId v = 0; v < 4; ++v) big.add_edge(v, v, 1);
    CHECK_FALSE(embed_check(path_graph(W("a1 a1"), 0), big).has_value());
  }
  SUBCASE("agrees with exhaustive anchored search") {
    std::mt19937 rng(24);
    for (int t = 0; t < 200; ++t) {
      LabeledGraph big;
      const int n = 3 + static_cast<int>(rng() % 4);
      for (int k = 0; k < 2 * n; ++k) big.add_edge(rng() % n, rng() % n, static_cast<int>(rng() % 2));
      big = fold(big).graph;
      const auto small = path_graph(Word(oracle::random_reduced(rng, 1, 1 + rng() % 3)), 100);
      const std::pair<VertexId, VertexId> anchor{100, *big.vertices().begin()};
      const auto f = embed_check(small, big, anchor);
      CHECK(f.has_value() == oracle::embeds(small, big, anchor));
      if (f) {
        std::set<VertexId> images;
        for (const auto& [v, img] : *f) images.insert(img);
        CHECK(images.size() == f->size());
        for (const auto& e : small.edges()) CHECK(big.edges().contains(Edge{f->at(e.src), f->at(e.dst), e.gen}));
      }
    }
  }
}

TEST_CASE("graph export") {
  auto g = path_graph(W("a1 b"), 0);
  g.mark("v0", 0);
  const auto dot = to_dot(g);
  CHECK(dot.find("label=\"a1\"") != std::string::npos);
  CHECK(dot.find("label=\"b\"") != std::string::npos);
  const auto j = to_json(g);
  CHECK(j.at("vertices").size() == 3);
  CHECK(j.at("edges").size() == 2);
  CHECK(graph_from_json(j) == g);
}
