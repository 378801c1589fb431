#include "wedge/tripeel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/oracle.hpp"
#include "wedge/rng.hpp"
#include "wedge/sim.hpp"

namespace {

using wedge::DynamicGraph;
using wedge::EdgeEvent;
using wedge::ModelParams;
using wedge::PeelResult;
using wedge::Rng;
using wedge::RunOptions;
using wedge::TriPeelEngine;
using wedge::TriPeelPolicy;
using wedge::vertex_t;

std::vector<vertex_t> all_vertices(const DynamicGraph& g) {
  std::vector<vertex_t> out(static_cast<size_t>(g.num_vertices()));
  for (vertex_t v = 0; v < g.num_vertices(); ++v) out[static_cast<size_t>(v)] = v;
  return out;
}

DynamicGraph make_k4(vertex_t n = 4) {
  DynamicGraph g(n);
  for (vertex_t u = 0; u < 4; ++u)
    for (vertex_t v = u + 1; v < 4; ++v) g.add_edge(u, v);
  return g;
}

DynamicGraph make_triangle_pendant() {
  DynamicGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  g.add_edge(2, 3);
  return g;
}

DynamicGraph random_graph(vertex_t n, double edge_prob, uint64_t seed) {
  Rng rng(seed);
  DynamicGraph g(n);
  for (vertex_t u = 0; u < n; ++u)
    for (vertex_t v = u + 1; v < n; ++v)
      if (rng.bernoulli(edge_prob)) g.add_edge(u, v);
  return g;
}

int64_t induced_tri_degree(const DynamicGraph& g, vertex_t v, const std::vector<vertex_t>& set) {
  int64_t count = 0;
  for (size_t i = 0; i < set.size(); ++i)
    for (size_t j = i + 1; j < set.size(); ++j)
      if (g.has_edge(v, set[i]) && g.has_edge(v, set[j]) && g.has_edge(set[i], set[j])) ++count;
  return count;
}

TEST(StaticTriPeel, CompleteFourSurvivesWholesale) {
  const DynamicGraph g = make_k4();
  // Threshold 1.5, so survivors need two induced triangles; everyone has 3.
  const PeelResult res = wedge::static_tri_peel(g, all_vertices(g), 0.5, 0.0);
  EXPECT_TRUE(res.survived);
  EXPECT_EQ(res.candidate.size(), 4u);
  EXPECT_EQ(res.rounds, 0);
}

TEST(StaticTriPeel, LoneTriangleFallsBelowThresholdOneAndAHalf) {
  // Every triangle vertex sits in exactly one triangle, under the required
  // two; the whole graph peels away in one round.
  const DynamicGraph g = make_triangle_pendant();
  const PeelResult res = wedge::static_tri_peel(g, all_vertices(g), 0.5, 0.0);
  EXPECT_FALSE(res.survived);
  EXPECT_EQ(res.candidate.size(), 4u);
  for (vertex_t v = 0; v < 4; ++v) EXPECT_EQ(res.levels[v], 0);
}

TEST(StaticTriPeel, TriangleSurvivesThresholdOne) {
  const DynamicGraph g = make_triangle_pendant();
  const PeelResult res = wedge::static_tri_peel(g, all_vertices(g), 1.0 / 3.0, 0.0);
  EXPECT_TRUE(res.survived);
  std::vector<vertex_t> cand = res.candidate;
  std::sort(cand.begin(), cand.end());
  EXPECT_EQ(cand, (std::vector<vertex_t>{0, 1, 2}));
  EXPECT_EQ(res.levels[3], 0);
}

TEST(StaticTriPeel, SurvivorTriDegreesMeetThreshold) {
  const DynamicGraph g = random_graph(12, 0.5, 321);
  const double alpha = 0.5, eps = 0.1;
  const PeelResult res = wedge::static_tri_peel(g, all_vertices(g), alpha, eps);
  if (!res.survived) return;
  const int64_t need = wedge::detail::survive_count(3.0 * alpha * (1.0 + eps));
  for (vertex_t v : res.candidate)
    EXPECT_GE(induced_tri_degree(g, v, res.candidate), need) << "vertex " << v;
}

TEST(TriGridSearch, LoneCliqueIsItsOwnOptimum) {
  const DynamicGraph g = make_k4();
  const TriPeelEngine engine = wedge::tri_grid_search(g, 0.1);
  ASSERT_TRUE(engine.built());
  EXPECT_EQ(engine.candidate(), (std::vector<vertex_t>{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(engine.candidate_value(), 1.0);
}

TEST(TriGridSearch, CliqueBeatsAttachedPath) {
  DynamicGraph g(8);
  for (vertex_t u = 0; u < 4; ++u)
    for (vertex_t v = u + 1; v < 4; ++v) g.add_edge(u, v);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(6, 7);
  const TriPeelEngine engine = wedge::tri_grid_search(g, 0.1);
  ASSERT_TRUE(engine.built());
  EXPECT_EQ(engine.candidate(), (std::vector<vertex_t>{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(engine.candidate_value(), 1.0);
}

TEST(TriGridSearch, RecoversLoneTriangle) {
  const DynamicGraph g = make_triangle_pendant();
  const TriPeelEngine engine = wedge::tri_grid_search(g, 0.1);
  ASSERT_TRUE(engine.built());
  EXPECT_EQ(engine.candidate(), (std::vector<vertex_t>{0, 1, 2}));
  EXPECT_NEAR(engine.candidate_value(), 1.0 / 3.0, 1e-12);
}

TEST(TriGridSearch, TriangleFreeGraphStaysEmpty) {
  DynamicGraph g(5);
  for (vertex_t v = 0; v + 1 < 5; ++v) g.add_edge(v, v + 1);
  const TriPeelEngine engine = wedge::tri_grid_search(g, 0.1);
  EXPECT_FALSE(engine.built());
  EXPECT_TRUE(engine.candidate().empty());
  EXPECT_DOUBLE_EQ(engine.param(), 0.0);
}

TEST(TriGridSearch, StaysWithinFactorOfBruteForce) {
  int tested = 0;
  for (uint64_t seed = 0; seed < 30; ++seed) {
    const DynamicGraph g = random_graph(12, 0.25 + 0.03 * static_cast<double>(seed % 5), 2000 + seed);
    if (g.num_triangles() == 0) continue;
    ++tested;
    const TriPeelEngine engine = wedge::tri_grid_search(g, 0.1);
    ASSERT_TRUE(engine.built());
    const auto exact = wedge::tridensest_bruteforce(g);
    const double best = exact.value.value();
    EXPECT_LE(best, engine.candidate_value() * 3.0 * 1.1 + 1e-9) << "seed " << seed;
    EXPECT_GE(best + 1e-9, engine.candidate_value()) << "seed " << seed;
  }
  EXPECT_GE(tested, 10);
}

TEST(TriEngine, RepairMatchesFromScratchUnderChurn) {
  Rng rng(411);
  DynamicGraph g = random_graph(20, 0.35, 78);
  TriPeelEngine engine(g, 0.1);
  int64_t t = 0;
  for (int batch = 0; batch < 20; ++batch) {
    for (int k = 0; k < 4; ++k) {
      auto u = static_cast<vertex_t>(rng.next_below(20));
      auto v = static_cast<vertex_t>(rng.next_below(20));
      if (u == v) continue;
      engine.absorb(g, EdgeEvent{t++, u, v, !g.has_edge(u, v)});
    }
    engine.repair(g);
    if (!engine.built()) continue;
    const PeelResult fresh = wedge::static_tri_peel(g, all_vertices(g), engine.param(), 0.1);
    ASSERT_TRUE(fresh.survived);
    ASSERT_EQ(engine.levels(), fresh.levels) << "batch " << batch;
    std::vector<vertex_t> cand = engine.candidate();
    std::sort(cand.begin(), cand.end());
    std::vector<vertex_t> expect = fresh.candidate;
    std::sort(expect.begin(), expect.end());
    ASSERT_EQ(cand, expect);
    const auto stats = g.induced_stats(cand);
    ASSERT_NEAR(engine.candidate_value(), stats.tri_density, 1e-9);
  }
}

TEST(TriEngine, PendantDeletionsLeaveCandidateAlone) {
  DynamicGraph g(8);
  for (vertex_t u = 0; u < 4; ++u)
    for (vertex_t v = u + 1; v < 4; ++v) g.add_edge(u, v);
  g.add_edge(3, 4);
  g.add_edge(4, 5);
  g.add_edge(5, 6);
  g.add_edge(6, 7);
  TriPeelEngine engine(g, 0.1);
  ASSERT_EQ(engine.candidate().size(), 4u);
  engine.absorb(g, EdgeEvent{0, 6, 7, false});
  engine.absorb(g, EdgeEvent{1, 5, 6, false});
  const auto rep = engine.repair(g);
  EXPECT_FALSE(rep.rebuilt);
  EXPECT_EQ(engine.candidate(), (std::vector<vertex_t>{0, 1, 2, 3}));
  EXPECT_DOUBLE_EQ(engine.candidate_value(), 1.0);
}

TEST(TriEngine, GrowingSecondCliqueForcesRebuild) {
  // A lone triangle keeps the guess low; completing a 6-clique elsewhere
  // pushes the candidate's value past the rebuild window.
  DynamicGraph g(10);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(0, 2);
  TriPeelEngine engine(g, 0.1);
  ASSERT_TRUE(engine.built());
  int64_t t = 0;
  for (vertex_t u = 4; u < 10; ++u)
    for (vertex_t v = u + 1; v < 10; ++v) engine.absorb(g, EdgeEvent{t++, u, v, true});
  const auto rep = engine.repair(g);
  EXPECT_TRUE(rep.rebuilt);
  const auto cand = engine.candidate();
  for (vertex_t v = 4; v < 10; ++v)
    EXPECT_TRUE(std::find(cand.begin(), cand.end(), v) != cand.end()) << "vertex " << v;
  // The 6-clique holds C(6,3)=20 triangles on 6 vertices.
  EXPECT_GE(engine.candidate_value(), 2.0);
}

TEST(TriRestAndRun, ZeroEventStreamMatchesGridSearch) {
  DynamicGraph g = make_k4(6);
  const TriPeelEngine reference = wedge::tri_grid_search(g, 0.1);
  RunOptions opts;
  opts.eps = 0.1;
  opts.fixed_params = ModelParams{0.5, 0.001, 0.001};
  const auto res = wedge::tri_rest_and_run(g, {}, opts);
  ASSERT_EQ(res.rounds.size(), 1u);
  EXPECT_DOUBLE_EQ(res.rounds[0].density, reference.candidate_value());
  EXPECT_EQ(res.final_candidate, reference.candidate());
}

TEST(TriRestAndRun, StreamRoundsStayWithinDynamicFactor) {
  DynamicGraph seed = random_graph(12, 0.3, 91);
  DynamicGraph sim_g = seed;
  wedge::Simulator sim(sim_g, ModelParams{0.6, 0.01, 0.1}, Rng(92));
  const auto events = wedge::to_edge_events(sim.run_trace(120, 2000000));

  DynamicGraph g = seed;
  RunOptions opts;
  opts.eps = 0.1;
  opts.fixed_params = ModelParams{0.6, 0.01, 0.1};
  opts.force_per_event = true;
  opts.oracle = [](const DynamicGraph& now) {
    if (now.num_triangles() == 0) return 0.0;
    return wedge::tridensest_bruteforce(now).value.value();
  };
  const auto res = wedge::tri_rest_and_run(g, events, opts);
  for (const auto& row : res.rounds) {
    ASSERT_TRUE(row.oracle_density.has_value());
    if (*row.oracle_density == 0.0) {
      EXPECT_DOUBLE_EQ(row.density, 0.0);
      continue;
    }
    EXPECT_GT(row.density, 0.0);
    EXPECT_LE(*row.oracle_density / row.density, 5.0 * 1.1 + 1e-9) << "round " << row.round;
  }
}

}  // namespace
