#include "wedge/sim.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/rng.hpp"

namespace {

using wedge::DynamicGraph;
using wedge::EventKind;
using wedge::ModelParams;
using wedge::Rng;
using wedge::SimEvent;
using wedge::Simulator;
using wedge::vertex_t;

// Triangle 0-1-2 plus tail 1-3-4 and an isolated vertex 5.
// Degrees 2,3,2,2,1,0; 6 wedges, 1 triangle.
DynamicGraph make_probe_graph() {
  DynamicGraph g(6);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 0);
  g.add_edge(1, 3);
  g.add_edge(3, 4);
  return g;
}

TEST(Sim, WedgeMidpointFollowsDegreeWeights) {
  // Path 0-1-2-3: the two interior vertices each carry one wedge.
  DynamicGraph g(4);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  Simulator sim(g, ModelParams{0.0, 0.0, 0.0}, Rng(3));
  std::map<vertex_t, int> mid_count;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const auto w = sim.sample_wedge();
    ASSERT_NE(w.end_a, w.end_b);
    ASSERT_TRUE(g.has_edge(w.mid, w.end_a));
    ASSERT_TRUE(g.has_edge(w.mid, w.end_b));
    ++mid_count[w.mid];
  }
  // 3 sigma on a fair split.
  const double tol = 3.0 * std::sqrt(0.25 / n);
  EXPECT_NEAR(mid_count[1] / static_cast<double>(n), 0.5, tol);
  EXPECT_NEAR(mid_count[2] / static_cast<double>(n), 0.5, tol);
}

TEST(Sim, SingleStepPairProbabilities) {
  const DynamicGraph base = make_probe_graph();
  ASSERT_EQ(base.wedge_stats().wedges, 6);
  const ModelParams params{0.6, 0.2, 0.3};
  Rng rng(101);
  const int trials = 300000;
  std::map<std::pair<vertex_t, vertex_t>, int> added, removed;
  for (int i = 0; i < trials; ++i) {
    DynamicGraph g = base;
    Simulator sim(g, params, rng.split());
    const SimEvent ev = sim.step();
    if (ev.kind == EventKind::add) ++added[{std::min(ev.u, ev.v), std::max(ev.u, ev.v)}];
    if (ev.kind == EventKind::remove) ++removed[{std::min(ev.u, ev.v), std::max(ev.u, ev.v)}];
  }
  // P(connect u,v) = 0.5 * (p * d(u,v) / wedges + r / C(n,2)).
  const double pairs = 15.0;
  auto expect_add = [&](vertex_t u, vertex_t v, int64_t common) {
    const double prob = 0.5 * (params.p * static_cast<double>(common) / 6.0 + params.r / pairs);
    const double sigma = std::sqrt(prob * (1.0 - prob) / trials);
    const double freq = added[{u, v}] / static_cast<double>(trials);
    EXPECT_NEAR(freq, prob, 3.0 * sigma) << "pair " << u << "," << v;
  };
  expect_add(0, 3, 1);  // share vertex 1
  expect_add(2, 3, 1);
  expect_add(1, 4, 1);  // share vertex 3
  expect_add(4, 5, 0);  // no common neighbour, uniform term only
  expect_add(0, 5, 0);

  // P(disconnect u,v) = 0.5 * q / C(n,2) for present edges.
  const double prob_rm = 0.5 * params.q / pairs;
  const double sigma_rm = std::sqrt(prob_rm * (1.0 - prob_rm) / trials);
  const double freq_rm = removed[{3, 4}] / static_cast<double>(trials);
  EXPECT_NEAR(freq_rm, prob_rm, 3.0 * sigma_rm);
}

TEST(Sim, TraceIsDeterministicForASeed) {
  DynamicGraph g1 = make_probe_graph();
  DynamicGraph g2 = make_probe_graph();
  Simulator a(g1, ModelParams{0.7, 0.1, 0.2}, Rng(77));
  Simulator b(g2, ModelParams{0.7, 0.1, 0.2}, Rng(77));
  const auto ta = a.run_trace(50, 100000);
  const auto tb = b.run_trace(50, 100000);
  ASSERT_EQ(ta.size(), tb.size());
  for (size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].step, tb[i].step);
    EXPECT_EQ(ta[i].kind, tb[i].kind);
    EXPECT_EQ(ta[i].u, tb[i].u);
    EXPECT_EQ(ta[i].v, tb[i].v);
  }
  EXPECT_EQ(wedge::event_digest(wedge::to_edge_events(ta)),
            wedge::event_digest(wedge::to_edge_events(tb)));
}

TEST(Sim, PureClosureOnPathTakesTwoStepsOnAverage) {
  // One open wedge and p=1: each step closes it with probability 1/2.
  Rng rng(55);
  double total_steps = 0.0;
  const int runs = 2000;
  for (int i = 0; i < runs; ++i) {
    DynamicGraph g(3);
    g.add_edge(0, 1);
    g.add_edge(1, 2);
    Simulator sim(g, ModelParams{1.0, 0.0, 0.0}, rng.split());
    const auto events = sim.run_trace(1, 1000);
    ASSERT_EQ(events.size(), 1u);
    EXPECT_EQ(events[0].kind, EventKind::add);
    total_steps += static_cast<double>(events[0].step + 1);
    EXPECT_EQ(g.num_triangles(), 1);
  }
  // Geometric(1/2): mean 2, sd sqrt(2); 3 standard errors.
  EXPECT_NEAR(total_steps / runs, 2.0, 3.0 * std::sqrt(2.0) / std::sqrt(runs));
}

TEST(Sim, CompleteGraphWithoutDeletionsIsQuiet) {
  DynamicGraph g(6);
  for (vertex_t u = 0; u < 6; ++u)
    for (vertex_t v = u + 1; v < 6; ++v) g.add_edge(u, v);
  Simulator sim(g, ModelParams{1.0, 0.0, 1.0}, Rng(9));
  const auto events = sim.run_trace(1, 2000);
  EXPECT_TRUE(events.empty());
  EXPECT_EQ(sim.steps_taken(), 2000);
  EXPECT_EQ(g.num_edges(), 15);
}

TEST(Sim, NoDeletionsMeansMonotoneGrowth) {
  DynamicGraph g = make_probe_graph();
  Simulator sim(g, ModelParams{0.8, 0.0, 0.3}, Rng(12));
  int64_t edges = g.num_edges();
  for (int i = 0; i < 500; ++i) {
    const SimEvent ev = sim.step();
    EXPECT_NE(ev.kind, EventKind::remove);
    EXPECT_GE(g.num_edges(), edges);
    edges = g.num_edges();
  }
}

TEST(Sim, RejectsDegenerateInputs) {
  DynamicGraph g(1);
  EXPECT_THROW(Simulator(g, ModelParams{0.5, 0.0, 0.0}, Rng(1)), std::invalid_argument);
  DynamicGraph h(4);
  EXPECT_THROW(Simulator(h, ModelParams{1.5, 0.0, 0.0}, Rng(1)), std::invalid_argument);
}

}  // namespace
