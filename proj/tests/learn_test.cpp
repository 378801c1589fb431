#include "wedge/learn.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/rng.hpp"
#include "wedge/sim.hpp"

namespace {

using wedge::DynamicGraph;
using wedge::EdgeEvent;
using wedge::LearnOptions;
using wedge::ModelParams;
using wedge::RegressionFit;
using wedge::Rng;
using wedge::vertex_t;
using wedge::WindowStats;

DynamicGraph make_star(vertex_t n, vertex_t leaves) {
  DynamicGraph g(n);
  for (vertex_t v = 1; v <= leaves; ++v) g.add_edge(0, v);
  return g;
}

TEST(Learn, HistogramOfStar) {
  // Star with 4 leaves: every disconnected pair is a leaf pair sharing the hub.
  DynamicGraph g = make_star(5, 4);
  wedge::detail::PairHistogram hist;
  hist.init(g);
  EXPECT_EQ(hist.count(1), 6);
  EXPECT_EQ(hist.count(0), 0);
}

TEST(Learn, HistogramTracksFlipsExactly) {
  Rng rng(31);
  DynamicGraph g(20);
  wedge::detail::PairHistogram hist;
  hist.init(g);
  for (int i = 0; i < 300; ++i) {
    auto u = static_cast<vertex_t>(rng.next_below(20));
    auto v = static_cast<vertex_t>(rng.next_below(20));
    if (u == v) continue;
    if (g.has_edge(u, v)) {
      g.remove_edge(u, v);
      hist.on_remove(g, u, v);
    } else {
      g.add_edge(u, v);
      hist.on_add(g, u, v);
    }
    if (i % 25 == 0) {
      wedge::detail::PairHistogram fresh;
      fresh.init(g);
      for (const auto& [x, c] : fresh.counts())
        ASSERT_EQ(hist.count(x), c) << "cell " << x;
      for (const auto& [x, c] : hist.counts())
        ASSERT_EQ(fresh.count(x), c) << "cell " << x;
    }
  }
}

TEST(Learn, FitRecoversExactLine) {
  WindowStats stats;
  for (int64_t x = 1; x <= 6; ++x) {
    stats.disconnected_by_x[x] = 1000;
    stats.additions_by_x[x] = 10 * x + 20;  // y = 0.01 x + 0.02
  }
  const RegressionFit fit = wedge::fit_line(stats, LearnOptions{});
  ASSERT_TRUE(fit.ok);
  EXPECT_EQ(fit.points, 6);
  EXPECT_NEAR(fit.a, 0.01, 1e-12);
  EXPECT_NEAR(fit.b, 0.02, 1e-12);
  EXPECT_NEAR(fit.r2, 1.0, 1e-12);
}

TEST(Learn, FitOnConstantResponseHasZeroR2) {
  WindowStats stats;
  for (int64_t x = 0; x <= 4; ++x) {
    stats.disconnected_by_x[x] = 100;
    stats.additions_by_x[x] = 5;
  }
  const RegressionFit fit = wedge::fit_line(stats, LearnOptions{});
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.a, 0.0, 1e-12);
  EXPECT_NEAR(fit.b, 0.05, 1e-12);
  EXPECT_DOUBLE_EQ(fit.r2, 0.0);
}

TEST(Learn, FitNeedsTwoSupportedCells) {
  WindowStats stats;
  stats.disconnected_by_x[1] = 100;
  stats.additions_by_x[1] = 3;
  stats.disconnected_by_x[2] = 4;  // below the support floor of 5
  EXPECT_FALSE(wedge::fit_line(stats, LearnOptions{}).ok);
}

TEST(Learn, MissingAdditionCellCountsAsZero) {
  WindowStats stats;
  stats.disconnected_by_x[0] = 50;
  stats.disconnected_by_x[1] = 50;
  stats.additions_by_x[1] = 10;
  const RegressionFit fit = wedge::fit_line(stats, LearnOptions{});
  ASSERT_TRUE(fit.ok);
  EXPECT_NEAR(fit.a, 0.2, 1e-12);
  EXPECT_NEAR(fit.b, 0.0, 1e-12);
}

TEST(Learn, InversionRoundTrip) {
  // Choose true parameters, derive the line they induce over a window of
  // known step span, and check that inversion returns them.
  const double n = 100.0, pairs = 4950.0, m0 = 450.0, wedges0 = 3000.0, open0 = 2400.0;
  const double p = 0.6, r = 0.3;
  const double exposure = 1000.0;  // half of the 2000-step span
  WindowStats stats;
  stats.n = static_cast<int64_t>(n);
  stats.m0 = static_cast<int64_t>(m0);
  stats.wedges0 = static_cast<int64_t>(wedges0);
  stats.open_wedges0 = static_cast<int64_t>(open0);
  stats.additions = 750;
  stats.t_span = 2000;
  RegressionFit fit;
  fit.ok = true;
  fit.a = p * exposure / wedges0;
  fit.b = r * exposure / pairs;
  fit.r2 = 0.95;
  const auto learned = wedge::invert_params(fit, stats, LearnOptions{});
  EXPECT_NEAR(learned.M, exposure, 1e-12);
  EXPECT_NEAR(learned.p, p, 1e-9);
  EXPECT_NEAR(learned.r, r, 1e-9);
  EXPECT_EQ(learned.q, 0.0);  // no deletions seen
  EXPECT_TRUE(std::isinf(learned.q_ratio));
  EXPECT_TRUE(learned.accepted);
}

TEST(Learn, QRatioBoundArithmetic) {
  WindowStats stats;
  stats.n = 200;  // 19900 pairs
  stats.m0 = 199;
  stats.wedges0 = 2000;
  stats.open_wedges0 = 1000;
  stats.additions = 100;
  stats.deletions = 10;
  EXPECT_NEAR(wedge::q_ratio_bound(stats), 0.2, 1e-12);
}

TEST(Learn, QRatioBoundNeedsOpenWedges) {
  WindowStats stats;
  stats.open_wedges0 = 0;
  stats.deletions = 5;
  EXPECT_THROW(wedge::q_ratio_bound(stats), std::invalid_argument);
}

TEST(Learn, QRatioCapsQAtP) {
  WindowStats stats;
  stats.n = 200;
  stats.m0 = 199;
  stats.wedges0 = 2000;
  stats.open_wedges0 = 1000;
  stats.additions = 100;
  stats.deletions = 10;  // bound 0.2, so q = p / 0.2
  RegressionFit fit;
  fit.ok = true;
  fit.a = 1e-4;
  fit.b = 1e-5;
  fit.r2 = 1.0;
  const auto learned = wedge::invert_params(fit, stats, LearnOptions{});
  EXPECT_NEAR(learned.q_ratio, 0.2, 1e-12);
  EXPECT_NEAR(learned.q, std::min(1.0, learned.p / 0.2), 1e-12);
}

TEST(Learn, InversionRejectsBadInput) {
  WindowStats stats;
  stats.additions = 10;
  RegressionFit fit;  // ok = false
  EXPECT_THROW(wedge::invert_params(fit, stats, LearnOptions{}), std::invalid_argument);
  fit.ok = true;
  stats.additions = 0;
  EXPECT_THROW(wedge::invert_params(fit, stats, LearnOptions{}), std::invalid_argument);
}

TEST(Learn, DeletionOnlyWindowFitsFlatLineAndCannotInvert) {
  // Star with 9 leaves plus 5 isolated vertices: two populated cells
  // (60 pairs at x=0, 36 at x=1) and an all-deletions stream.
  DynamicGraph g = make_star(15, 9);
  std::vector<EdgeEvent> events;
  for (vertex_t v = 1; v <= 4; ++v) events.push_back({v, 0, v, false});
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{.eps = 10.0});
  EXPECT_EQ(stats.window_len, 4);
  EXPECT_EQ(stats.stop_reason, "stream end");
  EXPECT_EQ(stats.t_span, 4);  // timestamps 1 through 4
  EXPECT_EQ(stats.additions, 0);
  EXPECT_EQ(stats.deletions, 4);
  EXPECT_EQ(stats.disconnected_by_x.at(0), 60);
  EXPECT_EQ(stats.disconnected_by_x.at(1), 36);
  const RegressionFit fit = wedge::fit_line(stats, LearnOptions{});
  ASSERT_TRUE(fit.ok);
  EXPECT_DOUBLE_EQ(fit.r2, 0.0);
  EXPECT_THROW(wedge::invert_params(fit, stats, LearnOptions{}), std::invalid_argument);
}

TEST(Learn, WindowStopsAtEventBudget) {
  DynamicGraph g(8);
  g.add_edge(0, 1);
  g.add_edge(2, 3);
  g.add_edge(4, 5);  // m0 = 3 caps the window
  std::vector<EdgeEvent> events;
  events.push_back({0, 0, 2, true});
  events.push_back({1, 4, 6, true});
  events.push_back({2, 6, 7, true});
  events.push_back({3, 0, 7, true});
  events.push_back({4, 1, 7, true});
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{.eps = 10.0});
  EXPECT_EQ(stats.window_len, 3);
  EXPECT_EQ(stats.stop_reason, "event budget");
  EXPECT_EQ(stats.t_span, 3);  // timestamps 0 through 2
}

TEST(Learn, WindowStopsOnWedgeRatioDrift) {
  // Closing the only open wedge kills the open-wedge share outright.
  DynamicGraph g(8);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  std::vector<EdgeEvent> events;
  events.push_back({0, 0, 2, true});
  events.push_back({1, 3, 4, true});
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{});
  EXPECT_EQ(stats.stop_reason, "wedge ratio drift");
  EXPECT_EQ(stats.window_len, 1);
}

TEST(Learn, WindowStopsOnHistogramDrift) {
  // Two disjoint 5-leaf stars; bridging the hubs moves ten pairs from the
  // x=0 cell to x=1 while the open-wedge share stays at 1.
  DynamicGraph g(12);
  for (vertex_t v = 1; v <= 5; ++v) g.add_edge(0, v);
  for (vertex_t v = 7; v <= 11; ++v) g.add_edge(6, v);
  std::vector<EdgeEvent> events;
  events.push_back({0, 0, 6, true});
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{});
  EXPECT_EQ(stats.stop_reason, "histogram drift");
  EXPECT_EQ(stats.window_len, 1);
}

TEST(Learn, NetAdditionsDedupeFlipFlops) {
  // Path plus spare isolated vertices so no watched histogram cell empties.
  DynamicGraph g(8);
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  std::vector<EdgeEvent> events;
  events.push_back({0, 0, 2, true});
  events.push_back({1, 0, 2, false});
  events.push_back({2, 0, 2, true});
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{.eps = 10.0});
  EXPECT_EQ(stats.window_len, 3);
  EXPECT_EQ(stats.additions, 1);
  EXPECT_EQ(stats.deletions, 0);
  EXPECT_EQ(stats.additions_by_x.at(1), 1);  // x keyed at window start
}

TEST(Learn, WindowCountsMatchBruteForceRecount) {
  Rng rng(41);
  DynamicGraph seed(25);
  std::set<std::pair<vertex_t, vertex_t>> start_edges;
  for (int i = 0; i < 40; ++i) {
    auto u = static_cast<vertex_t>(rng.next_below(25));
    auto v = static_cast<vertex_t>(rng.next_below(25));
    if (u == v || seed.has_edge(u, v)) continue;
    seed.add_edge(u, v);
    start_edges.insert({std::min(u, v), std::max(u, v)});
  }
  const DynamicGraph snapshot = seed;

  DynamicGraph sim_g = seed;
  wedge::Simulator sim(sim_g, ModelParams{0.7, 0.05, 0.2}, Rng(43));
  const auto events = wedge::to_edge_events(sim.run_trace(30, 100000));

  DynamicGraph g = seed;
  const WindowStats stats = wedge::collect_window(g, events, 0, LearnOptions{.eps = 100.0});
  ASSERT_GT(stats.window_len, 0);

  // Replay the consumed prefix independently and recount.
  DynamicGraph replay = snapshot;
  for (int64_t i = 0; i < stats.window_len; ++i) {
    const EdgeEvent& ev = events[static_cast<size_t>(i)];
    if (ev.add)
      replay.add_edge(ev.u, ev.v);
    else
      replay.remove_edge(ev.u, ev.v);
  }
  int64_t additions = 0, deletions = 0;
  std::map<int64_t, int64_t> by_x;
  for (vertex_t u = 0; u < 25; ++u)
    for (vertex_t v = u + 1; v < 25; ++v) {
      const bool before = snapshot.has_edge(u, v);
      const bool after = replay.has_edge(u, v);
      if (!before && after) {
        ++additions;
        ++by_x[snapshot.common_degree(u, v)];
      }
      if (before && !after) ++deletions;
    }
  EXPECT_EQ(stats.additions, additions);
  EXPECT_EQ(stats.deletions, deletions);
  for (const auto& [x, c] : by_x) EXPECT_EQ(stats.additions_by_x.at(x), c);
  for (const auto& [x, c] : stats.additions_by_x) EXPECT_EQ(by_x[x], c);
}

}  // namespace
