#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"

namespace wedge {

struct LearnOptions {
  double eps = 0.1;             // drift tolerance for the observation window
  int monitor_buckets = 16;     // most-populated histogram cells watched for drift
  int64_t support_floor = 5;    // minimum N0(x) for a regression point
  double accept_threshold = 0.6;  // minimum R^2 to trust the fit
};

// Everything measured over one observation window. Histograms are keyed by
// the common-neighbour count a pair had when the window opened.
struct WindowStats {
  int64_t n = 0;
  int64_t m0 = 0;
  int64_t wedges0 = 0;
  int64_t open_wedges0 = 0;
  std::map<int64_t, int64_t> disconnected_by_x;  // N0: disconnected pairs per x
  std::map<int64_t, int64_t> additions_by_x;     // f: new edges per window-start x
  int64_t additions = 0;                         // |E_end \ E_start|
  int64_t deletions = 0;                         // |E_start \ E_end|
  int64_t window_len = 0;                        // events consumed
  int64_t t_span = 0;                            // timestamps covered by those events
  std::string stop_reason;

  int64_t pair_count() const { return n * (n - 1) / 2; }
};

struct RegressionFit {
  bool ok = false;
  double a = 0.0;  // slope
  double b = 0.0;  // intercept
  double r2 = 0.0;
  int64_t points = 0;
};

struct LearnedParams {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double M = 0.0;        // per-pair exposure: half the window's step span
  double r2 = 0.0;
  double q_ratio = std::numeric_limits<double>::infinity();  // lower bound on p/q
  int64_t window_len = 0;
  bool accepted = false;
};

namespace detail {

inline uint64_t pair_key(vertex_t u, vertex_t v) {
  if (u > v) std::swap(u, v);
  return (static_cast<uint64_t>(static_cast<uint32_t>(u)) << 32) | static_cast<uint32_t>(v);
}

// Live histogram of disconnected pairs keyed by common-neighbour count.
// Kept exact under edge flips; each flip touches the pairs through the two
// endpoints' neighbourhoods, nothing else.
class PairHistogram {
 public:
  void init(const DynamicGraph& g) {
    counts_.clear();
    const int64_t n = g.num_vertices();
    int64_t reachable = 0;
    for (vertex_t u = 0; u < n; ++u) {
      two_hop_.clear();
      for (vertex_t w : g.neighbors(u))
        for (vertex_t x : g.neighbors(w))
          if (x > u) ++two_hop_[x];
      for (const auto& [x, c] : two_hop_)
        if (!g.has_edge(u, x)) {
          ++counts_[c];
          ++reachable;
        }
    }
    counts_[0] = n * (n - 1) / 2 - g.num_edges() - reachable;
  }

  // Call right after g.add_edge(u, v).
  void on_add(const DynamicGraph& g, vertex_t u, vertex_t v) {
    shift(-1, g.common_degree(u, v));  // the pair itself left the pool
    bump(g, u, v, +1);
    bump(g, v, u, +1);
  }

  // Call right after g.remove_edge(u, v).
  void on_remove(const DynamicGraph& g, vertex_t u, vertex_t v) {
    bump(g, u, v, -1);
    bump(g, v, u, -1);
    shift(+1, g.common_degree(u, v));  // the pair itself joined the pool
  }

  int64_t count(int64_t x) const {
    auto it = counts_.find(x);
    return it == counts_.end() ? 0 : it->second;
  }

  const std::unordered_map<int64_t, int64_t>& counts() const { return counts_; }

 private:
  // Pairs (anchor, w) for w adjacent to the other endpoint changed their
  // common count by step; move each disconnected one between cells.
  void bump(const DynamicGraph& g, vertex_t anchor, vertex_t other, int64_t step) {
    for (vertex_t w : g.neighbors(other)) {
      if (w == anchor) continue;
      if (g.has_edge(anchor, w)) continue;
      const int64_t now = g.common_degree(anchor, w);
      --counts_[now - step];
      ++counts_[now];
    }
  }

  void shift(int64_t delta, int64_t x) { counts_[x] += delta; }

  std::unordered_map<int64_t, int64_t> counts_;
  std::unordered_map<vertex_t, int64_t> two_hop_;
};

}  // namespace detail

// Consumes events from the given cursor, advancing g, until the graph drifts
// away from its window-start profile or the event budget |E_0| runs out.
// Drift means: the open-wedge share moved by more than (1 + eps), or one of
// the watched histogram cells did. Watching every cell on every event would
// cost too much, so only the most populated cells are checked.
inline WindowStats collect_window(DynamicGraph& g, const std::vector<EdgeEvent>& events, size_t cursor,
                                  const LearnOptions& opts) {
  WindowStats stats;
  stats.n = g.num_vertices();
  stats.m0 = g.num_edges();
  const WedgeTotals totals0 = g.wedge_stats();
  stats.wedges0 = totals0.wedges;
  stats.open_wedges0 = totals0.open_wedges;

  detail::PairHistogram hist;
  hist.init(g);
  for (const auto& [x, c] : hist.counts())
    if (c > 0) stats.disconnected_by_x[x] = c;

  // Pick the watched cells and their allowed bands.
  std::vector<std::pair<int64_t, int64_t>> by_count(stats.disconnected_by_x.begin(), stats.disconnected_by_x.end());
  std::sort(by_count.begin(), by_count.end(),
            [](const auto& a, const auto& b) { return a.second > b.second || (a.second == b.second && a.first < b.first); });
  if (static_cast<int>(by_count.size()) > opts.monitor_buckets) by_count.resize(static_cast<size_t>(opts.monitor_buckets));

  const DynamicGraph snapshot = g;
  const bool track_ratio = stats.wedges0 > 0 && stats.open_wedges0 > 0;
  const double ratio0 = track_ratio ? static_cast<double>(stats.open_wedges0) / static_cast<double>(stats.wedges0) : 0.0;
  const double band = 1.0 + opts.eps;

  std::unordered_map<uint64_t, char> touched;
  stats.stop_reason.clear();
  while (stats.window_len < stats.m0 && cursor + static_cast<size_t>(stats.window_len) < events.size()) {
    const EdgeEvent& ev = events[cursor + static_cast<size_t>(stats.window_len)];
    if (ev.add) {
      g.add_edge(ev.u, ev.v);
      hist.on_add(g, ev.u, ev.v);
    } else {
      g.remove_edge(ev.u, ev.v);
      hist.on_remove(g, ev.u, ev.v);
    }
    touched.emplace(detail::pair_key(ev.u, ev.v), 1);
    ++stats.window_len;

    if (track_ratio) {
      const WedgeTotals now = g.wedge_stats();
      const double ratio = now.wedges > 0 ? static_cast<double>(now.open_wedges) / static_cast<double>(now.wedges) : 0.0;
      if (ratio * band < ratio0 || ratio > ratio0 * band) {
        stats.stop_reason = "wedge ratio drift";
        break;
      }
    }
    bool bucket_drift = false;
    for (const auto& [x, base] : by_count) {
      const int64_t live = hist.count(x);
      if (static_cast<double>(live) * band < static_cast<double>(base) ||
          static_cast<double>(live) > static_cast<double>(base) * band) {
        bucket_drift = true;
        break;
      }
    }
    if (bucket_drift) {
      stats.stop_reason = "histogram drift";
      break;
    }
  }
  if (stats.stop_reason.empty())
    stats.stop_reason = stats.window_len == stats.m0 ? "event budget" : "stream end";
  if (stats.window_len > 0)
    stats.t_span = events[cursor + static_cast<size_t>(stats.window_len) - 1].t - events[cursor].t + 1;

  // Net comparison start vs end; re-adds and re-removes cancel out here.
  for (const auto& [key, unused] : touched) {
    (void)unused;
    const auto u = static_cast<vertex_t>(key >> 32);
    const auto v = static_cast<vertex_t>(key & 0xffffffffu);
    const bool before = snapshot.has_edge(u, v);
    const bool after = g.has_edge(u, v);
    if (!before && after) {
      ++stats.additions;
      ++stats.additions_by_x[snapshot.common_degree(u, v)];
    } else if (before && !after) {
      ++stats.deletions;
    }
  }
  return stats;
}

// Ordinary least squares of f(x)/N0(x) against x over the cells with enough
// support; the floor keeps cells too thin to average anything meaningful out
// of the fit. A constant response fits a horizontal line exactly but carries
// no slope information, so that case reports R^2 = 0.
inline RegressionFit fit_line(const WindowStats& stats, const LearnOptions& opts) {
  RegressionFit fit;
  std::vector<double> xs, ys;
  for (const auto& [x, n0] : stats.disconnected_by_x) {
    if (n0 < opts.support_floor) continue;
    auto it = stats.additions_by_x.find(x);
    const int64_t fx = it == stats.additions_by_x.end() ? 0 : it->second;
    xs.push_back(static_cast<double>(x));
    ys.push_back(static_cast<double>(fx) / static_cast<double>(n0));
  }
  fit.points = static_cast<int64_t>(xs.size());
  if (xs.size() < 2) return fit;

  double sx = 0, sy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
  }
  const double mx = sx / static_cast<double>(xs.size());
  const double my = sy / static_cast<double>(ys.size());
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  fit.ok = true;
  fit.a = sxy / sxx;
  fit.b = my - fit.a * mx;
  if (syy <= 0.0) {
    fit.r2 = 0.0;
    return fit;
  }
  double ss_res = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (fit.a * xs[i] + fit.b);
    ss_res += e * e;
  }
  fit.r2 = 1.0 - ss_res / syy;
  return fit;
}

// Lower bound on p/q implied by the add/delete balance of the window;
// infinite when the window saw no deletions.
inline double q_ratio_bound(const WindowStats& stats) {
  if (stats.open_wedges0 == 0)
    throw std::invalid_argument("p/q bound needs open wedges at window start");
  if (stats.deletions == 0 || stats.additions == 0)
    return std::numeric_limits<double>::infinity();
  return (static_cast<double>(stats.additions) / static_cast<double>(stats.deletions)) *
         (static_cast<double>(stats.wedges0) / static_cast<double>(stats.open_wedges0)) *
         (static_cast<double>(stats.m0) / static_cast<double>(stats.pair_count()));
}

// Closed-form inversion of the fitted line. Over a window spanning t_span
// timestamps, a still-disconnected pair with x common neighbours connects
// with probability close to M*(p*x/wedges + r/pairs) where M = t_span/2:
// each step flips a fair coin between the wedge rule and the uniform rule,
// so only half the steps expose the pair to each term. Dividing M out of
// the slope and intercept returns p and r.
inline LearnedParams invert_params(const RegressionFit& fit, const WindowStats& stats, const LearnOptions& opts) {
  if (!fit.ok) throw std::invalid_argument("invert_params needs a usable fit");
  if (stats.additions <= 0) throw std::invalid_argument("invert_params needs at least one addition");
  LearnedParams out;
  out.r2 = fit.r2;
  out.window_len = stats.window_len;

  const double a = std::max(fit.a, 0.0);
  const double b = std::max(fit.b, 0.0);
  const double pairs = static_cast<double>(stats.pair_count());
  out.M = 0.5 * static_cast<double>(std::max<int64_t>(1, stats.t_span));
  out.p = std::clamp(a * static_cast<double>(stats.wedges0) / out.M, 0.0, 1.0);
  out.r = std::clamp(b * pairs / out.M, 0.0, 1.0);
  out.q_ratio = stats.open_wedges0 > 0 ? q_ratio_bound(stats) : std::numeric_limits<double>::infinity();
  out.q = std::isfinite(out.q_ratio) && out.q_ratio > 0 ? std::min(1.0, out.p / out.q_ratio) : 0.0;
  out.accepted = out.M > 0 && fit.r2 >= opts.accept_threshold;
  return out;
}

}  // namespace wedge
