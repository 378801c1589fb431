#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wedge/graph.hpp"
#include "wedge/sim.hpp"

namespace wedge {

inline constexpr int64_t kDefaultMaxBatch = 1'000'000;

// Expected per-step growth rate of d(v): wedge closures pull in v through
// the wedges it terminates, uniform insertions through r.
inline double vertex_rate(const DynamicGraph& g, const ModelParams& params, vertex_t v) {
  const int64_t wedges = g.wedge_stats().wedges;
  const double n = static_cast<double>(g.num_vertices());
  double rate = params.r / n;
  if (wedges > 0)
    rate += 2.0 * params.p * static_cast<double>(g.wedge_ends(v)) / static_cast<double>(wedges);
  return rate;
}

struct RestWindow {
  int64_t delta = 1;          // batch size: floor of the tightest vertex budget
  double cap = 0.0;           // ceiling keeping per-pair growth geometric
  double budget = 0.0;        // allowed expected degree gain per vertex
  std::vector<double> tau;    // per-vertex step allowances
};

// Longest stretch of steps no vertex is expected to outgrow beta*(1+eps).
inline RestWindow rest_window(const DynamicGraph& g, const ModelParams& params, double beta, double eps,
                              int64_t max_batch = kDefaultMaxBatch) {
  const int64_t n = g.num_vertices();
  const int64_t wedges = g.wedge_stats().wedges;
  const int64_t d_max = g.max_degree();
  RestWindow w;
  w.budget = beta * (1.0 + eps);
  const double cap_raw = (params.p > 0.0 && d_max > 0 && wedges > 0)
                             ? std::exp(1.0) * static_cast<double>(wedges) / (2.0 * params.p * static_cast<double>(d_max))
                             : static_cast<double>(max_batch);
  w.cap = std::min(cap_raw, static_cast<double>(max_batch));
  w.tau.resize(static_cast<size_t>(n));
  double tightest = w.cap;
  for (vertex_t v = 0; v < n; ++v) {
    const double rate = vertex_rate(g, params, v);
    const double allowance = rate > 0.0 ? w.budget / rate : static_cast<double>(max_batch);
    w.tau[static_cast<size_t>(v)] = std::min(w.cap, allowance);
    tightest = std::min(tightest, w.tau[static_cast<size_t>(v)]);
  }
  w.delta = std::clamp(static_cast<int64_t>(std::floor(tightest)), int64_t{1}, max_batch);
  return w;
}

// Expected tri-degree gain of v over delta steps, in terms of the seed
// graph's statistics. Monotone in delta, which the window search relies on.
inline double tri_growth_rhs(int64_t delta, const VertexStats& vs, int64_t wedges, double d_avg, double n,
                             const ModelParams& params) {
  const double d = static_cast<double>(delta);
  double total = static_cast<double>(vs.degree) * static_cast<double>(vs.degree) * (d + d * d / n) / (n * n);
  if (vs.wedge_ends_sq > 0 && wedges > 0) {
    const double gw = static_cast<double>(wedges);
    const double factor = 1.0 + 8.0 * d * params.p / d_avg + 6.0 * d * d * params.p * params.p / gw;
    total += d * static_cast<double>(vs.wedge_ends_sq) * params.p / gw * factor;
  }
  return total;
}

// Longest stretch of steps no vertex is expected to gain more than
// alpha*(1+eps) triangles. Per vertex this is the largest integer delta under
// the model's validity ceiling whose growth estimate stays in budget, found
// by binary search on the monotone estimate.
inline RestWindow tri_rest_window(const DynamicGraph& g, const ModelParams& params, double alpha, double eps,
                                  int64_t max_batch = kDefaultMaxBatch) {
  const int64_t n = g.num_vertices();
  const int64_t m = g.num_edges();
  const int64_t wedges = g.wedge_stats().wedges;
  const int64_t d_max = g.max_degree();
  const double d_avg = m > 0 ? 2.0 * static_cast<double>(m) / static_cast<double>(n) : 0.0;
  RestWindow w;
  w.budget = alpha * (1.0 + eps);
  const double cap_raw = params.p > 0.0 ? std::exp(1.0) * static_cast<double>(d_max) / (2.0 * params.p)
                                        : static_cast<double>(max_batch);
  w.cap = std::min(cap_raw, static_cast<double>(max_batch));
  w.tau.resize(static_cast<size_t>(n));
  const auto hi_limit = static_cast<int64_t>(std::floor(w.cap));
  double tightest = w.cap;
  for (vertex_t v = 0; v < n; ++v) {
    const VertexStats vs = g.vertex_stats(v);
    int64_t lo = 0, hi = hi_limit;
    while (lo < hi) {
      const int64_t mid = lo + (hi - lo + 1) / 2;
      if (tri_growth_rhs(mid, vs, wedges, d_avg, static_cast<double>(n), params) <= w.budget)
        lo = mid;
      else
        hi = mid - 1;
    }
    w.tau[static_cast<size_t>(v)] = static_cast<double>(lo);
    tightest = std::min(tightest, w.tau[static_cast<size_t>(v)]);
  }
  w.delta = std::clamp(static_cast<int64_t>(std::floor(tightest)), int64_t{1}, max_batch);
  return w;
}

enum class GrowthKind { pair_common, degree, tri_degree };

struct GrowthRow {
  std::string scenario;
  int64_t delta = 0;
  double empirical_mean = 0.0;
  double bound = 0.0;
  double std_error = 0.0;
  bool violated = false;
};

struct GrowthReport {
  std::vector<GrowthRow> rows;
  std::vector<std::string> warnings;
  bool any_violation = false;
};

// Monte-Carlo check of the growth estimates: rerun the process `trials`
// times for `delta` steps from the same seed graph and compare the mean
// growth of each target against its predicted ceiling. A target is violated
// only beyond three standard errors. The delta must sit inside the window
// where the corresponding estimate is claimed, and the hypotheses the
// estimates lean on (small r, small q) are surfaced as warnings, not errors.
inline GrowthReport verify_growth_bound(const DynamicGraph& g, const ModelParams& params, int64_t delta,
                                        int64_t trials, GrowthKind kind, Rng rng,
                                        const std::vector<std::pair<vertex_t, vertex_t>>& pairs = {},
                                        const std::vector<vertex_t>& vertices = {}) {
  if (delta <= 0 || trials <= 0) throw std::invalid_argument("delta and trials must be positive");
  const int64_t n = g.num_vertices();
  const int64_t m = g.num_edges();
  const int64_t wedges = g.wedge_stats().wedges;
  const int64_t d_max = g.max_degree();

  GrowthReport report;
  if (kind == GrowthKind::tri_degree) {
    if (params.p > 0.0 &&
        static_cast<double>(delta) > std::exp(1.0) * static_cast<double>(d_max) / (2.0 * params.p))
      throw std::invalid_argument("delta outside the tri-degree estimate's validity window");
  } else {
    if (params.p > 0.0 && d_max > 0 && wedges > 0 &&
        static_cast<double>(delta) > std::exp(1.0) * static_cast<double>(wedges) / (2.0 * params.p * static_cast<double>(d_max)))
      throw std::invalid_argument("delta outside the growth estimate's validity window");
    if (kind == GrowthKind::pair_common && wedges == 0)
      throw std::invalid_argument("pair growth estimate needs at least one wedge");
  }
  if (kind == GrowthKind::pair_common && wedges > 0 &&
      params.r * static_cast<double>(wedges) > params.p * static_cast<double>(n) * static_cast<double>(n))
    report.warnings.push_back("r exceeds p*n^2/wedges; the pair growth estimate assumes otherwise");
  if (d_max > 0 && params.q * static_cast<double>(d_max) > 0.1 * params.p)
    report.warnings.push_back("q is not small against p/d_max; growth estimates assume rare deletions");

  struct Target {
    std::string label;
    vertex_t u = -1, v = -1;
    double bound = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<Target> targets;
  const double d_avg = m > 0 ? 2.0 * static_cast<double>(m) / static_cast<double>(n) : 0.0;
  if (kind == GrowthKind::pair_common) {
    for (const auto& [u, v] : pairs) {
      Target t;
      t.label = "pair:" + std::to_string(u) + "-" + std::to_string(v);
      t.u = u;
      t.v = v;
      t.bound = 4.0 * static_cast<double>(delta) * static_cast<double>(g.degree(u)) *
                static_cast<double>(g.degree(v)) / static_cast<double>(wedges);
      targets.push_back(std::move(t));
    }
  } else {
    for (vertex_t v : vertices) {
      Target t;
      t.u = v;
      if (kind == GrowthKind::degree) {
        t.label = "deg:" + std::to_string(v);
        t.bound = static_cast<double>(delta) * vertex_rate(g, params, v);
      } else {
        t.label = "tri:" + std::to_string(v);
        t.bound = tri_growth_rhs(delta, g.vertex_stats(v), wedges, d_avg, static_cast<double>(n), params);
      }
      targets.push_back(std::move(t));
    }
  }
  if (targets.empty()) throw std::invalid_argument("no targets given for growth verification");

  for (int64_t trial = 0; trial < trials; ++trial) {
    DynamicGraph work = g;
    Simulator sim(work, params, rng.split());
    for (int64_t s = 0; s < delta; ++s) sim.step();
    for (Target& t : targets) {
      double grown = 0.0;
      if (kind == GrowthKind::pair_common)
        grown = static_cast<double>(work.common_degree(t.u, t.v) - g.common_degree(t.u, t.v));
      else if (kind == GrowthKind::degree)
        grown = static_cast<double>(work.degree(t.u) - g.degree(t.u));
      else
        grown = static_cast<double>(work.tri_degree(t.u) - g.tri_degree(t.u));
      t.sum += grown;
      t.sum_sq += grown * grown;
    }
  }

  for (const Target& t : targets) {
    GrowthRow row;
    row.scenario = t.label;
    row.delta = delta;
    const double tn = static_cast<double>(trials);
    row.empirical_mean = t.sum / tn;
    const double var = std::max(0.0, t.sum_sq / tn - row.empirical_mean * row.empirical_mean);
    row.std_error = std::sqrt(var / tn);
    row.bound = t.bound;
    row.violated = row.empirical_mean > row.bound + 3.0 * row.std_error;
    report.any_violation = report.any_violation || row.violated;
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace wedge
