#pragma once

#include <algorithm>
#include <vector>

#include "wedge/graph.hpp"
#include "wedge/peel.hpp"
#include "wedge/schedule.hpp"

namespace wedge {

// Triangle-density peeling: score = induced triangle count, threshold
// 3*alpha*(1+eps). Triangles at v inside the flagged set are enumerated as
// (v, a, b) with a, b adjacent, a < b, both flagged.
struct TriPeelPolicy {
  static constexpr const char* kName = "tridensity";

  static double threshold(double alpha, double eps) { return 3.0 * alpha * (1.0 + eps); }
  static double window_high(double alpha, double eps) { return 3.0 * alpha * (1.0 + eps) * (1.0 + eps); }
  static bool feasible(const DynamicGraph& g) { return g.num_triangles() > 0; }
  static double grid_top(const DynamicGraph& g) {
    const double n = static_cast<double>(g.num_vertices());
    return n * n;
  }
  static double grid_floor_start() { return 1.0 / 3.0; }
  static double grid_floor_min(double eps) { return 1.0 / (9.0 * (1.0 + eps)); }

  static int64_t induced_score(const DynamicGraph& g, vertex_t v, const std::vector<char>& in) {
    int64_t s = 0;
    for (vertex_t a : g.neighbors(v)) {
      if (!in[a]) continue;
      for (vertex_t b : g.neighbors(a))
        if (b > a && b != v && in[b] && g.has_edge(v, b)) ++s;
    }
    return s;
  }

  template <class Sink>
  static void on_removal(const DynamicGraph& g, vertex_t v, const std::vector<char>& in,
                         std::vector<int64_t>& score, Sink&& fell) {
    for (vertex_t a : g.neighbors(v)) {
      if (!in[a]) continue;
      for (vertex_t b : g.neighbors(a))
        if (b > a && b != v && in[b] && g.has_edge(v, b)) {
          fell(a, --score[a]);
          fell(b, --score[b]);
        }
    }
  }

  static void support_levels(const DynamicGraph& g, vertex_t v, const std::vector<int32_t>& levels,
                             std::vector<int32_t>& out) {
    out.clear();
    for (vertex_t a : g.neighbors(v))
      for (vertex_t b : g.neighbors(a))
        if (b > a && b != v && g.has_edge(v, b))
          out.push_back(std::min(levels[a], levels[b]));
  }

  // An edge flip at (u, v) changes triangle counts at u, v, and every
  // common neighbour; the edge is present in g at call time.
  static void seed_dirty(const DynamicGraph& g, vertex_t u, vertex_t v, std::vector<vertex_t>& out) {
    g.common_neighbors(u, v, out);  // clears and fills
    out.push_back(u);
    out.push_back(v);
  }

  static int64_t flip_numerator(const DynamicGraph& g, vertex_t u, vertex_t v, const std::vector<char>& in) {
    if (!in[u] || !in[v]) return 0;
    int64_t s = 0;
    const auto& nu = g.neighbors(u);
    const auto& nv = g.neighbors(v);
    const vertex_t a = nu.size() <= nv.size() ? u : v;
    const vertex_t b = a == u ? v : u;
    for (vertex_t w : g.neighbors(a))
      if (w != b && in[w] && g.has_edge(b, w)) ++s;
    return s;
  }

  static int64_t incident_numerator(const DynamicGraph& g, vertex_t v, const std::vector<char>& in) {
    return induced_score(g, v, in);
  }

  static int64_t candidate_numerator(const DynamicGraph::InducedStats& st) { return st.triangles; }

  static int64_t schedule_delta(const DynamicGraph& g, const ModelParams& params, double alpha, double eps,
                                int64_t max_batch) {
    return tri_rest_window(g, params, alpha, eps, max_batch).delta;
  }
};

using TriPeelEngine = PeelEngine<TriPeelPolicy>;

inline PeelResult static_tri_peel(const DynamicGraph& g, const std::vector<vertex_t>& s0, double alpha,
                                  double eps) {
  return static_peel<TriPeelPolicy>(g, s0, alpha, eps);
}

inline TriPeelEngine tri_grid_search(const DynamicGraph& g, double eps) {
  return grid_search<TriPeelPolicy>(g, eps);
}

inline RunResult tri_rest_and_run(DynamicGraph& g, const std::vector<EdgeEvent>& events, const RunOptions& opts) {
  return rest_and_run<TriPeelPolicy>(g, events, opts);
}

}  // namespace wedge
