#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace wedge {

using vertex_t = int32_t;

enum class GraphErrc {
  bad_vertex,
  self_loop,
  duplicate_edge,
  missing_edge,
};

class GraphError : public std::invalid_argument {
 public:
  GraphError(GraphErrc code, const std::string& what)
      : std::invalid_argument(what), code_(code) {}
  GraphErrc code() const { return code_; }

 private:
  GraphErrc code_;
};

// Per-vertex statistics. wedge_ends = number of wedges having v as an
// endpoint, wedge_ends_sq = sum over u of (common neighbour count of u,v)^2.
struct VertexStats {
  int64_t degree = 0;
  int64_t tri_degree = 0;
  int64_t wedge_ends = 0;
  int64_t wedge_ends_sq = 0;
};

struct WedgeTotals {
  int64_t wedges = 0;       // sum over v of C(d(v), 2)
  int64_t open_wedges = 0;  // wedges - 3 * triangles
  int64_t triangles = 0;
};

// What a single edge flip changed, in post-update terms.
struct UpdateDelta {
  int64_t d_triangles = 0;
  int64_t d_wedges = 0;
  int64_t d_open_wedges = 0;
};

struct AuditReport {
  bool ok = true;
  std::vector<std::string> mismatches;
};

// Undirected simple graph over the fixed vertex set {0, ..., n-1}.
// Maintains wedge, open-wedge and per-vertex triangle counts incrementally;
// all counters are 64-bit (wedge counts overflow 32 bits on graphs well
// within reach of the tooling here).
class DynamicGraph {
 public:
  explicit DynamicGraph(vertex_t n) : adj_(static_cast<size_t>(n)), pos_(static_cast<size_t>(n)), tri_deg_(static_cast<size_t>(n), 0) {
    if (n < 0) throw GraphError(GraphErrc::bad_vertex, "vertex count must be nonnegative");
  }

  vertex_t num_vertices() const { return static_cast<vertex_t>(adj_.size()); }
  int64_t num_edges() const { return m_; }
  int64_t num_triangles() const { return triangles_; }

  int64_t degree(vertex_t v) const {
    check_vertex(v);
    return static_cast<int64_t>(adj_[v].size());
  }

  const std::vector<vertex_t>& neighbors(vertex_t v) const {
    check_vertex(v);
    return adj_[v];
  }

  bool has_edge(vertex_t u, vertex_t v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) return false;
    const auto& small = adj_[u].size() <= adj_[v].size() ? pos_[u] : pos_[v];
    const vertex_t other = adj_[u].size() <= adj_[v].size() ? v : u;
    return small.find(other) != small.end();
  }

  // Number of common neighbours of u and v; O(min degree) via hash lookups.
  int64_t common_degree(vertex_t u, vertex_t v) const {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw GraphError(GraphErrc::self_loop, "common_degree of a vertex with itself");
    vertex_t a = u, b = v;
    if (adj_[a].size() > adj_[b].size()) std::swap(a, b);
    int64_t count = 0;
    for (vertex_t w : adj_[a])
      if (w != b && pos_[b].count(w)) ++count;
    return count;
  }

  void common_neighbors(vertex_t u, vertex_t v, std::vector<vertex_t>& out) const {
    out.clear();
    vertex_t a = u, b = v;
    if (adj_[a].size() > adj_[b].size()) std::swap(a, b);
    for (vertex_t w : adj_[a])
      if (w != b && w != a && pos_[b].count(w)) out.push_back(w);
  }

  UpdateDelta add_edge(vertex_t u, vertex_t v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw GraphError(GraphErrc::self_loop, "self loops are not representable");
    if (has_edge(u, v)) throw GraphError(GraphErrc::duplicate_edge, "edge already present");

    const int64_t closed = common_degree(u, v);
    UpdateDelta delta;
    delta.d_triangles = closed;
    delta.d_wedges = degree(u) + degree(v);  // pre-insertion degrees
    delta.d_open_wedges = delta.d_wedges - 3 * closed;

    if (closed > 0) {
      common_neighbors(u, v, scratch_);
      for (vertex_t w : scratch_) ++tri_deg_[w];
    }
    tri_deg_[u] += closed;
    tri_deg_[v] += closed;
    link(u, v);
    link(v, u);
    ++m_;
    triangles_ += closed;
    wedges_ += delta.d_wedges;
    open_wedges_ += delta.d_open_wedges;
    return delta;
  }

  UpdateDelta remove_edge(vertex_t u, vertex_t v) {
    check_vertex(u);
    check_vertex(v);
    if (u == v) throw GraphError(GraphErrc::self_loop, "self loops are not representable");
    if (!has_edge(u, v)) throw GraphError(GraphErrc::missing_edge, "edge not present");

    const int64_t opened = common_degree(u, v);
    UpdateDelta delta;
    delta.d_triangles = -opened;
    delta.d_wedges = -(degree(u) + degree(v) - 2);  // pre-removal degrees
    delta.d_open_wedges = delta.d_wedges + 3 * opened;

    if (opened > 0) {
      common_neighbors(u, v, scratch_);
      for (vertex_t w : scratch_) --tri_deg_[w];
    }
    tri_deg_[u] -= opened;
    tri_deg_[v] -= opened;
    unlink(u, v);
    unlink(v, u);
    --m_;
    triangles_ -= opened;
    wedges_ += delta.d_wedges;
    open_wedges_ += delta.d_open_wedges;
    return delta;
  }

  WedgeTotals wedge_stats() const { return {wedges_, open_wedges_, triangles_}; }

  int64_t tri_degree(vertex_t v) const {
    check_vertex(v);
    return tri_deg_[v];
  }

  int64_t max_degree() const {
    int64_t best = 0;
    for (const auto& list : adj_) best = std::max<int64_t>(best, static_cast<int64_t>(list.size()));
    return best;
  }

  // Wedges with endpoint v: sum over neighbours u of (d(u) - 1). O(d(v)).
  int64_t wedge_ends(vertex_t v) const {
    check_vertex(v);
    int64_t total = 0;
    for (vertex_t u : adj_[v]) total += static_cast<int64_t>(adj_[u].size()) - 1;
    return total;
  }

  // Full per-vertex statistics; the squared term walks the two-hop
  // neighbourhood, so this costs O(sum of neighbour degrees).
  VertexStats vertex_stats(vertex_t v) const {
    check_vertex(v);
    VertexStats s;
    s.degree = degree(v);
    s.tri_degree = tri_deg_[v];
    std::unordered_map<vertex_t, int64_t> paths;
    for (vertex_t u : adj_[v])
      for (vertex_t w : adj_[u])
        if (w != v) ++paths[w];
    for (const auto& [w, c] : paths) {
      s.wedge_ends += c;
      s.wedge_ends_sq += c * c;
    }
    return s;
  }

  // Edge count, density and triangle density of the subgraph induced by the
  // given vertex set (duplicates in the set are rejected).
  struct InducedStats {
    int64_t vertices = 0;
    int64_t edges = 0;
    int64_t triangles = 0;
    double density = 0.0;      // edges / vertices
    double tri_density = 0.0;  // triangles / vertices
  };

  InducedStats induced_stats(const std::vector<vertex_t>& set) const {
    InducedStats st;
    std::vector<char> in(adj_.size(), 0);
    for (vertex_t v : set) {
      check_vertex(v);
      if (in[v]) throw GraphError(GraphErrc::bad_vertex, "duplicate vertex in induced set");
      in[v] = 1;
    }
    st.vertices = static_cast<int64_t>(set.size());
    for (vertex_t v : set)
      for (vertex_t u : adj_[v])
        if (in[u] && u > v) {
          ++st.edges;
          st.triangles += induced_common(v, u, in);
        }
    st.triangles /= 3;
    if (st.vertices > 0) {
      st.density = static_cast<double>(st.edges) / static_cast<double>(st.vertices);
      st.tri_density = static_cast<double>(st.triangles) / static_cast<double>(st.vertices);
    }
    return st;
  }

  // Recomputes every maintained counter from the adjacency lists and compares.
  AuditReport audit_recompute() const {
    AuditReport report;
    auto fail = [&](std::string msg) {
      report.ok = false;
      report.mismatches.push_back(std::move(msg));
    };

    int64_t m = 0, wedges = 0, triangles3 = 0;
    std::vector<int64_t> tri(adj_.size(), 0);
    for (vertex_t v = 0; v < num_vertices(); ++v) {
      const int64_t d = static_cast<int64_t>(adj_[v].size());
      m += d;
      wedges += d * (d - 1) / 2;
      if (pos_[v].size() != adj_[v].size()) fail("position index out of sync at vertex " + std::to_string(v));
      for (vertex_t u : adj_[v]) {
        if (u == v) fail("self loop stored at vertex " + std::to_string(v));
        if (!pos_[u].count(v)) fail("asymmetric edge " + std::to_string(v) + "-" + std::to_string(u));
        if (u > v) {
          const int64_t c = common_degree(v, u);
          triangles3 += c;
        }
      }
      std::unordered_map<vertex_t, int64_t> seen;
      for (vertex_t u : adj_[v]) {
        if (++seen[u] > 1) fail("parallel edge stored at vertex " + std::to_string(v));
        for (vertex_t w : adj_[u])
          if (w != v && pos_[v].count(w)) tri[v] += 1;
      }
      tri[v] /= 2;
    }
    m /= 2;
    const int64_t triangles = triangles3 / 3;
    if (m != m_) fail("edge count: stored " + std::to_string(m_) + ", recomputed " + std::to_string(m));
    if (wedges != wedges_) fail("wedge count: stored " + std::to_string(wedges_) + ", recomputed " + std::to_string(wedges));
    if (triangles != triangles_) fail("triangle count: stored " + std::to_string(triangles_) + ", recomputed " + std::to_string(triangles));
    if (open_wedges_ != wedges - 3 * triangles) fail("open wedge count: stored " + std::to_string(open_wedges_) + ", recomputed " + std::to_string(wedges - 3 * triangles));
    for (vertex_t v = 0; v < num_vertices(); ++v)
      if (tri[v] != tri_deg_[v]) fail("triangle degree at vertex " + std::to_string(v) + ": stored " + std::to_string(tri_deg_[v]) + ", recomputed " + std::to_string(tri[v]));
    return report;
  }

 private:
  void check_vertex(vertex_t v) const {
    if (v < 0 || static_cast<size_t>(v) >= adj_.size())
      throw GraphError(GraphErrc::bad_vertex, "vertex " + std::to_string(v) + " out of range");
  }

  int64_t induced_common(vertex_t u, vertex_t v, const std::vector<char>& in) const {
    vertex_t a = u, b = v;
    if (adj_[a].size() > adj_[b].size()) std::swap(a, b);
    int64_t count = 0;
    for (vertex_t w : adj_[a])
      if (in[w] && w != b && pos_[b].count(w)) ++count;
    return count;
  }

  void link(vertex_t u, vertex_t v) {
    pos_[u].emplace(v, static_cast<uint32_t>(adj_[u].size()));
    adj_[u].push_back(v);
  }

  void unlink(vertex_t u, vertex_t v) {
    const uint32_t at = pos_[u].at(v);
    const vertex_t last = adj_[u].back();
    adj_[u][at] = last;
    pos_[u][last] = at;
    adj_[u].pop_back();
    pos_[u].erase(v);
  }

  std::vector<std::vector<vertex_t>> adj_;
  std::vector<std::unordered_map<vertex_t, uint32_t>> pos_;
  std::vector<int64_t> tri_deg_;
  int64_t m_ = 0;
  int64_t wedges_ = 0;
  int64_t open_wedges_ = 0;
  int64_t triangles_ = 0;
  mutable std::vector<vertex_t> scratch_;
};

}  // namespace wedge
