#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "wedge/graph.hpp"

namespace wedge {

// Exact nonnegative rational. Every density handled here has denominator at
// most n(n-1), well inside 64 bits for any graph the oracle accepts.
struct Rational {
  int64_t num = 0;
  int64_t den = 1;

  Rational() = default;
  Rational(int64_t n, int64_t d) : num(n), den(d) {
    if (d <= 0) throw std::invalid_argument("rational denominator must be positive");
    reduce();
  }

  void reduce() {
    const int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) { return a < b || a == b; }
};

enum class OracleMethod { flow, bruteforce };

struct OracleResult {
  std::vector<vertex_t> subset;
  Rational value;
  OracleMethod method = OracleMethod::bruteforce;
};

namespace detail {

// Dinic max-flow on 64-bit integer capacities.
class MaxFlow {
 public:
  explicit MaxFlow(int n) : head_(n, -1), level_(n), it_(n) {}

  void add_arc(int from, int to, int64_t cap) {
    arcs_.push_back({to, head_[from], cap});
    head_[from] = static_cast<int>(arcs_.size()) - 1;
    arcs_.push_back({from, head_[to], 0});
    head_[to] = static_cast<int>(arcs_.size()) - 1;
  }

  int64_t run(int s, int t) {
    int64_t flow = 0;
    while (bfs(s, t)) {
      it_ = head_;
      int64_t pushed;
      while ((pushed = dfs(s, t, std::numeric_limits<int64_t>::max())) > 0) flow += pushed;
    }
    return flow;
  }

  // Source side of the min cut after run(); valid once run() has returned.
  std::vector<char> source_side(int s) const {
    std::vector<char> seen(head_.size(), 0);
    std::queue<int> q;
    q.push(s);
    seen[s] = 1;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e = head_[v]; e != -1; e = arcs_[e].next)
        if (arcs_[e].cap > 0 && !seen[arcs_[e].to]) {
          seen[arcs_[e].to] = 1;
          q.push(arcs_[e].to);
        }
    }
    return seen;
  }

 private:
  struct Arc {
    int to;
    int next;
    int64_t cap;
  };

  bool bfs(int s, int t) {
    std::fill(level_.begin(), level_.end(), -1);
    std::queue<int> q;
    q.push(s);
    level_[s] = 0;
    while (!q.empty()) {
      const int v = q.front();
      q.pop();
      for (int e = head_[v]; e != -1; e = arcs_[e].next)
        if (arcs_[e].cap > 0 && level_[arcs_[e].to] < 0) {
          level_[arcs_[e].to] = level_[v] + 1;
          q.push(arcs_[e].to);
        }
    }
    return level_[t] >= 0;
  }

  int64_t dfs(int v, int t, int64_t budget) {
    if (v == t) return budget;
    for (int& e = it_[v]; e != -1; e = arcs_[e].next) {
      Arc& arc = arcs_[e];
      if (arc.cap > 0 && level_[arc.to] == level_[v] + 1) {
        const int64_t pushed = dfs(arc.to, t, std::min(budget, arc.cap));
        if (pushed > 0) {
          arc.cap -= pushed;
          arcs_[e ^ 1].cap += pushed;
          return pushed;
        }
      }
    }
    return 0;
  }

  std::vector<Arc> arcs_;
  std::vector<int> head_;
  std::vector<int> level_;
  std::vector<int> it_;
};

inline std::vector<std::pair<vertex_t, vertex_t>> edge_list(const DynamicGraph& g) {
  std::vector<std::pair<vertex_t, vertex_t>> edges;
  edges.reserve(static_cast<size_t>(g.num_edges()));
  for (vertex_t v = 0; v < g.num_vertices(); ++v)
    for (vertex_t u : g.neighbors(v))
      if (u > v) edges.emplace_back(v, u);
  return edges;
}

// Is some nonempty subset denser than num/den? If so, fills witness with one
// such subset (the min-cut source side). A cut keeping S on the source side
// costs m*n + 2*(g|S| - e(S)) before scaling, so the flow dips below m*n
// exactly when a subset beats the guess.
inline bool denser_than(const DynamicGraph& g, const std::vector<std::pair<vertex_t, vertex_t>>& edges,
                        int64_t num, int64_t den, std::vector<vertex_t>& witness) {
  const int n = g.num_vertices();
  const int64_t m = g.num_edges();
  const int s = n, t = n + 1;
  MaxFlow net(n + 2);
  for (int v = 0; v < n; ++v) {
    net.add_arc(s, v, m * den);
    net.add_arc(v, t, m * den + 2 * num - g.degree(v) * den);
  }
  for (const auto& [u, v] : edges) {
    net.add_arc(u, v, den);
    net.add_arc(v, u, den);
  }
  const int64_t flow = net.run(s, t);
  if (flow >= m * static_cast<int64_t>(n) * den) return false;
  const std::vector<char> side = net.source_side(s);
  witness.clear();
  for (int v = 0; v < n; ++v)
    if (side[v]) witness.push_back(v);
  return !witness.empty();
}

}  // namespace detail

// Maximum subgraph density e(S)/|S|, exact. Binary search over guesses c/D
// with D = n(n-1); distinct achievable densities are at least 1/D apart, so
// once the bracket narrows to one grid step the last witness is optimal.
// Requires at least one edge.
inline OracleResult densest_exact(const DynamicGraph& g) {
  const int64_t n = g.num_vertices();
  const int64_t m = g.num_edges();
  if (m == 0) throw std::invalid_argument("densest_exact requires at least one edge");
  const int64_t den = n * (n - 1);
  if (m > std::numeric_limits<int64_t>::max() / 8 / den / n)
    throw std::invalid_argument("graph too large for the exact oracle's integer capacities");
  const auto edges = detail::edge_list(g);

  int64_t lo = 0;          // feasible: some subset is denser than lo/den
  int64_t hi = n * den;    // infeasible: density never exceeds (n-1)/2
  std::vector<vertex_t> witness;
  if (!detail::denser_than(g, edges, lo, den, witness))
    throw std::logic_error("flow disagrees with nonzero edge count");
  while (hi - lo > 1) {
    const int64_t mid = lo + (hi - lo) / 2;
    std::vector<vertex_t> cut;
    if (detail::denser_than(g, edges, mid, den, cut)) {
      lo = mid;
      witness = std::move(cut);
    } else {
      hi = mid;
    }
  }
  OracleResult result;
  result.subset = std::move(witness);
  std::sort(result.subset.begin(), result.subset.end());
  const auto st = g.induced_stats(result.subset);
  result.value = Rational(st.edges, st.vertices);
  result.method = OracleMethod::flow;
  return result;
}

namespace detail {

// Shared subset scan. score(mask) returns the numerator (edges or triangles);
// ties prefer more vertices, then the lexicographically smaller vertex set,
// which over these masks is the smaller mask value.
template <class Score>
OracleResult best_subset(int n, Score&& score) {
  uint32_t best_mask = 0;
  int64_t best_num = -1, best_size = 0;
  const uint32_t limit = static_cast<uint32_t>(1u << n);
  for (uint32_t mask = 1; mask < limit; ++mask) {
    const int64_t num = score(mask);
    const int64_t size = __builtin_popcount(mask);
    if (best_num < 0) {
      best_mask = mask;
      best_num = num;
      best_size = size;
      continue;
    }
    const int64_t lhs = num * best_size, rhs = best_num * size;
    if (lhs > rhs || (lhs == rhs && (size > best_size || (size == best_size && mask < best_mask)))) {
      best_mask = mask;
      best_num = num;
      best_size = size;
    }
  }
  OracleResult result;
  for (int v = 0; v < n; ++v)
    if (best_mask & (1u << v)) result.subset.push_back(v);
  result.value = Rational(best_num, best_size);
  return result;
}

}  // namespace detail

// Exhaustive densest subgraph; a reference implementation, so the vertex
// count is capped hard.
inline OracleResult densest_bruteforce(const DynamicGraph& g) {
  const int n = g.num_vertices();
  if (n > 20) throw std::invalid_argument("densest_bruteforce is capped at 20 vertices");
  if (g.num_edges() == 0) throw std::invalid_argument("densest_bruteforce requires at least one edge");
  std::vector<uint32_t> adj(n, 0);
  for (vertex_t v = 0; v < n; ++v)
    for (vertex_t u : g.neighbors(v)) adj[v] |= 1u << u;
  return detail::best_subset(n, [&](uint32_t mask) {
    int64_t twice_edges = 0;
    for (int v = 0; v < n; ++v)
      if (mask & (1u << v)) twice_edges += __builtin_popcount(adj[v] & mask);
    return twice_edges / 2;
  });
}

// Exhaustive maximum triangle density t(S)/|S|.
inline OracleResult tridensest_bruteforce(const DynamicGraph& g) {
  const int n = g.num_vertices();
  if (n > 16) throw std::invalid_argument("tridensest_bruteforce is capped at 16 vertices");
  if (g.wedge_stats().triangles == 0) throw std::invalid_argument("tridensest_bruteforce requires at least one triangle");
  std::vector<uint32_t> tris;
  for (vertex_t v = 0; v < n; ++v)
    for (vertex_t u : g.neighbors(v)) {
      if (u <= v) continue;
      for (vertex_t w : g.neighbors(u))
        if (w > u && g.has_edge(v, w)) tris.push_back((1u << v) | (1u << u) | (1u << w));
    }
  return detail::best_subset(n, [&](uint32_t mask) {
    int64_t count = 0;
    for (uint32_t t : tris)
      if ((t & mask) == t) ++count;
    return count;
  });
}

}  // namespace wedge
