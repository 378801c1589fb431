#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wedge/graph.hpp"
#include "wedge/rng.hpp"

namespace wedge {

struct ModelParams {
  double p = 0.0;  // close an open wedge
  double q = 0.0;  // drop a uniformly chosen present edge's pair
  double r = 0.0;  // connect a uniformly chosen absent pair

  void validate() const {
    for (double x : {p, q, r})
      if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("model parameters must lie in [0, 1]");
  }
};

struct Wedge {
  vertex_t mid = -1;
  vertex_t end_a = -1;
  vertex_t end_b = -1;
};

enum class EventKind { none, add, remove };

struct SimEvent {
  int64_t step = 0;  // step index counting no-ops
  EventKind kind = EventKind::none;
  vertex_t u = -1;
  vertex_t v = -1;
};

namespace detail {

// Fenwick tree over per-vertex weights; supports point set and sampling the
// cell containing a uniform draw from [0, total).
class WeightIndex {
 public:
  explicit WeightIndex(size_t n) : tree_(n + 1, 0), weight_(n, 0) {
    log2_ = 0;
    while ((size_t{1} << (log2_ + 1)) <= n) ++log2_;
  }

  void set(size_t i, int64_t w) {
    int64_t delta = w - weight_[i];
    weight_[i] = w;
    for (size_t j = i + 1; j < tree_.size(); j += j & (0 - j)) tree_[j] += delta;
  }

  int64_t total() const {
    int64_t sum = 0;
    for (size_t j = tree_.size() - 1; j > 0; j -= j & (0 - j)) sum += tree_[j];
    return sum;
  }

  int64_t weight(size_t i) const { return weight_[i]; }

  // Largest index whose prefix sum is <= x; x must be in [0, total()).
  size_t locate(int64_t x) const {
    size_t pos = 0;
    for (size_t step = size_t{1} << log2_; step > 0; step >>= 1)
      if (pos + step < tree_.size() && tree_[pos + step] <= x) {
        pos += step;
        x -= tree_[pos];
      }
    return pos;  // 0-based cell index
  }

 private:
  std::vector<int64_t> tree_;
  std::vector<int64_t> weight_;
  unsigned log2_;
};

inline int64_t choose2(int64_t d) { return d * (d - 1) / 2; }

}  // namespace detail

// One process over a borrowed graph. The simulator must be the only writer to
// the graph while alive: it keeps a weight index over per-vertex wedge counts
// that is patched after each of its own mutations.
class Simulator {
 public:
  Simulator(DynamicGraph& g, ModelParams params, Rng rng)
      : g_(g), params_(params), rng_(rng), weights_(static_cast<size_t>(g.num_vertices())) {
    params_.validate();
    if (g.num_vertices() < 2) throw std::invalid_argument("simulation needs at least two vertices");
    for (vertex_t v = 0; v < g_.num_vertices(); ++v)
      weights_.set(static_cast<size_t>(v), detail::choose2(g_.degree(v)));
  }

  const DynamicGraph& graph() const { return g_; }
  int64_t steps_taken() const { return step_; }

  // Uniform wedge: midpoint by weight C(d, 2), then two distinct neighbours.
  Wedge sample_wedge() {
    const int64_t total = weights_.total();
    if (total == 0) throw std::logic_error("graph has no wedges to sample");
    const auto mid = static_cast<vertex_t>(weights_.locate(static_cast<int64_t>(rng_.next_below(static_cast<uint64_t>(total)))));
    const auto& nbr = g_.neighbors(mid);
    const uint64_t d = nbr.size();
    const uint64_t i = rng_.next_below(d);
    uint64_t j = rng_.next_below(d - 1);
    if (j >= i) ++j;
    return {mid, nbr[i], nbr[j]};
  }

  // One step: fair coin between closing a sampled open wedge (probability p)
  // and flipping a uniform vertex pair (connect absent with probability r,
  // disconnect present with probability q).
  SimEvent step() {
    SimEvent ev;
    ev.step = step_++;
    if (rng_.next_bool()) {
      if (weights_.total() > 0) {
        const Wedge w = sample_wedge();
        if (!g_.has_edge(w.end_a, w.end_b) && rng_.bernoulli(params_.p)) {
          apply_add(w.end_a, w.end_b);
          ev.kind = EventKind::add;
          ev.u = w.end_a;
          ev.v = w.end_b;
        }
      }
    } else {
      const auto [u, v] = sample_pair();
      if (!g_.has_edge(u, v)) {
        if (rng_.bernoulli(params_.r)) {
          apply_add(u, v);
          ev.kind = EventKind::add;
          ev.u = u;
          ev.v = v;
        }
      } else if (rng_.bernoulli(params_.q)) {
        apply_remove(u, v);
        ev.kind = EventKind::remove;
        ev.u = u;
        ev.v = v;
      }
    }
    return ev;
  }

  // Runs until the given number of edge events (not steps) has been emitted,
  // or max_steps elapsed; returns the events in order.
  std::vector<SimEvent> run_trace(int64_t target_events, int64_t max_steps) {
    std::vector<SimEvent> events;
    events.reserve(static_cast<size_t>(target_events));
    for (int64_t s = 0; s < max_steps && static_cast<int64_t>(events.size()) < target_events; ++s) {
      const SimEvent ev = step();
      if (ev.kind != EventKind::none) events.push_back(ev);
    }
    return events;
  }

 private:
  std::pair<vertex_t, vertex_t> sample_pair() {
    const uint64_t n = static_cast<uint64_t>(g_.num_vertices());
    const auto u = static_cast<vertex_t>(rng_.next_below(n));
    auto v = static_cast<vertex_t>(rng_.next_below(n - 1));
    if (v >= u) ++v;
    return {u, v};
  }

  void apply_add(vertex_t u, vertex_t v) {
    g_.add_edge(u, v);
    refresh(u);
    refresh(v);
  }

  void apply_remove(vertex_t u, vertex_t v) {
    g_.remove_edge(u, v);
    refresh(u);
    refresh(v);
  }

  void refresh(vertex_t v) { weights_.set(static_cast<size_t>(v), detail::choose2(g_.degree(v))); }

  DynamicGraph& g_;
  ModelParams params_;
  Rng rng_;
  detail::WeightIndex weights_;
  int64_t step_ = 0;
};

}  // namespace wedge
