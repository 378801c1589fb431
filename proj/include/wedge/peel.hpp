#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/learn.hpp"
#include "wedge/schedule.hpp"

namespace wedge {

namespace detail {

// Smallest integer score that meets a real threshold; equality stays in.
inline int64_t survive_count(double threshold) {
  const double r = std::round(threshold);
  if (std::abs(threshold - r) < 1e-9) return static_cast<int64_t>(r);
  return static_cast<int64_t>(std::ceil(threshold));
}

}  // namespace detail

// Iterated threshold peeling. Each round simultaneously removes every vertex
// whose induced score (degree here, triangle count in the tri variant) falls
// below the threshold; a vertex's level is the round that removed it, and
// fixed-point survivors share the top level (cap). The level function is the
// unique solution of
//     level(v) = min(cap, 1 + Kth-largest support level at v)
// with K the integer form of the threshold, which is what the static builder
// and the incremental repair both compute.
struct PeelResult {
  std::vector<int32_t> levels;  // -1 outside the peeled set
  std::vector<int64_t> layer_sizes;
  bool survived = false;
  std::vector<vertex_t> candidate;  // survivors, or the last nonempty layer
  int32_t cap = 0;
  int64_t rounds = 0;
};

// Density peeling: score = induced degree, threshold 2*beta*(1+eps).
struct EdgePeelPolicy {
  static constexpr const char* kName = "density";

  static double threshold(double beta, double eps) { return 2.0 * beta * (1.0 + eps); }
  static double window_high(double beta, double eps) { return 2.0 * beta * (1.0 + eps) * (1.0 + eps); }
  static bool feasible(const DynamicGraph& g) { return g.num_edges() > 0; }
  static double grid_top(const DynamicGraph& g) { return static_cast<double>(g.num_vertices()); }
  static double grid_floor_start() { return 0.5; }
  static double grid_floor_min(double eps) { return 0.25 / (1.0 + eps); }

  static int64_t induced_score(const DynamicGraph& g, vertex_t v, const std::vector<char>& in) {
    int64_t s = 0;
    for (vertex_t u : g.neighbors(v)) s += in[u];
    return s;
  }

  // v has just been dropped (in[v] already cleared); lower its neighbours.
  template <class Sink>
  static void on_removal(const DynamicGraph& g, vertex_t v, const std::vector<char>& in,
                         std::vector<int64_t>& score, Sink&& fell) {
    for (vertex_t u : g.neighbors(v))
      if (in[u]) fell(u, --score[u]);
  }

  static void support_levels(const DynamicGraph& g, vertex_t v, const std::vector<int32_t>& levels,
                             std::vector<int32_t>& out) {
    out.clear();
    for (vertex_t u : g.neighbors(v)) out.push_back(levels[u]);
  }

  // Vertices whose score can change when edge (u, v) flips; the edge is
  // present in g at call time.
  static void seed_dirty(const DynamicGraph& g, vertex_t u, vertex_t v, std::vector<vertex_t>& out) {
    (void)g;
    out.push_back(u);
    out.push_back(v);
  }

  // Contribution of flipping the present edge (u, v) to the candidate's
  // score numerator, given current membership flags.
  static int64_t flip_numerator(const DynamicGraph& g, vertex_t u, vertex_t v, const std::vector<char>& in) {
    (void)g;
    return (in[u] && in[v]) ? 1 : 0;
  }

  // v's contribution to the numerator against the flagged set (v's own flag
  // is ignored); what joining or leaving the candidate adds or removes.
  static int64_t incident_numerator(const DynamicGraph& g, vertex_t v, const std::vector<char>& in) {
    int64_t s = 0;
    for (vertex_t u : g.neighbors(v)) s += in[u];
    return s;
  }

  static int64_t candidate_numerator(const DynamicGraph::InducedStats& st) { return st.edges; }

  static int64_t schedule_delta(const DynamicGraph& g, const ModelParams& params, double beta, double eps,
                                int64_t max_batch) {
    return rest_window(g, params, beta, eps, max_batch).delta;
  }
};

// From-scratch peel of the subgraph induced by s0. Worklist rounds: round 0
// removals are found by one scan, later rounds only among vertices whose
// score dropped.
template <class Policy>
PeelResult static_peel(const DynamicGraph& g, const std::vector<vertex_t>& s0, double param, double eps) {
  const vertex_t n = g.num_vertices();
  PeelResult out;
  out.cap = static_cast<int32_t>(n);
  out.levels.assign(static_cast<size_t>(n), -1);
  if (s0.empty()) return out;

  const int64_t need = detail::survive_count(Policy::threshold(param, eps));
  std::vector<char> in(static_cast<size_t>(n), 0);
  for (vertex_t v : s0) {
    if (v < 0 || v >= n) throw GraphError(GraphErrc::bad_vertex, "peel set vertex out of range");
    in[v] = 1;
  }
  std::vector<int64_t> score(static_cast<size_t>(n), 0);
  for (vertex_t v : s0) score[v] = Policy::induced_score(g, v, in);

  std::vector<char> queued(static_cast<size_t>(n), 0);
  std::vector<vertex_t> frontier, next;
  for (vertex_t v : s0)
    if (score[v] < need) {
      frontier.push_back(v);
      queued[v] = 1;
    }

  int64_t alive = static_cast<int64_t>(s0.size());
  int32_t round = 0;
  out.layer_sizes.push_back(alive);
  while (!frontier.empty()) {
    next.clear();
    for (vertex_t v : frontier) {
      out.levels[v] = round;
      in[v] = 0;
      --alive;
      Policy::on_removal(g, v, in, score, [&](vertex_t u, int64_t now) {
        if (!queued[u] && now < need) {
          queued[u] = 1;
          next.push_back(u);
        }
      });
    }
    ++round;
    out.layer_sizes.push_back(alive);
    if (alive == 0) {
      // The final round removed the whole remaining layer.
      out.candidate = frontier;
      out.rounds = round;
      return out;
    }
    std::swap(frontier, next);
  }
  out.rounds = round;
  out.survived = true;
  for (vertex_t v : s0)
    if (in[v]) {
      out.levels[v] = out.cap;
      out.candidate.push_back(v);
    }
  return out;
}

// Batch-dynamic layer maintenance at one threshold parameter. repair() runs
// a raise pass then a lower pass of the level recurrence over the touched
// region; the recurrence has a single fixed point, so the outcome always
// matches a from-scratch peel of the current graph. The candidate (the
// surviving fixed point) and its value are kept incrementally.
template <class Policy>
class PeelEngine {
 public:
  PeelEngine() = default;

  // Builds by sweeping the parameter grid downward and keeping the first
  // value whose peel leaves a nonempty fixed point.
  PeelEngine(const DynamicGraph& g, double eps) : eps_(eps) {
    if (eps <= 0.0) throw std::invalid_argument("peeling needs eps > 0");
    const auto n = static_cast<size_t>(g.num_vertices());
    levels_.assign(n, 0);
    in_candidate_.assign(n, 0);
    if (Policy::feasible(g)) rebuild(g);
  }

  bool built() const { return built_; }
  double param() const { return param_; }
  double eps() const { return eps_; }
  int32_t cap() const { return cap_; }
  const std::vector<int32_t>& levels() const { return levels_; }
  int64_t candidate_size() const { return cand_size_; }
  double candidate_value() const { return cand_value_; }

  std::vector<vertex_t> candidate() const {
    std::vector<vertex_t> out;
    out.reserve(static_cast<size_t>(cand_size_));
    for (size_t v = 0; v < in_candidate_.size(); ++v)
      if (in_candidate_[v]) out.push_back(static_cast<vertex_t>(v));
    return out;
  }

  int64_t layer_budget() const {
    const double n = static_cast<double>(levels_.size());
    return n > 1 ? static_cast<int64_t>(std::ceil(std::log(n) / std::log1p(eps_))) : 0;
  }

  // Applies the event to g and records which vertices need re-scoring.
  void absorb(DynamicGraph& g, const EdgeEvent& ev) {
    if (ev.add) {
      g.add_edge(ev.u, ev.v);
      if (built_) note_flip(g, ev.u, ev.v, +1);
    } else {
      if (built_) note_flip(g, ev.u, ev.v, -1);
      g.remove_edge(ev.u, ev.v);
    }
  }

  struct Repair {
    bool levels_changed = false;
    bool rebuilt = false;
  };

  // Restores the level fixed point and the candidate, rebuilding from
  // scratch when the candidate's value drifts out of its window.
  Repair repair(DynamicGraph& g) {
    Repair rep;
    if (!built_) {
      dirty_.clear();
      pending_ = 0;
      if (Policy::feasible(g)) {
        rebuild(g);
        rep.rebuilt = true;
        rep.levels_changed = true;
      }
      return rep;
    }

    rep.levels_changed = run_worklist(g);
    cand_numerator_ += pending_;
    pending_ = 0;
    if (rep.levels_changed) apply_membership_moves(g);
    cand_value_ = cand_size_ > 0 ? static_cast<double>(cand_numerator_) / static_cast<double>(cand_size_) : 0.0;

    const bool out_of_window =
        cand_size_ == 0 || cand_value_ < param_ || cand_value_ > Policy::window_high(param_, eps_);
    if (out_of_window) {
      if (Policy::feasible(g)) {
        rebuild(g);
        rep.rebuilt = true;
        rep.levels_changed = true;
      } else {
        reset_empty();
      }
    }
    return rep;
  }

  void rebuild(const DynamicGraph& g) {
    const vertex_t n = g.num_vertices();
    std::vector<vertex_t> all(static_cast<size_t>(n));
    for (vertex_t v = 0; v < n; ++v) all[static_cast<size_t>(v)] = v;

    // Geometric grid through 1.0 in both directions so adjacent guesses stay
    // within a factor of (1+eps), plus the policy's floor anchor.
    std::vector<double> grid;
    for (double b = 1.0; b <= Policy::grid_top(g); b *= 1.0 + eps_) grid.push_back(b);
    grid.push_back(Policy::grid_floor_start());
    double f = 1.0;
    while (f > Policy::grid_floor_min(eps_)) {
      f /= 1.0 + eps_;
      grid.push_back(f);
    }
    std::sort(grid.begin(), grid.end(), std::greater<>());

    built_ = false;
    for (double b : grid) {
      PeelResult res = static_peel<Policy>(g, all, b, eps_);
      if (res.survived) {
        param_ = b;
        need_ = detail::survive_count(Policy::threshold(b, eps_));
        cap_ = res.cap;
        levels_ = std::move(res.levels);
        built_ = true;
        refresh_candidate(g, res.candidate);
        return;
      }
    }
    levels_.assign(static_cast<size_t>(n), 0);
    reset_empty();
  }

 private:
  void reset_empty() {
    built_ = false;
    std::fill(in_candidate_.begin(), in_candidate_.end(), 0);
    cand_size_ = 0;
    cand_numerator_ = 0;
    cand_value_ = 0.0;
    pending_ = 0;
  }

  void refresh_candidate(const DynamicGraph& g, const std::vector<vertex_t>& members) {
    if (in_candidate_.size() != levels_.size()) in_candidate_.assign(levels_.size(), 0);
    std::fill(in_candidate_.begin(), in_candidate_.end(), 0);
    for (vertex_t v : members) in_candidate_[static_cast<size_t>(v)] = 1;
    cand_size_ = static_cast<int64_t>(members.size());
    const auto st = g.induced_stats(members);
    cand_numerator_ = Policy::candidate_numerator(st);
    cand_value_ = cand_size_ > 0 ? static_cast<double>(cand_numerator_) / static_cast<double>(cand_size_) : 0.0;
    pending_ = 0;
  }

  void note_flip(const DynamicGraph& g, vertex_t u, vertex_t v, int64_t sign) {
    seed_scratch_.clear();
    Policy::seed_dirty(g, u, v, seed_scratch_);
    for (vertex_t w : seed_scratch_) mark_dirty(w);
    pending_ += sign * Policy::flip_numerator(g, u, v, in_candidate_);
  }

  void mark_dirty(vertex_t v) {
    if (dirty_flag_.size() != levels_.size()) dirty_flag_.assign(levels_.size(), 0);
    if (!dirty_flag_[static_cast<size_t>(v)]) {
      dirty_flag_[static_cast<size_t>(v)] = 1;
      dirty_.push_back(v);
    }
  }

  int32_t score_level(const DynamicGraph& g, vertex_t v) {
    Policy::support_levels(g, v, levels_, support_scratch_);
    if (static_cast<int64_t>(support_scratch_.size()) < need_) return 0;
    std::nth_element(support_scratch_.begin(), support_scratch_.begin() + (need_ - 1), support_scratch_.end(),
                     std::greater<>());
    const int32_t kth = support_scratch_[static_cast<size_t>(need_ - 1)];
    return std::min(cap_, kth + 1);
  }

  bool run_worklist(const DynamicGraph& g) {
    bool changed = false;
    std::sort(dirty_.begin(), dirty_.end());
    if (queued_.size() != levels_.size()) queued_.assign(levels_.size(), 0);
    if (moved_flag_.size() != levels_.size()) moved_flag_.assign(levels_.size(), 0);
    for (int phase = 0; phase < 2; ++phase) {
      const bool raising = phase == 0;
      queue_.assign(dirty_.begin(), dirty_.end());
      for (vertex_t v : queue_) queued_[static_cast<size_t>(v)] = 1;
      for (size_t head = 0; head < queue_.size(); ++head) {
        const vertex_t v = queue_[head];
        queued_[static_cast<size_t>(v)] = 0;
        const int32_t f = score_level(g, v);
        const int32_t cur = levels_[static_cast<size_t>(v)];
        if ((raising && f > cur) || (!raising && f < cur)) {
          if (!moved_flag_[static_cast<size_t>(v)]) {
            moved_flag_[static_cast<size_t>(v)] = 1;
            moved_.push_back({v, cur});
          }
          levels_[static_cast<size_t>(v)] = f;
          changed = true;
          for (vertex_t u : g.neighbors(v))
            if (!queued_[static_cast<size_t>(u)]) {
              queued_[static_cast<size_t>(u)] = 1;
              queue_.push_back(u);
            }
        }
      }
    }
    for (vertex_t v : dirty_) dirty_flag_[static_cast<size_t>(v)] = 0;
    dirty_.clear();
    return changed;
  }

  // Moves vertices in and out of the candidate set following the level
  // changes of the last worklist run; the numerator follows incrementally.
  void apply_membership_moves(const DynamicGraph& g) {
    for (const Move& mv : moved_) {
      moved_flag_[static_cast<size_t>(mv.v)] = 0;
      const bool was = mv.old_level == cap_;
      const bool now = levels_[static_cast<size_t>(mv.v)] == cap_;
      if (was && !now) {
        in_candidate_[static_cast<size_t>(mv.v)] = 0;
        cand_numerator_ -= Policy::incident_numerator(g, mv.v, in_candidate_);
        --cand_size_;
      }
    }
    for (const Move& mv : moved_) {
      const bool was = mv.old_level == cap_;
      const bool now = levels_[static_cast<size_t>(mv.v)] == cap_;
      if (!was && now) {
        cand_numerator_ += Policy::incident_numerator(g, mv.v, in_candidate_);
        in_candidate_[static_cast<size_t>(mv.v)] = 1;
        ++cand_size_;
      }
    }
    moved_.clear();
  }

  struct Move {
    vertex_t v;
    int32_t old_level;
  };

  bool built_ = false;
  double eps_ = 0.1;
  double param_ = 0.0;
  int64_t need_ = 1;
  int32_t cap_ = 0;
  std::vector<int32_t> levels_;
  std::vector<char> in_candidate_;
  int64_t cand_size_ = 0;
  int64_t cand_numerator_ = 0;
  double cand_value_ = 0.0;
  int64_t pending_ = 0;
  std::vector<vertex_t> dirty_;
  std::vector<char> dirty_flag_;
  std::vector<vertex_t> queue_;
  std::vector<char> queued_;
  std::vector<Move> moved_;
  std::vector<char> moved_flag_;
  std::vector<int32_t> support_scratch_;
  std::vector<vertex_t> seed_scratch_;
};

template <class Policy>
PeelEngine<Policy> grid_search(const DynamicGraph& g, double eps) {
  return PeelEngine<Policy>(g, eps);
}

struct RoundRow {
  int64_t round = 0;
  int64_t delta = 0;
  double density = 0.0;
  std::optional<double> oracle_density;
  int64_t rebuilds = 0;
  int64_t wall_time_us = 0;
  int64_t cursor = 0;
  bool degraded = false;
};

struct RunOptions {
  double eps = 0.1;
  LearnOptions learn;
  std::optional<ModelParams> fixed_params;  // skip learning, schedule with these
  bool force_per_event = false;
  int64_t max_batch = kDefaultMaxBatch;
  std::function<double(const DynamicGraph&)> oracle;  // optional per-round reference value
};

struct RunResult {
  std::vector<RoundRow> rounds;
  LearnedParams learned;
  bool degraded = false;
  int64_t total_rebuilds = 0;
  int64_t wall_time_us = 0;
  uint64_t consumed_digest = 0;
  double final_density = 0.0;
  std::vector<vertex_t> final_candidate;
};

// Full pipeline on one stream: build layers, learn the model on a prefix
// window, then alternate rest (a scheduler-sized batch of events) and run
// (one repair pass). A fit below the acceptance threshold degrades the loop
// to per-event batches, as does force_per_event.
template <class Policy>
RunResult rest_and_run(DynamicGraph& g, const std::vector<EdgeEvent>& events, const RunOptions& opts) {
  const auto t_begin = std::chrono::steady_clock::now();
  auto us_since = [](std::chrono::steady_clock::time_point from) {
    const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - from).count();
    return (ns + 500) / 1000;  // round, so sums over many short rounds stay honest
  };
  RunResult res;
  PeelEngine<Policy> engine(g, opts.eps);

  size_t cursor = 0;
  ModelParams params;
  bool scheduled = false;
  int64_t round = 0;
  if (opts.fixed_params) {
    params = *opts.fixed_params;
    params.validate();
    scheduled = true;
  } else if (!events.empty()) {
    DynamicGraph probe = g;  // measure on a copy so the engine sees each event once
    const WindowStats stats = collect_window(probe, events, 0, opts.learn);
    const RegressionFit fit = fit_line(stats, opts.learn);
    if (fit.ok && stats.additions > 0) res.learned = invert_params(fit, stats, opts.learn);
    res.learned.window_len = stats.window_len;
    if (res.learned.accepted) {
      params.p = res.learned.p;
      params.q = res.learned.q;
      params.r = res.learned.r;
      scheduled = true;
    }
    // Round timing covers the run phase only; rest absorbs updates without
    // processing and is identical work in every mode.
    for (int64_t i = 0; i < stats.window_len; ++i) engine.absorb(g, events[cursor + static_cast<size_t>(i)]);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = engine.repair(g);
    cursor += static_cast<size_t>(stats.window_len);
    RoundRow row;
    row.round = round++;
    row.delta = stats.window_len;
    row.density = engine.candidate_value();
    row.rebuilds = rep.rebuilt ? 1 : 0;
    row.wall_time_us = us_since(t0);
    row.cursor = static_cast<int64_t>(cursor);
    if (opts.oracle) row.oracle_density = opts.oracle(g);
    res.total_rebuilds += row.rebuilds;
    res.rounds.push_back(std::move(row));
  }
  res.degraded = opts.force_per_event || !scheduled;

  if (res.rounds.empty()) {
    RoundRow row;
    row.round = round++;
    row.density = engine.candidate_value();
    row.degraded = res.degraded;
    if (opts.oracle) row.oracle_density = opts.oracle(g);
    res.rounds.push_back(std::move(row));
  }

  while (cursor < events.size()) {
    int64_t delta = 1;
    if (!res.degraded) delta = Policy::schedule_delta(g, params, engine.param(), opts.eps, opts.max_batch);
    const int64_t take = std::min<int64_t>(delta, static_cast<int64_t>(events.size() - cursor));
    for (int64_t i = 0; i < take; ++i) engine.absorb(g, events[cursor + static_cast<size_t>(i)]);
    const auto t0 = std::chrono::steady_clock::now();
    const auto rep = engine.repair(g);
    cursor += static_cast<size_t>(take);
    RoundRow row;
    row.round = round++;
    row.delta = take;
    row.density = engine.candidate_value();
    row.rebuilds = rep.rebuilt ? 1 : 0;
    row.wall_time_us = us_since(t0);
    row.cursor = static_cast<int64_t>(cursor);
    row.degraded = res.degraded;
    if (opts.oracle) row.oracle_density = opts.oracle(g);
    res.total_rebuilds += row.rebuilds;
    res.rounds.push_back(std::move(row));
  }

  res.consumed_digest = event_digest(events, 0, cursor);
  res.final_density = engine.candidate_value();
  res.final_candidate = engine.candidate();
  res.wall_time_us = us_since(t_begin);
  return res;
}

using DensePeelEngine = PeelEngine<EdgePeelPolicy>;

inline PeelResult static_density_peel(const DynamicGraph& g, const std::vector<vertex_t>& s0, double beta,
                                      double eps) {
  return static_peel<EdgePeelPolicy>(g, s0, beta, eps);
}

inline DensePeelEngine density_grid_search(const DynamicGraph& g, double eps) {
  return grid_search<EdgePeelPolicy>(g, eps);
}

inline RunResult density_rest_and_run(DynamicGraph& g, const std::vector<EdgeEvent>& events,
                                      const RunOptions& opts) {
  return rest_and_run<EdgePeelPolicy>(g, events, opts);
}

}  // namespace wedge
