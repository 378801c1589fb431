#pragma once

#include <cstdint>
#include <vector>

#include "wedge/graph.hpp"
#include "wedge/sim.hpp"

namespace wedge {

// One timestamped edge flip. Streams handed to the engines are cleaned:
// adds of absent pairs, removes of present pairs, endpoints in range.
struct EdgeEvent {
  int64_t t = 0;
  vertex_t u = -1;
  vertex_t v = -1;
  bool add = true;

  friend bool operator==(const EdgeEvent& a, const EdgeEvent& b) {
    return a.t == b.t && a.u == b.u && a.v == b.v && a.add == b.add;
  }
};

inline std::vector<EdgeEvent> to_edge_events(const std::vector<SimEvent>& sim_events) {
  std::vector<EdgeEvent> events;
  events.reserve(sim_events.size());
  for (const SimEvent& ev : sim_events)
    events.push_back({ev.step, ev.u, ev.v, ev.kind == EventKind::add});
  return events;
}

// Order-sensitive digest of an event sequence (FNV-1a); used to assert that
// two engines consumed identical streams.
inline uint64_t event_digest(const std::vector<EdgeEvent>& events, size_t begin = 0, size_t end = SIZE_MAX) {
  uint64_t h = 1469598103934665603ULL;
  auto mix = [&](uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xff;
      h *= 1099511628211ULL;
    }
  };
  if (end > events.size()) end = events.size();
  for (size_t i = begin; i < end; ++i) {
    mix(static_cast<uint64_t>(events[i].u));
    mix(static_cast<uint64_t>(events[i].v));
    mix(events[i].add ? 1 : 2);
  }
  return h;
}

}  // namespace wedge
