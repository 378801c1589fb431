#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/learn.hpp"
#include "wedge/peel.hpp"
#include "wedge/rng.hpp"
#include "wedge/schedule.hpp"
#include "wedge/sim.hpp"

namespace wedge {

// Every dropped raw line lands in exactly one counter, so
// lines == kept + skipped + self_loops + duplicate_adds + absent_removes.
struct CleaningReport {
  int64_t lines = 0;
  int64_t skipped = 0;  // blank and comment lines
  int64_t self_loops = 0;
  int64_t duplicate_adds = 0;
  int64_t absent_removes = 0;
  int64_t kept = 0;
};

struct IngestResult {
  vertex_t n = 0;
  std::vector<EdgeEvent> events;          // cleaned, sorted by t, internal ids
  std::vector<std::string> external_ids;  // internal id -> source label
  CleaningReport report;
};

namespace detail {

struct RawEvent {
  int64_t t = 0;
  std::string u, v;
  bool add = true;
  int64_t line = 0;
};

[[noreturn]] inline void reject_line(int64_t line, const std::string& why) {
  throw std::runtime_error("line " + std::to_string(line) + ": " + why);
}

inline int64_t parse_time(const std::string& tok, int64_t line) {
  try {
    size_t used = 0;
    const int64_t t = std::stoll(tok, &used);
    if (used != tok.size() || t < 0) reject_line(line, "bad timestamp '" + tok + "'");
    return t;
  } catch (const std::logic_error&) {
    reject_line(line, "bad timestamp '" + tok + "'");
  }
}

}  // namespace detail

// Reads whitespace-separated event lines "u v [t] [op]". A missing t is the
// line number, a missing op is an add; four columns whose last field is not
// + or - are treated as "u v w t" with the weight column ignored. Lines
// starting with # or % are comments. Cleaning drops self-loops, adds of
// edges already live and removes of edges not live, so replaying the output
// never faults.
inline IngestResult ingest_stream(std::istream& in) {
  IngestResult out;
  std::vector<detail::RawEvent> raw;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    ++out.report.lines;
    std::istringstream ss(line);
    std::vector<std::string> tok;
    std::string t;
    while (ss >> t) tok.push_back(t);
    if (tok.empty() || tok[0][0] == '#' || tok[0][0] == '%') {
      ++out.report.skipped;
      continue;
    }
    detail::RawEvent ev;
    ev.line = line_no;
    switch (tok.size()) {
      case 2:
        ev.u = tok[0];
        ev.v = tok[1];
        ev.t = line_no;
        break;
      case 3:
        ev.u = tok[0];
        ev.v = tok[1];
        ev.t = detail::parse_time(tok[2], line_no);
        break;
      case 4:
        ev.u = tok[0];
        ev.v = tok[1];
        if (tok[3] == "+" || tok[3] == "-") {
          ev.t = detail::parse_time(tok[2], line_no);
          ev.add = tok[3] == "+";
        } else {
          ev.t = detail::parse_time(tok[3], line_no);  // "u v w t", weight ignored
        }
        break;
      default:
        detail::reject_line(line_no, "expected 2 to 4 fields, got " + std::to_string(tok.size()));
    }
    if (ev.u == ev.v) {
      ++out.report.self_loops;
      continue;
    }
    raw.push_back(std::move(ev));
  }
  if (out.report.lines == out.report.skipped)
    throw std::runtime_error("input contains no event lines");

  std::stable_sort(raw.begin(), raw.end(),
                   [](const detail::RawEvent& a, const detail::RawEvent& b) { return a.t < b.t; });

  // Replay in time order; ids are assigned at the first kept event so
  // dropped lines never register vertices.
  std::unordered_map<std::string, vertex_t> ids;
  std::unordered_set<uint64_t> live;
  auto lookup = [&](const std::string& label) -> vertex_t {
    const auto it = ids.find(label);
    return it == ids.end() ? -1 : it->second;
  };
  for (const detail::RawEvent& ev : raw) {
    vertex_t u = lookup(ev.u);
    vertex_t v = lookup(ev.v);
    const bool present = u >= 0 && v >= 0 && live.count(detail::pair_key(u, v)) > 0;
    if (ev.add == present) {
      ++(ev.add ? out.report.duplicate_adds : out.report.absent_removes);
      continue;
    }
    if (u < 0) {
      u = static_cast<vertex_t>(out.external_ids.size());
      ids.emplace(ev.u, u);
      out.external_ids.push_back(ev.u);
    }
    if (v < 0) {
      v = static_cast<vertex_t>(out.external_ids.size());
      ids.emplace(ev.v, v);
      out.external_ids.push_back(ev.v);
    }
    if (ev.add)
      live.insert(detail::pair_key(u, v));
    else
      live.erase(detail::pair_key(u, v));
    out.events.push_back({ev.t, u, v, ev.add});
    ++out.report.kept;
  }
  out.n = static_cast<vertex_t>(out.external_ids.size());
  return out;
}

inline IngestResult ingest_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return ingest_stream(in);
}

// Prefix length covering the first `count` events.
inline size_t split_by_count(const std::vector<EdgeEvent>& events, int64_t count) {
  if (count < 0) count = 0;
  return std::min(events.size(), static_cast<size_t>(count));
}

// Prefix length covering every event with t <= t_last.
inline size_t split_by_time(const std::vector<EdgeEvent>& events, int64_t t_last) {
  size_t i = 0;
  while (i < events.size() && events[i].t <= t_last) ++i;
  return i;
}

inline DynamicGraph build_prefix_graph(vertex_t n, const std::vector<EdgeEvent>& events, size_t prefix) {
  DynamicGraph g(n);
  for (size_t i = 0; i < prefix && i < events.size(); ++i) {
    const EdgeEvent& ev = events[i];
    if (ev.add)
      g.add_edge(ev.u, ev.v);
    else
      g.remove_edge(ev.u, ev.v);
  }
  return g;
}

namespace detail {

inline std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace detail

// Canonical event line; ingesting this output reproduces it byte-for-byte.
inline void write_events(std::ostream& out, const std::vector<EdgeEvent>& events) {
  for (const EdgeEvent& ev : events)
    out << ev.u << ' ' << ev.v << ' ' << ev.t << ' ' << (ev.add ? '+' : '-') << '\n';
}

// Trace file: the generator identity and full parameter set ride along as
// comments so a trace is replayable and still ingests as a plain event list.
inline void write_trace(std::ostream& out, vertex_t n, const ModelParams& params, uint64_t seed,
                        const std::vector<EdgeEvent>& events) {
  out << "# rng=" << kRngAlgorithm << " seed=" << seed << '\n';
  out << "# n=" << n << " p=" << detail::fmt_double(params.p) << " q=" << detail::fmt_double(params.q)
      << " r=" << detail::fmt_double(params.r) << '\n';
  write_events(out, events);
}

inline void write_growth_csv(std::ostream& out, const GrowthReport& report) {
  out << "scenario,delta,empirical_mean,bound,stderr,violated\n";
  for (const GrowthRow& row : report.rows)
    out << row.scenario << ',' << row.delta << ',' << detail::fmt_double(row.empirical_mean) << ','
        << detail::fmt_double(row.bound) << ',' << detail::fmt_double(row.std_error) << ','
        << (row.violated ? 1 : 0) << '\n';
}

// Per-round report; value_column is "density" or "tridensity".
inline void write_rounds_csv(std::ostream& out, const std::vector<RoundRow>& rounds,
                             const std::string& value_column) {
  out << "round,delta," << value_column << ",oracle_" << value_column << ",rebuilds,wall_time_us,cursor\n";
  for (const RoundRow& row : rounds) {
    out << row.round << ',' << row.delta << ',' << detail::fmt_double(row.density) << ',';
    if (row.oracle_density) out << detail::fmt_double(*row.oracle_density);
    out << ',' << row.rebuilds << ',' << row.wall_time_us << ',' << row.cursor << '\n';
  }
}

struct CompareRow {
  int64_t round = 0;
  int64_t cursor = 0;
  int64_t delta = 0;
  double density_ours = 0.0;
  double density_baseline = 0.0;
  int64_t time_us_ours = 0;
  int64_t time_us_baseline = 0;
};

inline void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows) {
  out << "round,cursor,delta,density_ours,density_baseline,time_us_ours,time_us_baseline,speedup\n";
  for (const CompareRow& row : rows) {
    const double speedup =
        row.time_us_ours > 0 ? static_cast<double>(row.time_us_baseline) / static_cast<double>(row.time_us_ours) : 0.0;
    out << row.round << ',' << row.cursor << ',' << row.delta << ',' << detail::fmt_double(row.density_ours)
        << ',' << detail::fmt_double(row.density_baseline) << ',' << row.time_us_ours << ','
        << row.time_us_baseline << ',' << detail::fmt_double(speedup) << '\n';
  }
}

inline void write_learned_kv(std::ostream& out, const LearnedParams& learned) {
  out << "p=" << detail::fmt_double(learned.p) << '\n';
  out << "q=" << detail::fmt_double(learned.q) << '\n';
  out << "r=" << detail::fmt_double(learned.r) << '\n';
  out << "R2=" << detail::fmt_double(learned.r2) << '\n';
  out << "M=" << detail::fmt_double(learned.M) << '\n';
  out << "window_len=" << learned.window_len << '\n';
  out << "accepted=" << (learned.accepted ? 1 : 0) << '\n';
}

inline void write_cleaning_json(std::ostream& out, const CleaningReport& report) {
  out << "{\n";
  out << "  \"lines\": " << report.lines << ",\n";
  out << "  \"skipped\": " << report.skipped << ",\n";
  out << "  \"self_loops\": " << report.self_loops << ",\n";
  out << "  \"duplicate_adds\": " << report.duplicate_adds << ",\n";
  out << "  \"absent_removes\": " << report.absent_removes << ",\n";
  out << "  \"kept\": " << report.kept << "\n";
  out << "}\n";
}

}  // namespace wedge
