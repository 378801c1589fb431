// Command-line front end for the wedge toolkit.
//
// Usage:
//   wedge_cli ingest     --input FILE [--output FILE] [--report FILE] [--idmap FILE]
//   wedge_cli simulate   --n N --events K [--init FILE] [--max-steps S] [--output FILE]
//   wedge_cli learn      --input FILE [--prefix-count N | --prefix-time T] [--output FILE]
//   wedge_cli densest    --input FILE [--prefix-count N | --prefix-time T] [--per-event]
//                        [--oracle {none,flow,brute}] [--output FILE] [--params-out FILE]
//   wedge_cli tridensest --input FILE [--prefix-count N | --prefix-time T] [--per-event]
//                        [--oracle {none,brute}] [--output FILE] [--params-out FILE]
//   wedge_cli oracle     --input FILE [--prefix-count N | --prefix-time T]
//                        [--kind {dense,tri}] [--method {flow,brute}]
//   wedge_cli compare    --input FILE [--prefix-count N | --prefix-time T] [--tri] [--output FILE]
//   wedge_cli bench      --input FILE [--prefix-count N | --prefix-time T] [--tri] [--output FILE]
//
// Shared options (also valid as flat key=value lines in a --config file):
//   --eps E         approximation slack, default 0.1
//   --c C           fit acceptance threshold on R^2, default 0.6
//   --seed S        RNG seed, default 42
//   --p P --q Q --r R   model parameter overrides; all three together skip learning
//   --max-batch B   batch size ceiling, default 1000000
//
// Event files are whitespace-separated lines "u v [t] [op]"; see ingest for
// the cleaning rules. All subcommands write reports to stdout when --output
// is "-" (the default).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wedge/events.hpp"
#include "wedge/graph.hpp"
#include "wedge/io.hpp"
#include "wedge/learn.hpp"
#include "wedge/oracle.hpp"
#include "wedge/peel.hpp"
#include "wedge/rng.hpp"
#include "wedge/schedule.hpp"
#include "wedge/sim.hpp"
#include "wedge/tripeel.hpp"

namespace {

struct Shared {
  double eps = 0.1;
  double c = 0.6;
  uint64_t seed = 42;
  double p = std::nan("");
  double q = std::nan("");
  double r = std::nan("");
  int64_t max_batch = wedge::kDefaultMaxBatch;

  bool has_fixed_params() const { return !std::isnan(p) && !std::isnan(q) && !std::isnan(r); }

  wedge::ModelParams fixed_params() const {
    wedge::ModelParams params{p, q, r};
    params.validate();
    return params;
  }

  wedge::LearnOptions learn_options() const {
    wedge::LearnOptions opts;
    opts.eps = eps;
    opts.accept_threshold = c;
    return opts;
  }
};

struct StreamArgs {
  std::string input;
  int64_t prefix_count = -1;
  int64_t prefix_time = -1;
};

// Sink that is either stdout or an owned file.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open " + path + " for writing");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void add_stream_args(CLI::App* cmd, StreamArgs& args) {
  cmd->add_option("--input", args.input, "event file")->required();
  cmd->add_option("--prefix-count", args.prefix_count, "events folded into the initial graph");
  cmd->add_option("--prefix-time", args.prefix_time, "fold events with t <= this into the initial graph");
}

size_t prefix_length(const StreamArgs& args, const std::vector<wedge::EdgeEvent>& events) {
  if (args.prefix_count >= 0 && args.prefix_time >= 0)
    throw std::runtime_error("--prefix-count and --prefix-time are exclusive");
  if (args.prefix_count >= 0) return wedge::split_by_count(events, args.prefix_count);
  if (args.prefix_time >= 0) return wedge::split_by_time(events, args.prefix_time);
  return 0;
}

struct LoadedStream {
  wedge::DynamicGraph g;
  std::vector<wedge::EdgeEvent> rest;
};

LoadedStream load_stream(const StreamArgs& args) {
  const wedge::IngestResult in = wedge::ingest_file(args.input);
  const size_t prefix = prefix_length(args, in.events);
  LoadedStream out{wedge::build_prefix_graph(in.n, in.events, prefix), {}};
  out.rest.assign(in.events.begin() + static_cast<std::ptrdiff_t>(prefix), in.events.end());
  return out;
}

wedge::RunOptions run_options(const Shared& shared, bool per_event) {
  wedge::RunOptions opts;
  opts.eps = shared.eps;
  opts.learn = shared.learn_options();
  opts.force_per_event = per_event;
  opts.max_batch = shared.max_batch;
  if (shared.has_fixed_params()) opts.fixed_params = shared.fixed_params();
  return opts;
}

int run_ingest(const std::string& input, const std::string& output, const std::string& report,
               const std::string& idmap) {
  const wedge::IngestResult in = wedge::ingest_file(input);
  {
    Output out(output);
    wedge::write_events(out.stream(), in.events);
  }
  if (!report.empty()) {
    Output out(report);
    wedge::write_cleaning_json(out.stream(), in.report);
  }
  if (!idmap.empty()) {
    Output out(idmap);
    for (size_t v = 0; v < in.external_ids.size(); ++v) out.stream() << v << ' ' << in.external_ids[v] << '\n';
  }
  std::cerr << "kept " << in.report.kept << " of " << in.report.lines << " lines over " << in.n
            << " vertices\n";
  return 0;
}

int run_simulate(const Shared& shared, int64_t n, int64_t events, int64_t max_steps, const std::string& init,
                 const std::string& output) {
  if (!shared.has_fixed_params()) throw std::runtime_error("simulate needs --p, --q and --r");
  std::optional<wedge::IngestResult> seed_stream;
  if (!init.empty()) seed_stream = wedge::ingest_file(init);
  const wedge::vertex_t size =
      static_cast<wedge::vertex_t>(std::max<int64_t>(n, seed_stream ? seed_stream->n : 0));
  wedge::DynamicGraph g(size);
  if (seed_stream)
    g = wedge::build_prefix_graph(size, seed_stream->events, seed_stream->events.size());
  wedge::Simulator sim(g, shared.fixed_params(), wedge::Rng(shared.seed));
  const auto trace = sim.run_trace(events, max_steps);
  Output out(output);
  wedge::write_trace(out.stream(), size, shared.fixed_params(), shared.seed, wedge::to_edge_events(trace));
  std::cerr << "emitted " << trace.size() << " events in " << sim.steps_taken() << " steps\n";
  return 0;
}

int run_learn(const Shared& shared, const StreamArgs& args, const std::string& output) {
  LoadedStream stream = load_stream(args);
  const wedge::LearnOptions opts = shared.learn_options();
  const wedge::WindowStats stats = wedge::collect_window(stream.g, stream.rest, 0, opts);
  const wedge::RegressionFit fit = wedge::fit_line(stats, opts);
  wedge::LearnedParams learned;
  if (fit.ok && stats.additions > 0) learned = wedge::invert_params(fit, stats, opts);
  learned.window_len = stats.window_len;
  Output out(output);
  wedge::write_learned_kv(out.stream(), learned);
  std::cerr << "window " << stats.window_len << " events, stop: " << stats.stop_reason << '\n';
  return 0;
}

std::function<double(const wedge::DynamicGraph&)> make_oracle(const std::string& kind, bool tri) {
  if (kind == "none") return {};
  if (tri) {
    if (kind != "brute") throw std::runtime_error("tridensest supports --oracle none or brute");
    return [](const wedge::DynamicGraph& g) {
      if (g.num_triangles() == 0) return 0.0;
      return wedge::tridensest_bruteforce(g).value.value();
    };
  }
  if (kind == "flow")
    return [](const wedge::DynamicGraph& g) {
      if (g.num_edges() == 0) return 0.0;
      return wedge::densest_exact(g).value.value();
    };
  if (kind == "brute")
    return [](const wedge::DynamicGraph& g) {
      if (g.num_edges() == 0) return 0.0;
      return wedge::densest_bruteforce(g).value.value();
    };
  throw std::runtime_error("unknown oracle '" + kind + "'");
}

int run_density(const Shared& shared, const StreamArgs& args, bool tri, bool per_event,
                const std::string& oracle, const std::string& output, const std::string& params_out) {
  LoadedStream stream = load_stream(args);
  wedge::RunOptions opts = run_options(shared, per_event);
  opts.oracle = make_oracle(oracle, tri);
  const wedge::RunResult res = tri ? wedge::tri_rest_and_run(stream.g, stream.rest, opts)
                                   : wedge::density_rest_and_run(stream.g, stream.rest, opts);
  {
    Output out(output);
    wedge::write_rounds_csv(out.stream(), res.rounds, tri ? "tridensity" : "density");
  }
  if (!params_out.empty()) {
    Output out(params_out);
    wedge::write_learned_kv(out.stream(), res.learned);
  }
  std::cerr << (res.degraded ? "per-event" : "batched") << " run, " << res.rounds.size() << " rounds, "
            << res.total_rebuilds << " rebuilds, final " << (tri ? "tridensity " : "density ")
            << res.final_density << '\n';
  return 0;
}

int run_oracle(const StreamArgs& args, const std::string& kind, const std::string& method,
               const std::string& output) {
  // The oracle reads the whole stream; a prefix request only picks the
  // replay split point, which does not change the final graph.
  LoadedStream stream = load_stream(args);
  wedge::DynamicGraph whole = stream.g;
  for (const wedge::EdgeEvent& ev : stream.rest) {
    if (ev.add)
      whole.add_edge(ev.u, ev.v);
    else
      whole.remove_edge(ev.u, ev.v);
  }
  wedge::OracleResult res;
  if (kind == "tri") {
    if (method == "flow") throw std::runtime_error("no flow construction for tridensest; use --method brute");
    res = wedge::tridensest_bruteforce(whole);
  } else if (method == "brute") {
    res = wedge::densest_bruteforce(whole);
  } else {
    res = wedge::densest_exact(whole);
  }
  Output out(output);
  out.stream() << "value=" << res.value.num << '/' << res.value.den << '\n';
  out.stream() << "density=" << wedge::detail::fmt_double(res.value.value()) << '\n';
  out.stream() << "method=" << (res.method == wedge::OracleMethod::flow ? "flow" : "bruteforce") << '\n';
  out.stream() << "subset=";
  for (size_t i = 0; i < res.subset.size(); ++i) out.stream() << (i ? " " : "") << res.subset[i];
  out.stream() << '\n';
  return 0;
}

// Runs the batched engine and the per-event baseline over the same events
// and pairs the baseline's state at each batched cursor.
int run_compare(const Shared& shared, const StreamArgs& args, bool tri, const std::string& output) {
  LoadedStream stream = load_stream(args);
  wedge::DynamicGraph g_batched = stream.g;
  wedge::DynamicGraph g_baseline = stream.g;

  wedge::RunOptions batched_opts = run_options(shared, false);
  wedge::RunOptions baseline_opts = run_options(shared, true);
  baseline_opts.fixed_params = wedge::ModelParams{};  // skip the probe; the baseline never batches

  const wedge::RunResult ours = tri ? wedge::tri_rest_and_run(g_batched, stream.rest, batched_opts)
                                    : wedge::density_rest_and_run(g_batched, stream.rest, batched_opts);
  const wedge::RunResult base = tri ? wedge::tri_rest_and_run(g_baseline, stream.rest, baseline_opts)
                                    : wedge::density_rest_and_run(g_baseline, stream.rest, baseline_opts);
  if (ours.consumed_digest != base.consumed_digest)
    throw std::runtime_error("engines consumed different event sequences");

  // Baseline rows are one per event: row k holds the state after k + 1
  // events, so the state at cursor c sits in row c - 1.
  std::vector<int64_t> base_time(base.rounds.size() + 1, 0);
  std::vector<double> base_density(base.rounds.size(), 0.0);
  for (size_t k = 0; k < base.rounds.size(); ++k) {
    base_time[k + 1] = base_time[k] + base.rounds[k].wall_time_us;
    base_density[k] = base.rounds[k].density;
  }
  std::vector<wedge::CompareRow> rows;
  size_t prev_cursor = 0;
  for (const wedge::RoundRow& row : ours.rounds) {
    wedge::CompareRow pair;
    pair.round = row.round;
    pair.cursor = row.cursor;
    pair.delta = row.delta;
    pair.density_ours = row.density;
    const auto at = static_cast<size_t>(row.cursor);
    pair.density_baseline = base_density[std::min(at > 0 ? at - 1 : 0, base_density.size() - 1)];
    pair.time_us_ours = row.wall_time_us;
    pair.time_us_baseline = base_time[std::min(at, base_time.size() - 1)] -
                            base_time[std::min(prev_cursor, base_time.size() - 1)];
    prev_cursor = at;
    rows.push_back(pair);
  }
  {
    Output out(output);
    wedge::write_compare_csv(out.stream(), rows);
  }
  int64_t ours_total = 0;
  for (const auto& row : ours.rounds) ours_total += row.wall_time_us;
  const int64_t base_total = base_time.back();
  std::cerr << "batched " << ours_total << " us over " << ours.rounds.size() << " rounds, per-event "
            << base_total << " us over " << base.rounds.size() << " rounds, speedup "
            << (ours_total > 0 ? static_cast<double>(base_total) / static_cast<double>(ours_total) : 0.0)
            << ", final " << ours.final_density << " vs " << base.final_density << '\n';
  return 0;
}

int run_bench(const Shared& shared, const StreamArgs& args, bool tri, const std::string& output) {
  LoadedStream stream = load_stream(args);
  const auto t0 = std::chrono::steady_clock::now();
  auto lap = [&t0] {
    return std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  int64_t build_us = 0;
  double static_value = 0.0;
  if (tri) {
    const auto engine = wedge::tri_grid_search(stream.g, shared.eps);
    build_us = lap();
    static_value = engine.candidate_value();
  } else {
    const auto engine = wedge::density_grid_search(stream.g, shared.eps);
    build_us = lap();
    static_value = engine.candidate_value();
  }

  wedge::DynamicGraph g_run = stream.g;
  const wedge::RunOptions opts = run_options(shared, false);
  const wedge::RunResult res = tri ? wedge::tri_rest_and_run(g_run, stream.rest, opts)
                                   : wedge::density_rest_and_run(g_run, stream.rest, opts);
  int64_t engine_us = 0;
  for (const auto& row : res.rounds) engine_us += row.wall_time_us;

  Output out(output);
  out.stream() << "stage,wall_time_us,rounds,rebuilds,value\n";
  out.stream() << "static_build," << build_us << ",1,1," << wedge::detail::fmt_double(static_value) << '\n';
  out.stream() << "rest_and_run," << engine_us << ',' << res.rounds.size() << ',' << res.total_rebuilds << ','
               << wedge::detail::fmt_double(res.final_density) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic graph toolkit: wedge-closure simulation, parameter learning, densest subgraphs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file");

  Shared shared;
  app.add_option("--eps", shared.eps, "approximation slack")->check(CLI::PositiveNumber);
  app.add_option("--c", shared.c, "fit acceptance threshold on R^2")->check(CLI::Range(0.0, 1.0));
  app.add_option("--seed", shared.seed, "RNG seed");
  app.add_option("--p", shared.p, "wedge closing probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--q", shared.q, "edge removal probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--r", shared.r, "uniform insertion probability")->check(CLI::Range(0.0, 1.0));
  app.add_option("--max-batch", shared.max_batch, "batch size ceiling")->check(CLI::PositiveNumber);

  auto* ingest = app.add_subcommand("ingest", "clean and canonicalize an event file");
  std::string ingest_input, ingest_output = "-", ingest_report, ingest_idmap;
  ingest->add_option("--input", ingest_input, "event file")->required();
  ingest->add_option("--output", ingest_output, "cleaned event file");
  ingest->add_option("--report", ingest_report, "cleaning report (JSON)");
  ingest->add_option("--idmap", ingest_idmap, "internal to external id map");

  auto* simulate = app.add_subcommand("simulate", "run the wedge-closure process and record a trace");
  int64_t sim_n = 0, sim_events = 0, sim_max_steps = 10'000'000;
  std::string sim_init, sim_output = "-";
  simulate->add_option("--n", sim_n, "vertex count")->check(CLI::NonNegativeNumber);
  simulate->add_option("--events", sim_events, "edge events to record")->required();
  simulate->add_option("--max-steps", sim_max_steps, "step budget");
  simulate->add_option("--init", sim_init, "event file building the seed graph");
  simulate->add_option("--output", sim_output, "trace file");

  auto* learn = app.add_subcommand("learn", "fit model parameters on an observation window");
  StreamArgs learn_args;
  std::string learn_output = "-";
  add_stream_args(learn, learn_args);
  learn->add_option("--output", learn_output, "learned parameter file");

  auto* densest = app.add_subcommand("densest", "densest-subgraph tracking over an event stream");
  StreamArgs densest_args;
  bool densest_per_event = false;
  std::string densest_oracle = "none", densest_output = "-", densest_params;
  add_stream_args(densest, densest_args);
  densest->add_flag("--per-event", densest_per_event, "process one event per round");
  densest->add_option("--oracle", densest_oracle, "per-round reference: none, flow, brute");
  densest->add_option("--output", densest_output, "round report (CSV)");
  densest->add_option("--params-out", densest_params, "learned parameter file");

  auto* tridensest = app.add_subcommand("tridensest", "tri-densest tracking over an event stream");
  StreamArgs tri_args;
  bool tri_per_event = false;
  std::string tri_oracle = "none", tri_output = "-", tri_params;
  add_stream_args(tridensest, tri_args);
  tridensest->add_flag("--per-event", tri_per_event, "process one event per round");
  tridensest->add_option("--oracle", tri_oracle, "per-round reference: none, brute");
  tridensest->add_option("--output", tri_output, "round report (CSV)");
  tridensest->add_option("--params-out", tri_params, "learned parameter file");

  auto* oracle = app.add_subcommand("oracle", "exact optimum on the full stream");
  StreamArgs oracle_args;
  std::string oracle_kind = "dense", oracle_method = "flow", oracle_output = "-";
  add_stream_args(oracle, oracle_args);
  oracle->add_option("--kind", oracle_kind, "dense or tri");
  oracle->add_option("--method", oracle_method, "flow or brute");
  oracle->add_option("--output", oracle_output, "result file");

  auto* compare = app.add_subcommand("compare", "batched engine vs per-event baseline on one stream");
  StreamArgs compare_args;
  bool compare_tri = false;
  std::string compare_output = "-";
  add_stream_args(compare, compare_args);
  compare->add_flag("--tri", compare_tri, "compare the tri-densest engines");
  compare->add_option("--output", compare_output, "paired report (CSV)");

  auto* bench = app.add_subcommand("bench", "wall times for the static build and the stream run");
  StreamArgs bench_args;
  bool bench_tri = false;
  std::string bench_output = "-";
  add_stream_args(bench, bench_args);
  bench->add_flag("--tri", bench_tri, "bench the tri-densest engine");
  bench->add_option("--output", bench_output, "timing report (CSV)");

  // Shared options live on the root so config files stay flat; subcommands
  // pass unmatched flags up to it.
  for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) sub->fallthrough();

  CLI11_PARSE(app, argc, argv);

  try {
    if (ingest->parsed()) return run_ingest(ingest_input, ingest_output, ingest_report, ingest_idmap);
    if (simulate->parsed()) return run_simulate(shared, sim_n, sim_events, sim_max_steps, sim_init, sim_output);
    if (learn->parsed()) return run_learn(shared, learn_args, learn_output);
    if (densest->parsed())
      return run_density(shared, densest_args, false, densest_per_event, densest_oracle, densest_output,
                         densest_params);
    if (tridensest->parsed())
      return run_density(shared, tri_args, true, tri_per_event, tri_oracle, tri_output, tri_params);
    if (oracle->parsed()) return run_oracle(oracle_args, oracle_kind, oracle_method, oracle_output);
    if (compare->parsed()) return run_compare(shared, compare_args, compare_tri, compare_output);
    if (bench->parsed()) return run_bench(shared, bench_args, bench_tri, bench_output);
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << '\n';
    return 1;
  }
  return 0;
}
