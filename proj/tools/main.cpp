// flatbp command line: RBM benchmark harness plus generic inference, oracle,
// and wiring-dump entry points over UAI model files.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "flatbp/error.hpp"
#include "flatbp/graph.hpp"
#include "flatbp/inference.hpp"
#include "flatbp/model_zoo.hpp"
#include "flatbp/oracle.hpp"
#include "flatbp/uai.hpp"
#include "flatbp/wiring.hpp"

namespace {

using namespace flatbp;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::io_error, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (!in.good() && !in.eof()) fail(ErrorCode::io_error, "cannot read " + path);
  return std::move(buffer).str();
}

// Numbers are printed with up to 17 significant digits so identical runs
// produce identical text.
std::string format_real(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::string format_ms(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.3f", value);
  return buffer;
}

std::vector<std::vector<double>> marginals_of(const CompiledGraph& compiled,
                                              const std::vector<double>& beliefs) {
  const auto& variables = compiled.graph().variables();
  std::vector<std::vector<double>> result(variables.size());
  for (size_t v = 0; v < variables.size(); ++v) {
    const int64_t offset = compiled.wiring().var_state_offset[v];
    const int32_t card = variables[v].cardinality;
    double best = beliefs[offset];
    for (int32_t s = 1; s < card; ++s) best = std::max(best, beliefs[offset + s]);
    double total = 0.0;
    result[v].resize(card);
    for (int32_t s = 0; s < card; ++s) {
      result[v][s] = std::exp(beliefs[offset + s] - best);
      total += result[v][s];
    }
    for (int32_t s = 0; s < card; ++s) result[v][s] /= total;
  }
  return result;
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::io_error, "cannot open " + path + " for writing");
  out << content;
  if (!out.good()) fail(ErrorCode::io_error, "cannot write " + path);
}

// ---------------------------------------------------------------------------
// bench-rbm

struct BenchConfig {
  std::vector<int32_t> units{30};
  int32_t trials = 20;
  int64_t seed = 0;
  int32_t iters = 200;
  double damping = 0.5;
  std::string oracle = "auto";  // on | off | auto (auto: on when within cap)
  int32_t repeat = 10;
  int32_t threads = 1;
  bool parallel_trials = false;
  std::string out;
};

struct TrialRow {
  int32_t units = 0;
  int64_t seed = 0;
  double build_ms = 0.0;
  double compile_ms = 0.0;
  double infer_ms_mean = 0.0;
  double infer_ms_std = 0.0;
  int32_t repeats = 0;
  std::optional<double> score_lbp;
  std::optional<double> score_oracle;
  std::optional<bool> exact_match;
  int32_t iterations_run = 0;
  std::optional<double> oracle_ms;
};

constexpr double kExactMatchTol = 1e-9;

TrialRow run_trial(int32_t units, int64_t seed, const BenchConfig& config, bool record_timing) {
  TrialRow row;
  row.units = units;
  row.seed = seed;

  auto start = Clock::now();
  const RBMSpec rbm = random_rbm(units / 2, units / 2, static_cast<uint64_t>(seed));
  auto [graph, evidence] = rbm_to_factor_graph(rbm);
  row.build_ms = ms_since(start);

  start = Clock::now();
  const CompiledGraph compiled = compile(std::move(graph));
  row.compile_ms = ms_since(start);

  BPOptions options;
  options.mode = BPMode::max_product;
  options.num_iters = config.iters;
  options.damping = config.damping;
  options.num_threads = config.threads;

  const int32_t repeats = record_timing ? config.repeat : 1;
  std::vector<double> times;
  times.reserve(repeats);
  InferenceResult result;
  for (int32_t r = 0; r < repeats; ++r) {
    start = Clock::now();
    auto [msg, run_result] = run_bp(compiled, evidence, options);
    times.push_back(ms_since(start));
    result = std::move(run_result);
  }
  if (record_timing) {
    row.repeats = repeats;
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= repeats;
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    row.infer_ms_mean = mean;
    row.infer_ms_std = std::sqrt(var / repeats);
  }
  row.score_lbp = result.score;
  row.iterations_run = result.iterations_run;

  const bool want_oracle =
      config.oracle == "on" || (config.oracle == "auto" && units / 2 <= kMaxExactRbmHidden);
  if (want_oracle) {
    start = Clock::now();
    const MapResult oracle = rbm_exact_map(rbm);
    if (record_timing) row.oracle_ms = ms_since(start);
    row.score_oracle = oracle.score;
    row.exact_match =
        row.score_lbp && std::abs(*row.score_lbp - oracle.score) <= kExactMatchTol;
  }
  return row;
}

void append_csv_row(std::string& csv, const TrialRow& row, double damping, int32_t iters,
                    bool record_timing) {
  csv += "1,";  // schema_version
  csv += std::to_string(row.units) + "," + std::to_string(row.seed) + ",";
  if (record_timing) {
    csv += format_ms(row.build_ms) + "," + format_ms(row.compile_ms) + "," +
           format_ms(row.infer_ms_mean) + "," + format_ms(row.infer_ms_std) + ",";
  } else {
    csv += ",,,,";
  }
  csv += std::to_string(row.repeats) + "," + std::to_string(iters) + "," + format_real(damping) +
         ",";
  csv += (row.score_lbp ? format_real(*row.score_lbp) : std::string()) + ",";
  csv += (row.score_oracle ? format_real(*row.score_oracle) : std::string()) + ",";
  csv += (row.exact_match ? (*row.exact_match ? "1" : "0") : std::string()) + ",";
  csv += std::to_string(row.iterations_run) + ",";
  csv += row.oracle_ms ? format_ms(*row.oracle_ms) : std::string();
  csv += "\n";
}

int cmd_bench_rbm(const BenchConfig& config) {
  for (int32_t units : config.units) {
    if (units < 2 || units % 2 != 0) {
      fail(ErrorCode::configuration_error,
           "--units entries must be even and at least 2, got " + std::to_string(units));
    }
    if (config.oracle == "on" && units / 2 > kMaxExactRbmHidden) {
      fail(ErrorCode::budget_exceeded,
           "oracle requested for " + std::to_string(units) + " units but the exact RBM oracle " +
               "handles at most " + std::to_string(2 * kMaxExactRbmHidden) +
               " units; pass --oracle off (or auto) for larger models");
    }
  }

  const bool record_timing = !config.parallel_trials;
  std::string csv =
      "schema_version,units,seed,build_ms,compile_ms,infer_ms_mean,infer_ms_std,repeats,iters,"
      "damping,score_lbp,score_oracle,exact_match,iterations_run,oracle_ms\n";

  for (int32_t units : config.units) {
    std::vector<TrialRow> rows(config.trials);
    if (config.parallel_trials) {
      std::vector<std::future<TrialRow>> futures;
      futures.reserve(config.trials);
      for (int32_t t = 0; t < config.trials; ++t) {
        futures.push_back(std::async(std::launch::async, run_trial, units, config.seed + t,
                                     std::cref(config), false));
      }
      for (int32_t t = 0; t < config.trials; ++t) rows[t] = futures[t].get();
    } else {
      for (int32_t t = 0; t < config.trials; ++t) {
        rows[t] = run_trial(units, config.seed + t, config, true);
      }
    }

    int exact = 0;
    int with_oracle = 0;
    double mean_infer = 0.0;
    for (const TrialRow& row : rows) {
      append_csv_row(csv, row, config.damping, config.iters, record_timing);
      if (row.exact_match.has_value()) {
        ++with_oracle;
        if (*row.exact_match) ++exact;
      }
      mean_infer += row.infer_ms_mean;
    }
    mean_infer /= config.trials;

    if (with_oracle > 0) {
      std::fprintf(stderr, "units %d: exact match %d/%d\n", units, exact, with_oracle);
    } else if (record_timing) {
      std::fprintf(stderr, "units %d: %d trials, mean inference %.3f ms\n", units, config.trials,
                   mean_infer);
    } else {
      std::fprintf(stderr, "units %d: %d trials\n", units, config.trials);
    }
  }

  write_output(config.out, csv);
  return 0;
}

// ---------------------------------------------------------------------------
// infer

struct InferConfig {
  std::string model;
  std::string mode = "max";
  int32_t iters = 200;
  double damping = 0.5;
  double tol = 0.0;
  int32_t threads = 1;
  std::string out;
};

int cmd_infer(const InferConfig& config) {
  const auto [graph, evidence] = uai_to_graph(parse_uai(read_file(config.model)));
  const CompiledGraph compiled = compile(graph);

  BPOptions options;
  options.mode = config.mode == "sum" ? BPMode::sum_product : BPMode::max_product;
  options.num_iters = config.iters;
  options.damping = config.damping;
  options.convergence_tol = config.tol;
  options.num_threads = config.threads;
  const auto [msg, result] = run_bp(compiled, evidence, options);

  if (!config.out.empty()) {
    nlohmann::json doc;
    doc["mode"] = config.mode == "sum" ? "sum" : "max";
    doc["iterations_run"] = result.iterations_run;
    doc["final_delta"] = result.final_delta;
    if (options.mode == BPMode::max_product) {
      doc["decoded"] = result.decoded;
      if (result.score) {
        doc["score"] = *result.score;
      } else {
        doc["score"] = nullptr;
      }
    } else {
      doc["marginals"] = marginals_of(compiled, result.beliefs);
    }
    write_output(config.out, doc.dump(2) + "\n");
    return 0;
  }

  std::string text;
  if (options.mode == BPMode::max_product) {
    text += "decoded:";
    for (int32_t s : result.decoded) text += " " + std::to_string(s);
    text += "\nscore: ";
    text += result.score ? format_real(*result.score) : "unscorable (excluded configuration)";
    text += "\n";
  } else {
    const auto marginals = marginals_of(compiled, result.beliefs);
    for (size_t v = 0; v < marginals.size(); ++v) {
      text += "var " + std::to_string(v) + ":";
      for (double p : marginals[v]) {
        char buffer[24];
        std::snprintf(buffer, sizeof(buffer), " %.6f", p);
        text += buffer;
      }
      text += "\n";
    }
  }
  text += "iterations: " + std::to_string(result.iterations_run) + "\n";
  write_output("", text);
  return 0;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleConfig {
  std::string model;
  int64_t max_states = OracleBudget{}.max_joint_states;
  std::string out;
};

int cmd_oracle(const OracleConfig& config) {
  const auto [graph, evidence] = uai_to_graph(parse_uai(read_file(config.model)));
  const CompiledGraph compiled = compile(graph);

  OracleBudget budget;
  budget.max_joint_states = config.max_states;
  const MapResult result = brute_force_map(compiled, evidence, budget);

  if (!config.out.empty()) {
    nlohmann::json doc;
    doc["assignment"] = result.assignment;
    doc["score"] = result.score;
    write_output(config.out, doc.dump(2) + "\n");
    return 0;
  }

  std::string text = "assignment:";
  for (int32_t s : result.assignment) text += " " + std::to_string(s);
  text += "\nscore: " + format_real(result.score) + "\n";
  write_output("", text);
  return 0;
}

// ---------------------------------------------------------------------------
// dump-wiring

int cmd_dump_wiring(const std::string& model, const std::string& out_dir) {
  const auto [graph, evidence] = uai_to_graph(parse_uai(read_file(model)));
  const CompiledGraph compiled = compile(graph);
  dump_wiring_csv(compiled, out_dir);
  std::fprintf(stderr, "wrote wiring tables to %s\n", out_dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Flat-array loopy belief propagation toolkit"};
  app.require_subcommand(1);

  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand(
      "bench-rbm", "Benchmark max-product LBP on random RBMs, one CSV row per trial");
  bench_cmd->add_option("--units", bench.units,
                        "Total unit counts (even, split half hidden half visible)");
  bench_cmd->add_option("--trials", bench.trials, "RBM instances per unit count")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--seed", bench.seed, "First seed; trial t uses seed + t");
  bench_cmd->add_option("--iters", bench.iters, "BP iterations")->check(CLI::PositiveNumber);
  bench_cmd->add_option("--damping", bench.damping, "Damping factor in [0, 1)");
  bench_cmd->add_option("--oracle", bench.oracle, "Exact MAP comparison: on, off, or auto")
      ->check(CLI::IsMember({"on", "off", "auto"}));
  bench_cmd->add_option("--repeat", bench.repeat, "Timed inference repetitions per trial")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_option("--threads", bench.threads, "Engine threads")
      ->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--parallel-trials", bench.parallel_trials,
                      "Run trials concurrently; quality only, timing columns left blank");
  bench_cmd->add_option("--out", bench.out, "CSV destination (default stdout)");

  InferConfig infer;
  auto* infer_cmd = app.add_subcommand("infer", "Run LBP on a UAI model file");
  infer_cmd->add_option("--model", infer.model, "UAI MARKOV file")->required();
  infer_cmd->add_option("--mode", infer.mode, "max (MAP decode) or sum (marginals)")
      ->check(CLI::IsMember({"max", "sum"}));
  infer_cmd->add_option("--iters", infer.iters, "BP iterations")->check(CLI::PositiveNumber);
  infer_cmd->add_option("--damping", infer.damping, "Damping factor in [0, 1)");
  infer_cmd->add_option("--tol", infer.tol, "Early-stop tolerance on message change");
  infer_cmd->add_option("--threads", infer.threads, "Engine threads")
      ->check(CLI::PositiveNumber);
  infer_cmd->add_option("--out", infer.out, "Write JSON here instead of text to stdout");

  OracleConfig oracle;
  auto* oracle_cmd =
      app.add_subcommand("oracle", "Exact MAP by enumeration on a small UAI model");
  oracle_cmd->add_option("--model", oracle.model, "UAI MARKOV file")->required();
  oracle_cmd->add_option("--max-states", oracle.max_states, "Joint state budget")
      ->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--out", oracle.out, "Write JSON here instead of text to stdout");

  std::string dump_model;
  std::string dump_dir;
  auto* dump_cmd = app.add_subcommand("dump-wiring", "Write compiled wiring tables as CSV");
  dump_cmd->add_option("--model", dump_model, "UAI MARKOV file")->required();
  dump_cmd->add_option("--out-dir", dump_dir, "Directory for the CSV files")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (bench_cmd->parsed()) return cmd_bench_rbm(bench);
    if (infer_cmd->parsed()) return cmd_infer(infer);
    if (oracle_cmd->parsed()) return cmd_oracle(oracle);
    if (dump_cmd->parsed()) return cmd_dump_wiring(dump_model, dump_dir);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
