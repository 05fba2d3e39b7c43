#include "flatbp/inference.hpp"

#include <cmath>
#include <string>

#include "parallel.hpp"

namespace flatbp {

namespace {

void check_length(const char* name, size_t got, int64_t want) {
  if (static_cast<int64_t>(got) != want) {
    fail(ErrorCode::configuration_error, std::string(name) + " has length " +
                                             std::to_string(got) + ", wiring expects " +
                                             std::to_string(want));
  }
}

void check_options(const BPOptions& options) {
  if (options.damping < 0.0 || options.damping >= 1.0) {
    fail(ErrorCode::configuration_error, "damping must lie in [0, 1)");
  }
  if (options.num_iters < 0) {
    fail(ErrorCode::configuration_error, "num_iters must be >= 0");
  }
  if (!(options.neg_inf_clamp < 0.0)) {
    fail(ErrorCode::configuration_error, "neg_inf_clamp must be negative");
  }
}

// acc[vs] = evidence[vs] + sum of ftov over the incident edge states, in
// ascending edge-state order.
void accumulate_var_states(const Wiring& w, const Evidence& evidence,
                           const std::vector<double>& ftov, std::vector<double>& acc,
                           int32_t num_threads) {
  acc.resize(w.num_var_states);
  detail::parallel_for(0, w.num_var_states, num_threads, [&](int64_t vs) {
    double a = evidence.values[vs];
    for (int64_t i = w.var_state_edge_offset[vs]; i < w.var_state_edge_offset[vs + 1]; ++i) {
      a += ftov[w.edge_states_by_var_state[i]];
    }
    acc[vs] = a;
  });
}

void update_vtof_into(const CompiledGraph& compiled, const Evidence& evidence,
                      const std::vector<double>& ftov, const BPOptions& options,
                      std::vector<double>& acc, std::vector<double>& vtof) {
  const Wiring& w = compiled.wiring();
  accumulate_var_states(w, evidence, ftov, acc, options.num_threads);
  vtof.resize(w.num_edge_states);
  const double clamp = options.neg_inf_clamp;
  detail::parallel_for(0, w.num_edge_states, options.num_threads, [&](int64_t es) {
    vtof[es] = std::max(acc[w.edge_to_var[es]] - ftov[es], clamp);
  });
}

void update_ftov_into(const CompiledGraph& compiled, const std::vector<double>& vtof,
                      const BPOptions& options, std::vector<double>& config_score,
                      std::vector<double>& raw) {
  const Wiring& w = compiled.wiring();
  const double clamp = options.neg_inf_clamp;

  // Phase 1: score every configuration (log potential plus incoming messages
  // over its contiguous entries).
  config_score.resize(w.num_configs);
  detail::parallel_for(0, w.num_configs, options.num_threads, [&](int64_t g) {
    double s = w.config_log_potentials[g];
    for (int64_t t = w.config_entry_offset[g]; t < w.config_entry_offset[g + 1]; ++t) {
      s += vtof[w.config_entry_to_edge_state[t]];
    }
    config_score[g] = s;
  });

  // Phase 2: per edge state, reduce over the entries that select it. The own
  // message is subtracted from the configuration score.
  raw.resize(w.num_edge_states);
  if (options.mode == BPMode::max_product) {
    detail::parallel_for(0, w.num_edge_states, options.num_threads, [&](int64_t es) {
      const double own = vtof[es];
      double best = clamp;
      for (int64_t i = w.edge_state_entry_offset[es]; i < w.edge_state_entry_offset[es + 1];
           ++i) {
        const double val = config_score[w.config_segment[w.entries_by_edge_state[i]]] - own;
        if (val > best) best = val;
      }
      raw[es] = best;
    });
  } else {
    detail::parallel_for(0, w.num_edge_states, options.num_threads, [&](int64_t es) {
      const double own = vtof[es];
      const int64_t lo = w.edge_state_entry_offset[es];
      const int64_t hi = w.edge_state_entry_offset[es + 1];
      double m = clamp;
      for (int64_t i = lo; i < hi; ++i) {
        const double val = config_score[w.config_segment[w.entries_by_edge_state[i]]] - own;
        if (val > m) m = val;
      }
      double sum = 0.0;
      for (int64_t i = lo; i < hi; ++i) {
        const double val = config_score[w.config_segment[w.entries_by_edge_state[i]]] - own;
        sum += std::exp(val - m);
      }
      raw[es] = sum > 0.0 ? std::max(m + std::log(sum), clamp) : clamp;
    });
  }
}

// Blend, normalize per edge (subtract the edge's max over states), clamp.
// Returns the max-abs change against old_ftov.
double damp_normalize_into(const CompiledGraph& compiled, const std::vector<double>& old_ftov,
                           const std::vector<double>& raw, const BPOptions& options,
                           std::vector<double>& out) {
  const Wiring& w = compiled.wiring();
  const double alpha = options.damping;
  const double clamp = options.neg_inf_clamp;
  out.resize(w.num_edge_states);
  return detail::parallel_reduce_max(0, w.num_edges, options.num_threads, 0.0, [&](int64_t e) {
    const int64_t lo = w.edge_state_offset[e];
    const int64_t hi = w.edge_state_offset[e + 1];
    double m = clamp;
    for (int64_t i = lo; i < hi; ++i) {
      const double v = alpha > 0.0 ? (1.0 - alpha) * raw[i] + alpha * old_ftov[i] : raw[i];
      out[i] = v;
      if (v > m) m = v;
    }
    double delta = 0.0;
    for (int64_t i = lo; i < hi; ++i) {
      const double v = std::max(out[i] - m, clamp);
      out[i] = v;
      delta = std::max(delta, std::abs(v - old_ftov[i]));
    }
    return delta;
  });
}

void beliefs_into(const CompiledGraph& compiled, const Evidence& evidence,
                  const std::vector<double>& ftov, const BPOptions& options,
                  std::vector<double>& beliefs) {
  const Wiring& w = compiled.wiring();
  accumulate_var_states(w, evidence, ftov, beliefs, options.num_threads);
  const double clamp = options.neg_inf_clamp;
  for (double& b : beliefs) b = std::max(b, clamp);
}

void check_evidence(const CompiledGraph& compiled, const Evidence& evidence) {
  check_length("evidence", evidence.values.size(), compiled.wiring().num_var_states);
  for (double v : evidence.values) {
    if (!std::isfinite(v)) {
      fail(ErrorCode::configuration_error, "evidence entries must be finite");
    }
  }
}

}  // namespace

MessageState init_messages(const CompiledGraph& compiled) {
  const int64_t n = compiled.wiring().num_edge_states;
  return MessageState{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

std::vector<double> update_vtof(const CompiledGraph& compiled, const Evidence& evidence,
                                const std::vector<double>& ftov, const BPOptions& options) {
  check_length("evidence", evidence.values.size(), compiled.wiring().num_var_states);
  check_length("ftov", ftov.size(), compiled.wiring().num_edge_states);
  std::vector<double> acc, vtof;
  update_vtof_into(compiled, evidence, ftov, options, acc, vtof);
  return vtof;
}

std::vector<double> update_ftov(const CompiledGraph& compiled, const std::vector<double>& vtof,
                                const BPOptions& options) {
  check_length("vtof", vtof.size(), compiled.wiring().num_edge_states);
  std::vector<double> config_score, raw;
  update_ftov_into(compiled, vtof, options, config_score, raw);
  return raw;
}

std::vector<double> damp(const CompiledGraph& compiled, const std::vector<double>& old_ftov,
                         const std::vector<double>& raw_ftov, const BPOptions& options) {
  check_options(options);
  check_length("old ftov", old_ftov.size(), compiled.wiring().num_edge_states);
  check_length("raw ftov", raw_ftov.size(), compiled.wiring().num_edge_states);
  std::vector<double> out;
  damp_normalize_into(compiled, old_ftov, raw_ftov, options, out);
  return out;
}

std::vector<double> compute_beliefs(const CompiledGraph& compiled, const Evidence& evidence,
                                    const std::vector<double>& ftov, const BPOptions& options) {
  check_length("evidence", evidence.values.size(), compiled.wiring().num_var_states);
  check_length("ftov", ftov.size(), compiled.wiring().num_edge_states);
  std::vector<double> beliefs;
  beliefs_into(compiled, evidence, ftov, options, beliefs);
  return beliefs;
}

std::vector<int32_t> decode_beliefs(const CompiledGraph& compiled,
                                    std::span<const double> beliefs) {
  const Wiring& w = compiled.wiring();
  check_length("beliefs", beliefs.size(), w.num_var_states);
  std::vector<int32_t> decoded(compiled.graph().num_variables());
  for (int32_t i = 0; i < compiled.graph().num_variables(); ++i) {
    const int64_t lo = w.var_state_offset[i];
    const int64_t hi = w.var_state_offset[i + 1];
    int64_t best = lo;
    for (int64_t vs = lo + 1; vs < hi; ++vs) {
      if (beliefs[vs] > beliefs[best]) best = vs;  // ties keep the lowest state
    }
    decoded[i] = static_cast<int32_t>(best - lo);
  }
  return decoded;
}

std::pair<MessageState, InferenceResult> run_bp(const CompiledGraph& compiled,
                                                const Evidence& evidence,
                                                const BPOptions& options) {
  check_options(options);
  check_evidence(compiled, evidence);

  MessageState msg = init_messages(compiled);
  InferenceResult result;

  std::vector<double> acc, config_score, raw, next;
  for (int32_t it = 0; it < options.num_iters; ++it) {
    update_vtof_into(compiled, evidence, msg.ftov, options, acc, msg.vtof);
    update_ftov_into(compiled, msg.vtof, options, config_score, raw);
    const double delta = damp_normalize_into(compiled, msg.ftov, raw, options, next);
    msg.ftov.swap(next);
    result.iterations_run = it + 1;
    result.final_delta = delta;
    if (options.convergence_tol > 0.0 && delta <= options.convergence_tol) break;
  }

  beliefs_into(compiled, evidence, msg.ftov, options, result.beliefs);
  result.decoded = decode_beliefs(compiled, result.beliefs);
  result.score = score_assignment(compiled, evidence, result.decoded);
  return {std::move(msg), std::move(result)};
}

std::optional<double> score_assignment(const CompiledGraph& compiled, const Evidence& evidence,
                                       std::span<const int32_t> assignment) {
  const Wiring& w = compiled.wiring();
  const auto& graph = compiled.graph();
  check_length("evidence", evidence.values.size(), w.num_var_states);
  check_length("assignment", assignment.size(), graph.num_variables());
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    if (assignment[i] < 0 || assignment[i] >= graph.cardinality(i)) {
      fail(ErrorCode::index_out_of_range,
           "assignment state " + std::to_string(assignment[i]) + " out of range for variable " +
               std::to_string(i));
    }
  }

  double score = 0.0;
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    score += evidence.values[w.var_state_offset[i] + assignment[i]];
  }
  std::vector<int32_t> tuple;
  for (int32_t f = 0; f < graph.num_factors(); ++f) {
    const auto& factor = graph.factors()[f];
    tuple.resize(factor.arity());
    for (int32_t p = 0; p < factor.arity(); ++p) tuple[p] = assignment[factor.scope[p]];
    const auto g = compiled.config_index_of(f, tuple);
    if (!g) return std::nullopt;  // excluded configuration
    score += w.config_log_potentials[*g];
  }
  return score;
}

}  // namespace flatbp
