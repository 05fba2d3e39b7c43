#include "flatbp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flatbp/error.hpp"
#include "flatbp/graph.hpp"

namespace flatbp {
namespace {

void check_inputs(const CompiledGraph& compiled, const Evidence& evidence,
                  const OracleBudget& budget) {
  if (budget.max_joint_states < 1) {
    fail(ErrorCode::configuration_error, "oracle budget must be at least one joint state");
  }
  const auto expected = static_cast<size_t>(compiled.wiring().num_var_states);
  if (evidence.values.size() != expected) {
    fail(ErrorCode::configuration_error,
         "evidence has " + std::to_string(evidence.values.size()) + " entries, graph has " +
             std::to_string(expected) + " variable states");
  }
}

int64_t count_joint_states(const FactorGraph& graph, const OracleBudget& budget) {
  int64_t count = 1;
  for (const Variable& v : graph.variables()) {
    if (count > budget.max_joint_states / v.cardinality) {
      fail(ErrorCode::budget_exceeded,
           "joint state space exceeds the oracle budget of " +
               std::to_string(budget.max_joint_states) + " states");
    }
    count *= v.cardinality;
  }
  return count;
}

// Advances `state` to the lexicographic successor; false once the last
// assignment (all cardinalities maxed) has been visited.
bool next_state(std::vector<int32_t>& state, const std::vector<Variable>& vars) {
  for (int64_t i = static_cast<int64_t>(state.size()) - 1; i >= 0; --i) {
    if (state[i] + 1 < vars[i].cardinality) {
      ++state[i];
      return true;
    }
    state[i] = 0;
  }
  return false;
}

// Score of one complete assignment, or nullopt when a factor excludes its
// restricted tuple. Summation order is fixed: evidence by variable, then
// factors by index.
std::optional<double> joint_score(const CompiledGraph& compiled, const Evidence& evidence,
                                  std::span<const int32_t> state, std::vector<int32_t>& scratch) {
  const FactorGraph& graph = compiled.graph();
  const Wiring& wiring = compiled.wiring();

  double score = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    score += evidence.values[wiring.var_state_offset[i] + state[i]];
  }
  for (int32_t f = 0; f < graph.num_factors(); ++f) {
    const EnumerationFactor& factor = graph.factors()[f];
    scratch.clear();
    for (int32_t var : factor.scope) scratch.push_back(state[var]);
    const std::optional<int64_t> config = compiled.config_index_of(f, scratch);
    if (!config) return std::nullopt;
    score += wiring.config_log_potentials[*config];
  }
  return score;
}

}  // namespace

MapResult brute_force_map(const CompiledGraph& compiled, const Evidence& evidence,
                          const OracleBudget& budget) {
  check_inputs(compiled, evidence, budget);
  const FactorGraph& graph = compiled.graph();
  count_joint_states(graph, budget);

  std::vector<int32_t> state(graph.num_variables(), 0);
  std::vector<int32_t> scratch;
  MapResult best;
  bool found = false;
  do {
    const std::optional<double> score = joint_score(compiled, evidence, state, scratch);
    if (score && (!found || *score > best.score)) {
      best.assignment = state;
      best.score = *score;
      found = true;
    }
  } while (next_state(state, graph.variables()));

  if (!found) {
    fail(ErrorCode::infeasible_model, "every joint state hits an excluded configuration");
  }
  return best;
}

std::vector<std::vector<double>> brute_force_marginals(const CompiledGraph& compiled,
                                                       const Evidence& evidence,
                                                       const OracleBudget& budget) {
  check_inputs(compiled, evidence, budget);
  const FactorGraph& graph = compiled.graph();
  const Wiring& wiring = compiled.wiring();
  count_joint_states(graph, budget);

  // First pass: the maximum score over valid states, for a stable softmax.
  std::vector<int32_t> state(graph.num_variables(), 0);
  std::vector<int32_t> scratch;
  double max_score = 0.0;
  bool found = false;
  do {
    const std::optional<double> score = joint_score(compiled, evidence, state, scratch);
    if (score && (!found || *score > max_score)) {
      max_score = *score;
      found = true;
    }
  } while (next_state(state, graph.variables()));
  if (!found) {
    fail(ErrorCode::infeasible_model, "every joint state hits an excluded configuration");
  }

  // Second pass: accumulate exp(score - max) per variable state.
  std::vector<double> weight_sums(wiring.num_var_states, 0.0);
  double total = 0.0;
  std::fill(state.begin(), state.end(), 0);
  do {
    const std::optional<double> score = joint_score(compiled, evidence, state, scratch);
    if (!score) continue;
    const double weight = std::exp(*score - max_score);
    total += weight;
    for (size_t i = 0; i < state.size(); ++i) {
      weight_sums[wiring.var_state_offset[i] + state[i]] += weight;
    }
  } while (next_state(state, graph.variables()));

  std::vector<std::vector<double>> marginals(graph.num_variables());
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    const int32_t cardinality = graph.variables()[i].cardinality;
    marginals[i].resize(cardinality);
    for (int32_t s = 0; s < cardinality; ++s) {
      marginals[i][s] = weight_sums[wiring.var_state_offset[i] + s] / total;
    }
  }
  return marginals;
}

MapResult rbm_exact_map(const RBMSpec& rbm) {
  const int32_t num_hidden = rbm.num_hidden;
  const int32_t num_visible = rbm.num_visible;
  if (num_hidden < 1 || num_visible < 1) {
    fail(ErrorCode::configuration_error, "rbm must have at least one hidden and one visible unit");
  }
  if (rbm.hidden_bias.size() != static_cast<size_t>(num_hidden) ||
      rbm.visible_bias.size() != static_cast<size_t>(num_visible) ||
      rbm.weights.size() != static_cast<size_t>(num_hidden) * num_visible) {
    fail(ErrorCode::configuration_error, "rbm parameter vectors do not match the layer sizes");
  }
  if (num_hidden > kMaxExactRbmHidden) {
    fail(ErrorCode::budget_exceeded,
         "exact rbm map enumerates 2^" + std::to_string(num_hidden) + " hidden states; the cap is 2^" +
             std::to_string(kMaxExactRbmHidden));
  }

  // For a fixed hidden configuration the visible units decouple: each
  // contributes max(0, activation) where activation = c_k + sum_j h_j W_jk.
  // Activations are maintained incrementally across the lexicographic walk
  // (an odometer step flips a short suffix of hidden units) and recomputed
  // from scratch periodically to keep rounding drift bounded.
  std::vector<int32_t> hidden(num_hidden, 0);
  std::vector<double> activation(rbm.visible_bias.begin(), rbm.visible_bias.end());
  double hidden_bias_sum = 0.0;

  const auto recompute = [&]() {
    hidden_bias_sum = 0.0;
    std::copy(rbm.visible_bias.begin(), rbm.visible_bias.end(), activation.begin());
    for (int32_t j = 0; j < num_hidden; ++j) {
      if (hidden[j] == 0) continue;
      hidden_bias_sum += rbm.hidden_bias[j];
      for (int32_t k = 0; k < num_visible; ++k) activation[k] += rbm.weight(j, k);
    }
  };
  const auto config_score = [&]() {
    double score = hidden_bias_sum;
    for (int32_t k = 0; k < num_visible; ++k) {
      if (activation[k] > 0.0) score += activation[k];
    }
    return score;
  };

  std::vector<int32_t> best_hidden = hidden;
  double best_score = config_score();
  int64_t steps = 0;
  for (;;) {
    int32_t j = num_hidden - 1;
    while (j >= 0 && hidden[j] == 1) {
      hidden[j] = 0;
      hidden_bias_sum -= rbm.hidden_bias[j];
      for (int32_t k = 0; k < num_visible; ++k) activation[k] -= rbm.weight(j, k);
      --j;
    }
    if (j < 0) break;
    hidden[j] = 1;
    hidden_bias_sum += rbm.hidden_bias[j];
    for (int32_t k = 0; k < num_visible; ++k) activation[k] += rbm.weight(j, k);

    if ((++steps & 0xfff) == 0) recompute();
    const double score = config_score();
    if (score > best_score) {
      best_score = score;
      best_hidden = hidden;
    }
  }

  // Decode the visible layer from exactly recomputed activations; zero
  // activation resolves to state 0, the lexicographically smaller maximizer.
  hidden = best_hidden;
  recompute();
  MapResult result;
  result.assignment.resize(static_cast<size_t>(num_hidden) + num_visible);
  std::copy(best_hidden.begin(), best_hidden.end(), result.assignment.begin());
  for (int32_t k = 0; k < num_visible; ++k) {
    result.assignment[num_hidden + k] = activation[k] > 0.0 ? 1 : 0;
  }
  result.score = rbm_score(rbm, std::span<const int32_t>(result.assignment).first(num_hidden),
                           std::span<const int32_t>(result.assignment).subspan(num_hidden));
  return result;
}

}  // namespace flatbp
