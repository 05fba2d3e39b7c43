#include "flatbp/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace flatbp {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_cardinality: return "invalid cardinality";
    case ErrorCode::invalid_scope: return "invalid scope";
    case ErrorCode::invalid_config: return "invalid configuration";
    case ErrorCode::duplicate_config: return "duplicate configuration";
    case ErrorCode::arity_mismatch: return "arity mismatch";
    case ErrorCode::invalid_potential: return "invalid potential";
    case ErrorCode::index_out_of_range: return "index out of range";
    case ErrorCode::configuration_error: return "configuration error";
    case ErrorCode::budget_exceeded: return "budget exceeded";
    case ErrorCode::infeasible_model: return "infeasible model";
    case ErrorCode::parse_error: return "parse error";
    case ErrorCode::unsupported_network: return "unsupported network";
    case ErrorCode::io_error: return "io error";
  }
  return "unknown error";
}

std::vector<int32_t> FactorGraph::add_variables(const std::vector<int32_t>& cardinalities) {
  for (int32_t card : cardinalities) {
    if (card < 2) {
      fail(ErrorCode::invalid_cardinality,
           "cardinality must be >= 2, got " + std::to_string(card));
    }
  }
  std::vector<int32_t> ids;
  ids.reserve(cardinalities.size());
  for (int32_t card : cardinalities) {
    int32_t id = static_cast<int32_t>(variables_.size());
    variables_.push_back(Variable{id, card});
    ids.push_back(id);
  }
  return ids;
}

int32_t FactorGraph::cardinality(int32_t variable) const {
  if (variable < 0 || variable >= num_variables()) {
    fail(ErrorCode::index_out_of_range, "no variable with id " + std::to_string(variable));
  }
  return variables_[variable].cardinality;
}

void FactorGraph::check_factor(const EnumerationFactor& factor) const {
  const int32_t k = factor.arity();
  if (k < 1) {
    fail(ErrorCode::invalid_scope, "factor scope must not be empty");
  }
  for (int32_t id : factor.scope) {
    if (id < 0 || id >= num_variables()) {
      fail(ErrorCode::invalid_scope, "scope references unknown variable " + std::to_string(id));
    }
  }
  {
    std::vector<int32_t> sorted_scope(factor.scope);
    std::sort(sorted_scope.begin(), sorted_scope.end());
    if (std::adjacent_find(sorted_scope.begin(), sorted_scope.end()) != sorted_scope.end()) {
      fail(ErrorCode::invalid_scope, "duplicate variable in factor scope");
    }
  }
  const int64_t m = factor.num_configs();
  if (m < 1) {
    fail(ErrorCode::invalid_config, "factor needs at least one valid configuration");
  }
  if (static_cast<int64_t>(factor.configs.size()) != m * k) {
    fail(ErrorCode::arity_mismatch,
         "configuration rows and log potentials disagree in length");
  }
  for (int64_t c = 0; c < m; ++c) {
    const auto row = factor.config(c);
    for (int32_t p = 0; p < k; ++p) {
      const int32_t card = variables_[factor.scope[p]].cardinality;
      if (row[p] < 0 || row[p] >= card) {
        fail(ErrorCode::invalid_config,
             "state " + std::to_string(row[p]) + " out of range for variable " +
                 std::to_string(factor.scope[p]) + " (cardinality " + std::to_string(card) + ")");
      }
    }
  }
  for (double lp : factor.log_potentials) {
    if (!std::isfinite(lp)) {
      fail(ErrorCode::invalid_potential, "log potentials must be finite");
    }
  }
  // Distinctness via a lexicographic sort of row indices.
  std::vector<int64_t> order(m);
  for (int64_t c = 0; c < m; ++c) order[c] = c;
  auto row_less = [&](int64_t a, int64_t b) {
    const auto ra = factor.config(a);
    const auto rb = factor.config(b);
    return std::lexicographical_compare(ra.begin(), ra.end(), rb.begin(), rb.end());
  };
  std::sort(order.begin(), order.end(), row_less);
  for (int64_t c = 0; c + 1 < m; ++c) {
    const auto ra = factor.config(order[c]);
    const auto rb = factor.config(order[c + 1]);
    if (std::equal(ra.begin(), ra.end(), rb.begin(), rb.end())) {
      fail(ErrorCode::duplicate_config, "valid configurations must be pairwise distinct");
    }
  }
}

int32_t FactorGraph::add_enumeration_factor(const std::vector<int32_t>& scope,
                                            const std::vector<std::vector<int32_t>>& valid_configs,
                                            const std::vector<double>& log_potentials) {
  if (valid_configs.size() != log_potentials.size()) {
    fail(ErrorCode::arity_mismatch, "one log potential per valid configuration required");
  }
  EnumerationFactor factor;
  factor.scope = scope;
  factor.log_potentials = log_potentials;
  factor.configs.reserve(valid_configs.size() * scope.size());
  for (const auto& row : valid_configs) {
    if (row.size() != scope.size()) {
      fail(ErrorCode::arity_mismatch, "configuration tuple length must equal scope size");
    }
    factor.configs.insert(factor.configs.end(), row.begin(), row.end());
  }
  check_factor(factor);
  factors_.push_back(std::move(factor));
  return static_cast<int32_t>(factors_.size()) - 1;
}

int32_t FactorGraph::add_dense_pairwise_factor(
    int32_t var_i, int32_t var_j, const std::vector<std::vector<double>>& log_potential_matrix) {
  const int32_t di = cardinality(var_i);
  const int32_t dj = cardinality(var_j);
  if (static_cast<int32_t>(log_potential_matrix.size()) != di) {
    fail(ErrorCode::arity_mismatch, "matrix must have one row per state of the first variable");
  }
  for (const auto& row : log_potential_matrix) {
    if (static_cast<int32_t>(row.size()) != dj) {
      fail(ErrorCode::arity_mismatch,
           "matrix must have one column per state of the second variable");
    }
    for (double v : row) {
      if (!std::isfinite(v)) {
        fail(ErrorCode::invalid_potential, "log potentials must be finite");
      }
    }
  }
  std::vector<std::vector<int32_t>> configs;
  std::vector<double> log_potentials;
  configs.reserve(static_cast<size_t>(di) * dj);
  log_potentials.reserve(static_cast<size_t>(di) * dj);
  for (int32_t si = 0; si < di; ++si) {
    for (int32_t sj = 0; sj < dj; ++sj) {
      configs.push_back({si, sj});
      log_potentials.push_back(log_potential_matrix[si][sj]);
    }
  }
  return add_enumeration_factor({var_i, var_j}, configs, log_potentials);
}

void FactorGraph::validate() const {
  for (size_t i = 0; i < variables_.size(); ++i) {
    if (variables_[i].id != static_cast<int32_t>(i)) {
      fail(ErrorCode::invalid_scope, "variable ids must be dense and sequential");
    }
    if (variables_[i].cardinality < 2) {
      fail(ErrorCode::invalid_cardinality,
           "variable " + std::to_string(i) + " has cardinality < 2");
    }
  }
  for (const auto& factor : factors_) {
    check_factor(factor);
  }
}

}  // namespace flatbp
