#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flatbp/error.hpp"

namespace flatbp {

struct Variable {
  int32_t id = 0;
  int32_t cardinality = 0;  // number of discrete states, >= 2
};

/// A factor given by an explicit list of valid configurations of its scope.
/// Configurations absent from the list are forbidden. Log potentials are
/// always finite; exclusion from `configs` is the only way to rule a
/// configuration out.
struct EnumerationFactor {
  std::vector<int32_t> scope;          // variable ids, ordered, no duplicates
  std::vector<int32_t> configs;        // num_configs x arity, row-major
  std::vector<double> log_potentials;  // one per configuration

  int32_t arity() const { return static_cast<int32_t>(scope.size()); }
  int64_t num_configs() const { return static_cast<int64_t>(log_potentials.size()); }
  std::span<const int32_t> config(int64_t c) const {
    return std::span<const int32_t>(configs).subspan(c * arity(), arity());
  }
};

/// Symbolic factor graph over discrete variables with heterogeneous
/// cardinalities. Mutating operations validate eagerly and throw Error on
/// malformed input, so a graph that exists is always well formed; validate()
/// re-checks every invariant from scratch.
///
/// Construction is single-writer. Once finalized (validated) the graph is
/// immutable from the caller's side and safe to share across readers.
class FactorGraph {
 public:
  /// Appends one variable per cardinality, assigning fresh sequential ids.
  /// Returns the new ids in order.
  std::vector<int32_t> add_variables(const std::vector<int32_t>& cardinalities);

  /// Appends a factor over `scope` with the given valid configurations and
  /// log potentials. Returns the factor index.
  int32_t add_enumeration_factor(const std::vector<int32_t>& scope,
                                 const std::vector<std::vector<int32_t>>& valid_configs,
                                 const std::vector<double>& log_potentials);

  /// Convenience wrapper: a factor over (var_i, var_j) listing all
  /// d_i * d_j configurations in row-major order with the matrix entries as
  /// log potentials.
  int32_t add_dense_pairwise_factor(int32_t var_i, int32_t var_j,
                                    const std::vector<std::vector<double>>& log_potential_matrix);

  /// Re-checks all structural invariants. Throws Error if any is violated.
  void validate() const;

  int32_t num_variables() const { return static_cast<int32_t>(variables_.size()); }
  int32_t num_factors() const { return static_cast<int32_t>(factors_.size()); }
  int32_t cardinality(int32_t variable) const;

  const std::vector<Variable>& variables() const { return variables_; }
  const std::vector<EnumerationFactor>& factors() const { return factors_; }

 private:
  void check_factor(const EnumerationFactor& factor) const;

  std::vector<Variable> variables_;
  std::vector<EnumerationFactor> factors_;
};

}  // namespace flatbp
