#pragma once

#include <cstdint>
#include <vector>

#include "flatbp/inference.hpp"
#include "flatbp/model_zoo.hpp"
#include "flatbp/wiring.hpp"

namespace flatbp {

struct OracleBudget {
  int64_t max_joint_states = int64_t{1} << 22;
};

struct MapResult {
  std::vector<int32_t> assignment;
  double score = 0.0;
};

/// Hidden-layer enumeration caps for rbm_exact_map.
inline constexpr int32_t kMaxExactRbmHidden = 25;

/// Exact MAP by enumerating all joint states. Ties resolve to the
/// lexicographically smallest assignment. Throws budget_exceeded when the
/// joint space is larger than the budget and infeasible_model when no joint
/// state satisfies every factor.
MapResult brute_force_map(const CompiledGraph& compiled, const Evidence& evidence,
                          const OracleBudget& budget = {});

/// Exact per-variable marginals of p(x) proportional to exp(score(x)) over
/// the valid joint states. Same budget and feasibility errors as
/// brute_force_map.
std::vector<std::vector<double>> brute_force_marginals(const CompiledGraph& compiled,
                                                       const Evidence& evidence,
                                                       const OracleBudget& budget = {});

/// Exact MAP for a bipartite binary pairwise model: enumerates the hidden
/// layer; for each hidden configuration the visible units decouple and are
/// maximized independently. Assignment is hidden units first, then visible.
MapResult rbm_exact_map(const RBMSpec& rbm);

}  // namespace flatbp
