#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "flatbp/graph.hpp"
#include "flatbp/inference.hpp"

namespace flatbp {

/// Deterministic standard-normal stream with a fixed, portable algorithm:
/// MT19937-64 (as mandated by the C++ standard) feeding Box-Muller, cosine
/// branch only, two 53-bit uniforms consumed per draw. The same seed yields
/// the same sequence on every platform, up to last-ulp differences in libm.
class NormalStream {
 public:
  explicit NormalStream(uint64_t seed) : rng_(seed) {}

  double next();

 private:
  std::mt19937_64 rng_;
};

/// Random bipartite binary pairwise model: hidden biases b, visible biases c,
/// weights W, drawn i.i.d. N(0, 1).
struct RBMSpec {
  int32_t num_hidden = 0;
  int32_t num_visible = 0;
  uint64_t seed = 0;
  std::vector<double> hidden_bias;   // length num_hidden
  std::vector<double> visible_bias;  // length num_visible
  std::vector<double> weights;       // num_hidden x num_visible, row-major

  double weight(int32_t j, int32_t k) const { return weights[int64_t{j} * num_visible + k]; }
};

/// Draw order is fixed: hidden biases, then visible biases, then weights
/// row-major, all from NormalStream(seed).
RBMSpec random_rbm(int32_t num_hidden, int32_t num_visible, uint64_t seed);

/// Direct score of a full assignment under the bilinear form
/// sum_j b_j h_j + sum_k c_k v_k + sum_jk W_jk h_j v_k, summed in that order.
double rbm_score(const RBMSpec& rbm, std::span<const int32_t> hidden,
                 std::span<const int32_t> visible);

/// Factor-graph encoding: binary variables, hidden units first; biases enter
/// as evidence on state 1; one dense pairwise factor per (hidden, visible)
/// pair, row-major over hidden units, whose only nonzero log potential is
/// W_jk at (1, 1). Assignment scores on the graph equal rbm_score.
std::pair<FactorGraph, Evidence> rbm_to_factor_graph(const RBMSpec& rbm);

/// Binary height x width grid with spin-like couplings: evidence [-f, +f]
/// per cell and a [[J, -J], [-J, J]] pairwise factor per nearest-neighbor
/// pair. Fields are drawn first (row-major), then couplings in factor
/// insertion order (per cell: right neighbor, then down neighbor). Fields
/// scale with field_scale, couplings with coupling_scale.
std::pair<FactorGraph, Evidence> ising_grid(int32_t height, int32_t width, uint64_t seed,
                                            double coupling_scale = 1.0,
                                            double field_scale = 1.0);

}  // namespace flatbp
