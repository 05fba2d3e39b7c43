#include "flatbp/model_zoo.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace flatbp {

double NormalStream::next() {
  // 53-bit uniforms; u1 shifted into (0, 1] so the log stays finite.
  const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

RBMSpec random_rbm(int32_t num_hidden, int32_t num_visible, uint64_t seed) {
  if (num_hidden < 1 || num_visible < 1) {
    fail(ErrorCode::configuration_error, "unit counts must be >= 1");
  }
  RBMSpec rbm;
  rbm.num_hidden = num_hidden;
  rbm.num_visible = num_visible;
  rbm.seed = seed;
  NormalStream normal(seed);
  rbm.hidden_bias.resize(num_hidden);
  for (auto& b : rbm.hidden_bias) b = normal.next();
  rbm.visible_bias.resize(num_visible);
  for (auto& c : rbm.visible_bias) c = normal.next();
  rbm.weights.resize(int64_t{num_hidden} * num_visible);
  for (auto& w : rbm.weights) w = normal.next();
  return rbm;
}

double rbm_score(const RBMSpec& rbm, std::span<const int32_t> hidden,
                 std::span<const int32_t> visible) {
  double score = 0.0;
  for (int32_t j = 0; j < rbm.num_hidden; ++j) {
    if (hidden[j]) score += rbm.hidden_bias[j];
  }
  for (int32_t k = 0; k < rbm.num_visible; ++k) {
    if (visible[k]) score += rbm.visible_bias[k];
  }
  for (int32_t j = 0; j < rbm.num_hidden; ++j) {
    if (!hidden[j]) continue;
    for (int32_t k = 0; k < rbm.num_visible; ++k) {
      if (visible[k]) score += rbm.weight(j, k);
    }
  }
  return score;
}

std::pair<FactorGraph, Evidence> rbm_to_factor_graph(const RBMSpec& rbm) {
  FactorGraph graph;
  const int32_t h = rbm.num_hidden;
  const int32_t v = rbm.num_visible;
  graph.add_variables(std::vector<int32_t>(h + v, 2));

  Evidence evidence;
  evidence.values.resize(2 * int64_t{h + v}, 0.0);
  for (int32_t j = 0; j < h; ++j) evidence.values[2 * j + 1] = rbm.hidden_bias[j];
  for (int32_t k = 0; k < v; ++k) evidence.values[2 * (h + k) + 1] = rbm.visible_bias[k];

  for (int32_t j = 0; j < h; ++j) {
    for (int32_t k = 0; k < v; ++k) {
      graph.add_dense_pairwise_factor(j, h + k, {{0.0, 0.0}, {0.0, rbm.weight(j, k)}});
    }
  }
  return {std::move(graph), std::move(evidence)};
}

std::pair<FactorGraph, Evidence> ising_grid(int32_t height, int32_t width, uint64_t seed,
                                            double coupling_scale, double field_scale) {
  if (height < 1 || width < 1) {
    fail(ErrorCode::configuration_error, "grid dimensions must be >= 1");
  }
  FactorGraph graph;
  const int64_t cells = int64_t{height} * width;
  graph.add_variables(std::vector<int32_t>(cells, 2));

  NormalStream normal(seed);
  Evidence evidence;
  evidence.values.resize(2 * cells);
  for (int64_t c = 0; c < cells; ++c) {
    const double f = field_scale * normal.next();
    evidence.values[2 * c] = -f;
    evidence.values[2 * c + 1] = f;
  }

  auto var_at = [width](int32_t r, int32_t c) { return r * width + c; };
  auto add_coupling = [&](int32_t a, int32_t b) {
    const double j = coupling_scale * normal.next();
    graph.add_dense_pairwise_factor(a, b, {{j, -j}, {-j, j}});
  };
  for (int32_t r = 0; r < height; ++r) {
    for (int32_t c = 0; c < width; ++c) {
      if (c + 1 < width) add_coupling(var_at(r, c), var_at(r, c + 1));
      if (r + 1 < height) add_coupling(var_at(r, c), var_at(r + 1, c));
    }
  }
  return {std::move(graph), std::move(evidence)};
}

}  // namespace flatbp
