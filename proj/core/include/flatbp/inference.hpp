#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "flatbp/wiring.hpp"

namespace flatbp {

enum class BPMode { max_product, sum_product };

/// Per variable-state unary log potentials, flat over the global variable
/// state axis. All entries must be finite; per-run input, separate from the
/// model itself.
struct Evidence {
  std::vector<double> values;

  static Evidence zeros(const CompiledGraph& compiled) {
    return Evidence{std::vector<double>(compiled.wiring().num_var_states, 0.0)};
  }
};

/// Both message directions as flat 1D arrays, one entry per edge state.
struct MessageState {
  std::vector<double> ftov;  // factor-to-variable
  std::vector<double> vtof;  // variable-to-factor
};

struct BPOptions {
  BPMode mode = BPMode::max_product;
  int32_t num_iters = 200;
  double damping = 0.5;          // in [0, 1)
  double convergence_tol = 0.0;  // <= 0 disables early stopping
  double neg_inf_clamp = -1e20;  // floor for every message and belief entry
  int32_t num_threads = 1;
};

struct InferenceResult {
  std::vector<double> beliefs;   // one entry per variable state
  std::vector<int32_t> decoded;  // per-variable argmax, ties to the lowest state
  std::optional<double> score;   // nullopt when the decoded assignment hits an
                                 // excluded configuration
  int32_t iterations_run = 0;
  double final_delta = 0.0;      // max-abs ftov change in the last iteration
};

/// Zero-initialized messages sized for the compiled graph.
MessageState init_messages(const CompiledGraph& compiled);

/// m_{i->a}(s) = e_i(s) + sum of incoming factor-to-variable messages at
/// (i, s) excluding the one from a. Evaluated for all edge states at once
/// from the same input ftov.
std::vector<double> update_vtof(const CompiledGraph& compiled, const Evidence& evidence,
                                const std::vector<double>& ftov, const BPOptions& options = {});

/// Undamped factor-to-variable update. Max-product takes a max over the
/// factor's valid configurations selecting (i, s); sum-product replaces the
/// max with a stable log-sum-exp. Edge states selected by no configuration
/// receive options.neg_inf_clamp.
std::vector<double> update_ftov(const CompiledGraph& compiled, const std::vector<double>& vtof,
                                const BPOptions& options = {});

/// new = (1 - damping) * raw + damping * old elementwise, followed by the
/// shared per-edge normalization (subtract each edge's max over states) and
/// clamping. damping == 0 reproduces the undamped update bitwise.
std::vector<double> damp(const CompiledGraph& compiled, const std::vector<double>& old_ftov,
                         const std::vector<double>& raw_ftov, const BPOptions& options = {});

/// b_i(s) = e_i(s) + sum of all incoming factor-to-variable messages.
std::vector<double> compute_beliefs(const CompiledGraph& compiled, const Evidence& evidence,
                                    const std::vector<double>& ftov,
                                    const BPOptions& options = {});

/// Per-variable argmax of beliefs, ties broken toward the lowest state index.
std::vector<int32_t> decode_beliefs(const CompiledGraph& compiled,
                                    std::span<const double> beliefs);

/// Synchronous damped loopy BP: repeats {update_vtof; update_ftov; damp}
/// options.num_iters times, or until the max-abs ftov change drops to
/// options.convergence_tol (when positive). Returns the final messages plus
/// beliefs, decoded assignment, and its score.
std::pair<MessageState, InferenceResult> run_bp(const CompiledGraph& compiled,
                                                const Evidence& evidence,
                                                const BPOptions& options = {});

/// Total log score of a complete assignment: evidence terms plus each
/// factor's log potential at the restricted tuple. Returns nullopt when some
/// factor excludes its restricted tuple.
std::optional<double> score_assignment(const CompiledGraph& compiled, const Evidence& evidence,
                                       std::span<const int32_t> assignment);

}  // namespace flatbp
