#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "flatbp/graph.hpp"

namespace flatbp {

/// Flat index layout compiled from a factor graph.
///
/// Three global index spaces are laid out consecutively and deterministically:
///   variable states   numbered by variable id, then state;
///   edge states       edges ordered by factor index, then scope position,
///                     each edge contributing one state per state of its
///                     variable;
///   configurations    numbered by factor index, then configuration position,
///                     each configuration contributing one entry per scope
///                     position (entries for one configuration are contiguous).
///
/// The scatter direction (config entry -> edge state) is the canonical table;
/// the gather direction (edge state -> touching entries) and the per-variable
/// incidence lists are derived from it by stable counting sorts at compile
/// time, so all derived tables are reproducible element for element.
struct Wiring {
  int64_t num_var_states = 0;
  int64_t num_edges = 0;
  int64_t num_edge_states = 0;
  int64_t num_configs = 0;
  int64_t num_config_entries = 0;

  std::vector<int64_t> var_state_offset;  // num_variables + 1
  std::vector<int32_t> edge_var;          // per edge: the variable it connects
  std::vector<int32_t> edge_factor;       // per edge: the factor it connects
  std::vector<int32_t> edge_scope_pos;    // per edge: position within the factor scope
  std::vector<int64_t> edge_state_offset;  // num_edges + 1
  std::vector<int64_t> factor_edge_offset; // num_factors + 1: first edge of each factor

  std::vector<int64_t> edge_to_var;  // per edge state: the global variable state it selects

  std::vector<int64_t> config_offset;          // num_factors + 1: first global configuration
  std::vector<double> config_log_potentials;   // per global configuration
  std::vector<int64_t> config_entry_to_edge_state;  // per entry (scatter direction)
  std::vector<int64_t> config_segment;              // per entry: global configuration index
  std::vector<int64_t> config_entry_offset;         // num_configs + 1

  // Gather direction: entries grouped by the edge state they touch.
  std::vector<int64_t> entries_by_edge_state;    // permutation of entry indices
  std::vector<int64_t> edge_state_entry_offset;  // num_edge_states + 1

  // Incidence: edge states grouped by the variable state they map to.
  std::vector<int64_t> edge_states_by_var_state;  // permutation of edge state indices
  std::vector<int64_t> var_state_edge_offset;     // num_var_states + 1

  std::vector<int32_t> factor_degree;  // arity per factor

  bool operator==(const Wiring&) const = default;
};

/// An immutable factor graph together with its compiled wiring. Safe to share
/// across threads once built.
class CompiledGraph {
 public:
  const FactorGraph& graph() const { return graph_; }
  const Wiring& wiring() const { return wiring_; }

  /// Global variable-state index of (variable, state). Throws on out-of-range
  /// input.
  int64_t var_state_index(int32_t variable, int32_t state) const;

  /// Inverse of var_state_index.
  std::pair<int32_t, int32_t> var_state_of(int64_t flat_index) const;

  /// Global configuration index of the factor's configuration equal to
  /// `tuple`, or nullopt if the tuple is not among its valid configurations.
  std::optional<int64_t> config_index_of(int32_t factor, std::span<const int32_t> tuple) const;

 private:
  friend CompiledGraph compile(FactorGraph graph);
  CompiledGraph() = default;

  FactorGraph graph_;
  Wiring wiring_;
  // Per factor: mixed-radix strides over the scope (empty when the state
  // space does not fit in 63 bits) and encoded-tuple -> global config maps.
  std::vector<std::vector<int64_t>> factor_strides_;
  std::vector<std::unordered_map<int64_t, int64_t>> config_lookup_;
};

/// Validates the graph and builds the flat layout. The layout is a pure
/// function of the graph: equal graphs compile to identical wiring tables.
CompiledGraph compile(FactorGraph graph);

/// Writes each wiring table to `directory` as a CSV file with a documenting
/// header row. Intended for inspection and debugging.
void dump_wiring_csv(const CompiledGraph& compiled, const std::filesystem::path& directory);

}  // namespace flatbp
