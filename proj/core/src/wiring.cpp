#include "flatbp/wiring.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <string>

namespace flatbp {

namespace {

// Stable counting sort: group `values.size()` items into buckets given by
// `key`, returning the grouped permutation plus CSR offsets.
void group_by_key(const std::vector<int64_t>& key, int64_t num_buckets,
                  std::vector<int64_t>& grouped, std::vector<int64_t>& offsets) {
  offsets.assign(num_buckets + 1, 0);
  for (int64_t k : key) offsets[k + 1]++;
  for (int64_t b = 0; b < num_buckets; ++b) offsets[b + 1] += offsets[b];
  grouped.resize(key.size());
  std::vector<int64_t> cursor(offsets.begin(), offsets.end() - 1);
  for (int64_t i = 0; i < static_cast<int64_t>(key.size()); ++i) {
    grouped[cursor[key[i]]++] = i;
  }
}

}  // namespace

CompiledGraph compile(FactorGraph graph) {
  graph.validate();

  CompiledGraph compiled;
  Wiring& w = compiled.wiring_;
  const auto& variables = graph.variables();
  const auto& factors = graph.factors();
  const int32_t num_vars = static_cast<int32_t>(variables.size());
  const int32_t num_factors = static_cast<int32_t>(factors.size());

  w.var_state_offset.assign(num_vars + 1, 0);
  for (int32_t i = 0; i < num_vars; ++i) {
    w.var_state_offset[i + 1] = w.var_state_offset[i] + variables[i].cardinality;
  }
  w.num_var_states = w.var_state_offset[num_vars];

  // Edges, ordered by factor index then scope position.
  w.factor_edge_offset.assign(num_factors + 1, 0);
  for (int32_t f = 0; f < num_factors; ++f) {
    w.factor_edge_offset[f + 1] = w.factor_edge_offset[f] + factors[f].arity();
  }
  w.num_edges = w.factor_edge_offset[num_factors];
  w.edge_var.reserve(w.num_edges);
  w.edge_factor.reserve(w.num_edges);
  w.edge_scope_pos.reserve(w.num_edges);
  w.edge_state_offset.assign(1, 0);
  w.edge_state_offset.reserve(w.num_edges + 1);
  for (int32_t f = 0; f < num_factors; ++f) {
    const auto& factor = factors[f];
    for (int32_t p = 0; p < factor.arity(); ++p) {
      const int32_t var = factor.scope[p];
      w.edge_var.push_back(var);
      w.edge_factor.push_back(f);
      w.edge_scope_pos.push_back(p);
      w.edge_state_offset.push_back(w.edge_state_offset.back() + variables[var].cardinality);
    }
  }
  w.num_edge_states = w.edge_state_offset.back();

  w.edge_to_var.resize(w.num_edge_states);
  for (int64_t e = 0; e < w.num_edges; ++e) {
    const int64_t base = w.var_state_offset[w.edge_var[e]];
    for (int64_t es = w.edge_state_offset[e]; es < w.edge_state_offset[e + 1]; ++es) {
      w.edge_to_var[es] = base + (es - w.edge_state_offset[e]);
    }
  }

  // Configurations and their entries, ordered by factor then configuration
  // then scope position. Entries of one configuration are contiguous.
  w.config_offset.assign(num_factors + 1, 0);
  for (int32_t f = 0; f < num_factors; ++f) {
    w.config_offset[f + 1] = w.config_offset[f] + factors[f].num_configs();
  }
  w.num_configs = w.config_offset[num_factors];
  w.config_log_potentials.reserve(w.num_configs);
  w.config_entry_offset.assign(1, 0);
  w.config_entry_offset.reserve(w.num_configs + 1);
  for (int32_t f = 0; f < num_factors; ++f) {
    const auto& factor = factors[f];
    const int32_t k = factor.arity();
    for (int64_t c = 0; c < factor.num_configs(); ++c) {
      w.config_log_potentials.push_back(factor.log_potentials[c]);
      w.config_entry_offset.push_back(w.config_entry_offset.back() + k);
      const auto row = factor.config(c);
      for (int32_t p = 0; p < k; ++p) {
        const int64_t edge = w.factor_edge_offset[f] + p;
        w.config_entry_to_edge_state.push_back(w.edge_state_offset[edge] + row[p]);
        w.config_segment.push_back(w.config_offset[f] + c);
      }
    }
  }
  w.num_config_entries = static_cast<int64_t>(w.config_entry_to_edge_state.size());

  group_by_key(w.config_entry_to_edge_state, w.num_edge_states, w.entries_by_edge_state,
               w.edge_state_entry_offset);
  group_by_key(w.edge_to_var, w.num_var_states, w.edge_states_by_var_state,
               w.var_state_edge_offset);

  w.factor_degree.resize(num_factors);
  for (int32_t f = 0; f < num_factors; ++f) w.factor_degree[f] = factors[f].arity();

  // Per-factor mixed-radix config lookup for assignment scoring.
  compiled.factor_strides_.resize(num_factors);
  compiled.config_lookup_.resize(num_factors);
  for (int32_t f = 0; f < num_factors; ++f) {
    const auto& factor = factors[f];
    const int32_t k = factor.arity();
    std::vector<int64_t> strides(k);
    bool encodable = true;
    int64_t stride = 1;
    for (int32_t p = k - 1; p >= 0; --p) {
      strides[p] = stride;
      const int64_t card = variables[factor.scope[p]].cardinality;
      if (stride > (int64_t{1} << 62) / card) {
        encodable = false;
        break;
      }
      stride *= card;
    }
    if (!encodable) continue;  // config_index_of falls back to a linear scan
    compiled.factor_strides_[f] = std::move(strides);
    auto& lookup = compiled.config_lookup_[f];
    lookup.reserve(factor.num_configs());
    for (int64_t c = 0; c < factor.num_configs(); ++c) {
      const auto row = factor.config(c);
      int64_t code = 0;
      for (int32_t p = 0; p < k; ++p) code += row[p] * compiled.factor_strides_[f][p];
      lookup.emplace(code, w.config_offset[f] + c);
    }
  }

  compiled.graph_ = std::move(graph);
  return compiled;
}

int64_t CompiledGraph::var_state_index(int32_t variable, int32_t state) const {
  if (variable < 0 || variable >= graph_.num_variables()) {
    fail(ErrorCode::index_out_of_range, "no variable with id " + std::to_string(variable));
  }
  if (state < 0 || state >= graph_.cardinality(variable)) {
    fail(ErrorCode::index_out_of_range,
         "state " + std::to_string(state) + " out of range for variable " +
             std::to_string(variable));
  }
  return wiring_.var_state_offset[variable] + state;
}

std::pair<int32_t, int32_t> CompiledGraph::var_state_of(int64_t flat_index) const {
  if (flat_index < 0 || flat_index >= wiring_.num_var_states) {
    fail(ErrorCode::index_out_of_range,
         "variable state index " + std::to_string(flat_index) + " out of range");
  }
  const auto& offsets = wiring_.var_state_offset;
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), flat_index);
  const int32_t variable = static_cast<int32_t>(it - offsets.begin()) - 1;
  return {variable, static_cast<int32_t>(flat_index - offsets[variable])};
}

std::optional<int64_t> CompiledGraph::config_index_of(int32_t factor,
                                                      std::span<const int32_t> tuple) const {
  if (factor < 0 || factor >= graph_.num_factors()) {
    fail(ErrorCode::index_out_of_range, "no factor with index " + std::to_string(factor));
  }
  const auto& f = graph_.factors()[factor];
  if (static_cast<int32_t>(tuple.size()) != f.arity()) {
    fail(ErrorCode::arity_mismatch, "tuple length must equal factor arity");
  }
  if (!factor_strides_[factor].empty()) {
    int64_t code = 0;
    for (int32_t p = 0; p < f.arity(); ++p) code += tuple[p] * factor_strides_[factor][p];
    const auto& lookup = config_lookup_[factor];
    const auto it = lookup.find(code);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
  }
  for (int64_t c = 0; c < f.num_configs(); ++c) {
    const auto row = f.config(c);
    if (std::equal(row.begin(), row.end(), tuple.begin(), tuple.end())) {
      return wiring_.config_offset[factor] + c;
    }
  }
  return std::nullopt;
}

namespace {

std::ofstream open_csv(const std::filesystem::path& directory, const char* name) {
  std::ofstream out(directory / name);
  if (!out) {
    fail(ErrorCode::io_error, "cannot open " + (directory / name).string() + " for writing");
  }
  return out;
}

}  // namespace

void dump_wiring_csv(const CompiledGraph& compiled, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const Wiring& w = compiled.wiring();
  const auto& graph = compiled.graph();

  {
    auto out = open_csv(directory, "variables.csv");
    out << "variable,cardinality,var_state_offset\n";
    for (int32_t i = 0; i < graph.num_variables(); ++i) {
      out << i << ',' << graph.cardinality(i) << ',' << w.var_state_offset[i] << '\n';
    }
  }
  {
    auto out = open_csv(directory, "edges.csv");
    out << "edge,factor,scope_pos,variable,edge_state_offset\n";
    for (int64_t e = 0; e < w.num_edges; ++e) {
      out << e << ',' << w.edge_factor[e] << ',' << w.edge_scope_pos[e] << ',' << w.edge_var[e]
          << ',' << w.edge_state_offset[e] << '\n';
    }
  }
  {
    auto out = open_csv(directory, "edge_states.csv");
    out << "edge_state,var_state\n";
    for (int64_t es = 0; es < w.num_edge_states; ++es) {
      out << es << ',' << w.edge_to_var[es] << '\n';
    }
  }
  {
    auto out = open_csv(directory, "configs.csv");
    out << "config,factor,local_config,log_potential\n";
    for (int32_t f = 0; f < graph.num_factors(); ++f) {
      for (int64_t g = w.config_offset[f]; g < w.config_offset[f + 1]; ++g) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.16e", w.config_log_potentials[g]);
        out << g << ',' << f << ',' << (g - w.config_offset[f]) << ',' << buf << '\n';
      }
    }
  }
  {
    auto out = open_csv(directory, "config_entries.csv");
    out << "entry,config,edge_state\n";
    for (int64_t t = 0; t < w.num_config_entries; ++t) {
      out << t << ',' << w.config_segment[t] << ',' << w.config_entry_to_edge_state[t] << '\n';
    }
  }
  {
    auto out = open_csv(directory, "entries_by_edge_state.csv");
    out << "edge_state,slot,entry\n";
    for (int64_t es = 0; es < w.num_edge_states; ++es) {
      for (int64_t i = w.edge_state_entry_offset[es]; i < w.edge_state_entry_offset[es + 1]; ++i) {
        out << es << ',' << (i - w.edge_state_entry_offset[es]) << ','
            << w.entries_by_edge_state[i] << '\n';
      }
    }
  }
  {
    auto out = open_csv(directory, "edge_states_by_var_state.csv");
    out << "var_state,slot,edge_state\n";
    for (int64_t vs = 0; vs < w.num_var_states; ++vs) {
      for (int64_t i = w.var_state_edge_offset[vs]; i < w.var_state_edge_offset[vs + 1]; ++i) {
        out << vs << ',' << (i - w.var_state_edge_offset[vs]) << ','
            << w.edge_states_by_var_state[i] << '\n';
      }
    }
  }
}

}  // namespace flatbp
