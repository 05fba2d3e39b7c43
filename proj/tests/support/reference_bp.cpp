#include "support/reference_bp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace flatbp::testsupport {
namespace {

struct Edge {
  int32_t factor;
  int32_t scope_pos;
  int32_t var;
};

std::vector<Edge> edge_list(const FactorGraph& graph) {
  std::vector<Edge> edges;
  for (int32_t f = 0; f < graph.num_factors(); ++f) {
    const EnumerationFactor& factor = graph.factors()[f];
    for (int32_t p = 0; p < factor.arity(); ++p) {
      edges.push_back(Edge{f, p, factor.scope[p]});
    }
  }
  return edges;
}

std::vector<int64_t> evidence_offsets(const FactorGraph& graph) {
  std::vector<int64_t> offsets(graph.num_variables() + 1, 0);
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    offsets[i + 1] = offsets[i] + graph.variables()[i].cardinality;
  }
  return offsets;
}

}  // namespace

EdgeMessages zero_messages(const FactorGraph& graph) {
  EdgeMessages messages;
  for (const Edge& e : edge_list(graph)) {
    messages.emplace_back(graph.cardinality(e.var), 0.0);
  }
  return messages;
}

std::vector<double> flatten(const EdgeMessages& messages) {
  std::vector<double> flat;
  for (const auto& m : messages) flat.insert(flat.end(), m.begin(), m.end());
  return flat;
}

EdgeMessages unflatten(const FactorGraph& graph, const std::vector<double>& flat) {
  EdgeMessages messages = zero_messages(graph);
  size_t pos = 0;
  for (auto& m : messages) {
    for (double& v : m) v = flat[pos++];
  }
  return messages;
}

EdgeMessages ref_update_vtof(const FactorGraph& graph, const Evidence& evidence,
                             const EdgeMessages& ftov, const BPOptions& options) {
  const std::vector<Edge> edges = edge_list(graph);
  const std::vector<int64_t> offsets = evidence_offsets(graph);
  EdgeMessages vtof = zero_messages(graph);
  for (size_t e = 0; e < edges.size(); ++e) {
    const int32_t var = edges[e].var;
    for (int32_t s = 0; s < graph.cardinality(var); ++s) {
      double value = evidence.values[offsets[var] + s];
      for (size_t other = 0; other < edges.size(); ++other) {
        if (other == e || edges[other].var != var) continue;
        value += ftov[other][s];
      }
      vtof[e][s] = std::max(value, options.neg_inf_clamp);
    }
  }
  return vtof;
}

EdgeMessages ref_update_ftov(const FactorGraph& graph, const EdgeMessages& vtof,
                             const BPOptions& options) {
  const std::vector<Edge> edges = edge_list(graph);
  const double clamp = options.neg_inf_clamp;

  // Edge index of (factor, scope position): edges are listed factor by
  // factor, so the factor's first edge is found by scanning.
  std::vector<int64_t> first_edge(graph.num_factors(), 0);
  for (size_t e = 0; e < edges.size(); ++e) {
    if (edges[e].scope_pos == 0) first_edge[edges[e].factor] = static_cast<int64_t>(e);
  }

  EdgeMessages raw = zero_messages(graph);
  for (size_t e = 0; e < edges.size(); ++e) {
    const Edge& edge = edges[e];
    const EnumerationFactor& factor = graph.factors()[edge.factor];
    for (int32_t s = 0; s < graph.cardinality(edge.var); ++s) {
      std::vector<double> candidates;
      for (int64_t c = 0; c < factor.num_configs(); ++c) {
        const auto config = factor.config(c);
        if (config[edge.scope_pos] != s) continue;
        double value = factor.log_potentials[c];
        for (int32_t q = 0; q < factor.arity(); ++q) {
          if (q == edge.scope_pos) continue;
          value += vtof[first_edge[edge.factor] + q][config[q]];
        }
        candidates.push_back(value);
      }
      if (candidates.empty()) {
        raw[e][s] = clamp;
      } else if (options.mode == BPMode::max_product) {
        raw[e][s] = std::max(*std::max_element(candidates.begin(), candidates.end()), clamp);
      } else {
        const double m = std::max(*std::max_element(candidates.begin(), candidates.end()), clamp);
        double sum = 0.0;
        for (double v : candidates) sum += std::exp(v - m);
        raw[e][s] = sum > 0.0 ? std::max(m + std::log(sum), clamp) : clamp;
      }
    }
  }
  return raw;
}

EdgeMessages ref_damp(const FactorGraph& graph, const EdgeMessages& old_ftov,
                      const EdgeMessages& raw, const BPOptions& options) {
  const double alpha = options.damping;
  const double clamp = options.neg_inf_clamp;
  EdgeMessages out = zero_messages(graph);
  for (size_t e = 0; e < out.size(); ++e) {
    double edge_max = clamp;
    for (size_t s = 0; s < out[e].size(); ++s) {
      const double blended =
          alpha > 0.0 ? (1.0 - alpha) * raw[e][s] + alpha * old_ftov[e][s] : raw[e][s];
      out[e][s] = blended;
      edge_max = std::max(edge_max, blended);
    }
    for (double& v : out[e]) v = std::max(v - edge_max, clamp);
  }
  return out;
}

}  // namespace flatbp::testsupport
