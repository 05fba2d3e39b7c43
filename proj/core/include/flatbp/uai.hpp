#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flatbp/graph.hpp"
#include "flatbp/inference.hpp"

namespace flatbp {

/// One dense factor of a UAI MARKOV model. The table is linear-domain
/// (entries >= 0, not necessarily normalized), row-major over the scope
/// order, with length equal to the product of the scope cardinalities.
struct UaiFactor {
  std::vector<int32_t> scope;
  std::vector<double> table;
};

struct UaiModel {
  std::vector<int32_t> cardinalities;
  std::vector<UaiFactor> factors;
};

/// Parses a whitespace-delimited UAI MARKOV document. Throws parse_error
/// with a line reference on malformed input (wrong preamble keyword, count
/// mismatches, negative or non-numeric table entries, trailing garbage) and
/// unsupported_network on a BAYES preamble.
UaiModel parse_uai(std::string_view text);

/// Converts a parsed model to a factor graph plus evidence. Tables are
/// log-transformed; zero entries are omitted from the valid configurations
/// (forbidden). Arity-1 tables with all entries positive fold into the
/// evidence vector (summed when a variable has several); arity-1 tables
/// containing a zero stay enumeration factors, since a forbidden state has
/// no finite evidence encoding. A table that is identically zero raises
/// infeasible_model.
std::pair<FactorGraph, Evidence> uai_to_graph(const UaiModel& model);

/// Renders a graph and its evidence as a UAI MARKOV document: one dense
/// table per factor (exp of the log potential for valid configurations, 0
/// elsewhere) followed by one unary factor per variable carrying the
/// evidence. Numbers are written with 17 significant digits so re-parsing
/// reproduces them exactly.
std::string write_uai(const FactorGraph& graph, const Evidence& evidence);

}  // namespace flatbp
