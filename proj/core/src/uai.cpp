#include "flatbp/uai.hpp"

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "flatbp/error.hpp"

namespace flatbp {
namespace {

constexpr int64_t kMaxTableEntries = int64_t{1} << 28;

// Whitespace tokenizer that tracks line numbers for error reporting.
class TokenReader {
 public:
  explicit TokenReader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_whitespace();
    return pos_ == text_.size();
  }

  int line() const { return line_; }

  std::string_view next(const char* what) {
    skip_whitespace();
    if (pos_ == text_.size()) {
      fail(ErrorCode::parse_error,
           "line " + std::to_string(line_) + ": unexpected end of input, expected " + what);
    }
    const size_t start = pos_;
    while (pos_ < text_.size() && !is_space(text_[pos_])) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  int64_t next_int(const char* what, int64_t min_value) {
    const int at_line = peek_line();
    const std::string_view token = next(what);
    int64_t value = 0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size()) {
      fail(ErrorCode::parse_error, "line " + std::to_string(at_line) + ": expected " + what +
                                       ", got \"" + std::string(token) + "\"");
    }
    if (value < min_value) {
      fail(ErrorCode::parse_error, "line " + std::to_string(at_line) + ": " + what + " must be >= " +
                                       std::to_string(min_value) + ", got " + std::to_string(value));
    }
    return value;
  }

  double next_real(const char* what) {
    const int at_line = peek_line();
    const std::string_view token = next(what);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || end != token.data() + token.size() || !std::isfinite(value)) {
      fail(ErrorCode::parse_error, "line " + std::to_string(at_line) + ": expected " + what +
                                       ", got \"" + std::string(token) + "\"");
    }
    return value;
  }

 private:
  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
  }

  void skip_whitespace() {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  int peek_line() {
    skip_whitespace();
    return line_;
  }

  std::string_view text_;
  size_t pos_ = 0;
  int line_ = 1;
};

int64_t table_size(const UaiModel& model, const std::vector<int32_t>& scope) {
  int64_t size = 1;
  for (int32_t var : scope) {
    const int64_t cardinality = model.cardinalities[var];
    if (size > kMaxTableEntries / cardinality) {
      fail(ErrorCode::parse_error, "factor table exceeds " + std::to_string(kMaxTableEntries) +
                                       " entries");
    }
    size *= cardinality;
  }
  return size;
}

void append_real(std::string& out, double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.16e", value);
  out += buffer;
}

}  // namespace

UaiModel parse_uai(std::string_view text) {
  TokenReader reader(text);

  const std::string_view network = reader.next("network type");
  if (network == "BAYES") {
    fail(ErrorCode::unsupported_network, "BAYES networks are not supported, only MARKOV");
  }
  if (network != "MARKOV") {
    fail(ErrorCode::parse_error,
         "line " + std::to_string(reader.line()) + ": expected MARKOV preamble, got \"" +
             std::string(network) + "\"");
  }

  UaiModel model;
  const int64_t num_vars = reader.next_int("variable count", 0);
  model.cardinalities.reserve(num_vars);
  for (int64_t i = 0; i < num_vars; ++i) {
    model.cardinalities.push_back(
        static_cast<int32_t>(reader.next_int("variable cardinality", 1)));
  }

  const int64_t num_factors = reader.next_int("factor count", 0);
  model.factors.resize(num_factors);
  for (int64_t f = 0; f < num_factors; ++f) {
    const int64_t arity = reader.next_int("factor arity", 1);
    UaiFactor& factor = model.factors[f];
    factor.scope.reserve(arity);
    for (int64_t i = 0; i < arity; ++i) {
      const int64_t var = reader.next_int("scope variable index", 0);
      if (var >= num_vars) {
        fail(ErrorCode::parse_error, "line " + std::to_string(reader.line()) +
                                         ": scope variable " + std::to_string(var) +
                                         " out of range, model has " + std::to_string(num_vars) +
                                         " variables");
      }
      factor.scope.push_back(static_cast<int32_t>(var));
    }
  }

  for (int64_t f = 0; f < num_factors; ++f) {
    UaiFactor& factor = model.factors[f];
    const int64_t expected = table_size(model, factor.scope);
    const int at_line = reader.line();
    const int64_t count = reader.next_int("table entry count", 0);
    if (count != expected) {
      fail(ErrorCode::parse_error, "line " + std::to_string(at_line) + ": factor " +
                                       std::to_string(f) + " announces " + std::to_string(count) +
                                       " table entries, its scope cardinalities require " +
                                       std::to_string(expected));
    }
    factor.table.reserve(count);
    for (int64_t i = 0; i < count; ++i) {
      const int entry_line = reader.line();
      const double value = reader.next_real("table entry");
      if (value < 0.0) {
        fail(ErrorCode::parse_error, "line " + std::to_string(entry_line) +
                                         ": negative table entry " + std::to_string(value));
      }
      factor.table.push_back(value);
    }
  }

  if (!reader.at_end()) {
    fail(ErrorCode::parse_error, "line " + std::to_string(reader.line()) +
                                     ": unexpected content after the last factor table");
  }
  return model;
}

std::pair<FactorGraph, Evidence> uai_to_graph(const UaiModel& model) {
  FactorGraph graph;
  graph.add_variables(model.cardinalities);

  std::vector<int64_t> offsets(model.cardinalities.size() + 1, 0);
  for (size_t i = 0; i < model.cardinalities.size(); ++i) {
    offsets[i + 1] = offsets[i] + model.cardinalities[i];
  }
  Evidence evidence{std::vector<double>(offsets.back(), 0.0)};

  for (size_t f = 0; f < model.factors.size(); ++f) {
    const UaiFactor& factor = model.factors[f];
    const int64_t expected = table_size(model, factor.scope);
    if (static_cast<int64_t>(factor.table.size()) != expected) {
      fail(ErrorCode::configuration_error,
           "uai factor " + std::to_string(f) + " has " + std::to_string(factor.table.size()) +
               " table entries, its scope cardinalities require " + std::to_string(expected));
    }

    bool any_positive = false;
    bool any_zero = false;
    for (double entry : factor.table) {
      if (entry < 0.0 || !std::isfinite(entry)) {
        fail(ErrorCode::invalid_potential,
             "uai factor " + std::to_string(f) + " has a negative or non-finite table entry");
      }
      if (entry > 0.0) {
        any_positive = true;
      } else {
        any_zero = true;
      }
    }
    if (!any_positive) {
      fail(ErrorCode::infeasible_model,
           "uai factor " + std::to_string(f) + " has an identically zero table");
    }

    if (factor.scope.size() == 1 && !any_zero) {
      const int64_t offset = offsets[factor.scope[0]];
      for (size_t s = 0; s < factor.table.size(); ++s) {
        evidence.values[offset + s] += std::log(factor.table[s]);
      }
      continue;
    }

    // Positive entries become valid configurations; zero entries are left
    // out, which forbids those tuples.
    const int32_t arity = static_cast<int32_t>(factor.scope.size());
    std::vector<std::vector<int32_t>> configs;
    std::vector<double> log_potentials;
    std::vector<int32_t> tuple(arity, 0);
    for (size_t position = 0; position < factor.table.size(); ++position) {
      if (factor.table[position] > 0.0) {
        int64_t rest = static_cast<int64_t>(position);
        for (int32_t i = arity - 1; i >= 0; --i) {
          const int32_t cardinality = model.cardinalities[factor.scope[i]];
          tuple[i] = static_cast<int32_t>(rest % cardinality);
          rest /= cardinality;
        }
        configs.push_back(tuple);
        log_potentials.push_back(std::log(factor.table[position]));
      }
    }
    graph.add_enumeration_factor(factor.scope, configs, log_potentials);
  }

  return {std::move(graph), std::move(evidence)};
}

std::string write_uai(const FactorGraph& graph, const Evidence& evidence) {
  std::vector<int64_t> offsets(graph.num_variables() + 1, 0);
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    offsets[i + 1] = offsets[i] + graph.variables()[i].cardinality;
  }
  if (evidence.values.size() != static_cast<size_t>(offsets.back())) {
    fail(ErrorCode::configuration_error,
         "evidence has " + std::to_string(evidence.values.size()) + " entries, graph has " +
             std::to_string(offsets.back()) + " variable states");
  }

  std::string out;
  out += "MARKOV\n";
  out += std::to_string(graph.num_variables());
  out += "\n";
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(graph.variables()[i].cardinality);
  }
  out += "\n";
  out += std::to_string(graph.num_factors() + graph.num_variables());
  out += "\n";

  for (const EnumerationFactor& factor : graph.factors()) {
    out += std::to_string(factor.arity());
    for (int32_t var : factor.scope) {
      out += ' ';
      out += std::to_string(var);
    }
    out += "\n";
  }
  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    out += "1 ";
    out += std::to_string(i);
    out += "\n";
  }
  out += "\n";

  std::vector<double> table;
  for (const EnumerationFactor& factor : graph.factors()) {
    int64_t size = 1;
    std::vector<int64_t> strides(factor.arity(), 1);
    for (int32_t i = factor.arity() - 1; i >= 0; --i) {
      strides[i] = size;
      const int32_t cardinality = graph.cardinality(factor.scope[i]);
      if (size > kMaxTableEntries / cardinality) {
        fail(ErrorCode::io_error, "factor table exceeds " + std::to_string(kMaxTableEntries) +
                                      " entries, too large for a dense uai table");
      }
      size *= cardinality;
    }
    table.assign(size, 0.0);
    for (int64_t c = 0; c < factor.num_configs(); ++c) {
      const std::span<const int32_t> config = factor.config(c);
      int64_t position = 0;
      for (int32_t i = 0; i < factor.arity(); ++i) position += config[i] * strides[i];
      const double value = std::exp(factor.log_potentials[c]);
      if (!std::isfinite(value)) {
        fail(ErrorCode::io_error,
             "log potential " + std::to_string(factor.log_potentials[c]) +
                 " overflows the linear-domain uai table");
      }
      table[position] = value;
    }

    out += "\n";
    out += std::to_string(size);
    out += "\n";
    for (int64_t i = 0; i < size; ++i) {
      if (i > 0) out += ' ';
      append_real(out, table[i]);
    }
    out += "\n";
  }

  for (int32_t i = 0; i < graph.num_variables(); ++i) {
    const int32_t cardinality = graph.variables()[i].cardinality;
    out += "\n";
    out += std::to_string(cardinality);
    out += "\n";
    for (int32_t s = 0; s < cardinality; ++s) {
      const double value = std::exp(evidence.values[offsets[i] + s]);
      if (!std::isfinite(value)) {
        fail(ErrorCode::io_error, "evidence value " + std::to_string(evidence.values[offsets[i] + s]) +
                                      " overflows the linear-domain uai table");
      }
      if (s > 0) out += ' ';
      append_real(out, value);
    }
    out += "\n";
  }

  return out;
}

}  // namespace flatbp
