#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "flatbp/inference.hpp"
#include "flatbp/model_zoo.hpp"
#include "flatbp/uai.hpp"
#include "flatbp/wiring.hpp"
#include "support/random_models.hpp"
#include "support/test_util.hpp"

using namespace flatbp;
using testsupport::close_abs;
using testsupport::error_code_of;

namespace {

std::string single_variable_doc() {
  return "MARKOV\n1\n2\n1\n1 0\n\n2\n0.4 0.6\n";
}

}  // namespace

TEST_CASE("parse_uai reads a minimal document") {
  const UaiModel model = parse_uai(single_variable_doc());
  CHECK(model.cardinalities == std::vector<int32_t>{2});
  REQUIRE(model.factors.size() == 1);
  CHECK(model.factors[0].scope == std::vector<int32_t>{0});
  CHECK(model.factors[0].table == std::vector<double>{0.4, 0.6});
}

TEST_CASE("parse_uai is indifferent to whitespace layout") {
  const UaiModel model = parse_uai("MARKOV 2 2 2 1 2 0 1 4 1 0 0 1");
  CHECK(model.cardinalities == std::vector<int32_t>{2, 2});
  REQUIRE(model.factors.size() == 1);
  CHECK(model.factors[0].scope == std::vector<int32_t>{0, 1});
  CHECK(model.factors[0].table == std::vector<double>{1.0, 0.0, 0.0, 1.0});
}

TEST_CASE("parse_uai rejects malformed documents with line references") {
  const struct {
    const char* text;
    ErrorCode code;
  } cases[] = {
      {"BAYES\n1\n2\n1\n1 0\n2\n0.5 0.5\n", ErrorCode::unsupported_network},
      {"MARKO\n1\n2\n0\n", ErrorCode::parse_error},
      {"", ErrorCode::parse_error},
      {"MARKOV\n-1\n", ErrorCode::parse_error},
      {"MARKOV\n1\n0\n0\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 3\n2\n0.5 0.5\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n0\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 0\n3\n0.5 0.5 0.5\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 0\n2\n0.5\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 0\n2\n0.5 -0.1\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 0\n2\n0.5 frog\n", ErrorCode::parse_error},
      {"MARKOV\n1\n2\n1\n1 0\n2\n0.5 0.5\nextra\n", ErrorCode::parse_error},
  };
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(error_code_of([&] { parse_uai(c.text); }) == c.code);
  }

  // Errors carry the offending line number.
  try {
    parse_uai("MARKOV\n1\n2\n1\n1 0\n2\n0.5 oops\n");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 7") != std::string::npos);
  }
}

TEST_CASE("uai_to_graph folds positive unary tables into evidence") {
  const auto [graph, evidence] = uai_to_graph(parse_uai(single_variable_doc()));
  CHECK(graph.num_variables() == 1);
  CHECK(graph.num_factors() == 0);
  REQUIRE(evidence.values.size() == 2);
  CHECK(close_abs(evidence.values[0], std::log(0.4), 1e-15));
  CHECK(close_abs(evidence.values[1], std::log(0.6), 1e-15));
}

TEST_CASE("uai_to_graph sums repeated unary tables") {
  const UaiModel model = parse_uai(
      "MARKOV\n1\n2\n2\n1 0\n1 0\n\n2\n0.4 0.6\n\n2\n0.5 2.0\n");
  const auto [graph, evidence] = uai_to_graph(model);
  CHECK(graph.num_factors() == 0);
  CHECK(close_abs(evidence.values[0], std::log(0.4) + std::log(0.5), 1e-15));
  CHECK(close_abs(evidence.values[1], std::log(0.6) + std::log(2.0), 1e-15));
}

TEST_CASE("uai_to_graph turns zero entries into forbidden configurations") {
  const UaiModel model = parse_uai("MARKOV 2 2 2 1 2 0 1 4 1 0 0 1");
  const auto [graph, evidence] = uai_to_graph(model);
  CHECK(graph.num_factors() == 1);
  const CompiledGraph compiled = compile(graph);
  CHECK(compiled.wiring().num_configs == 2);

  CHECK(score_assignment(compiled, evidence, std::vector<int32_t>{0, 0}).has_value());
  CHECK(score_assignment(compiled, evidence, std::vector<int32_t>{1, 1}).has_value());
  CHECK_FALSE(score_assignment(compiled, evidence, std::vector<int32_t>{0, 1}).has_value());
  CHECK_FALSE(score_assignment(compiled, evidence, std::vector<int32_t>{1, 0}).has_value());
}

TEST_CASE("uai_to_graph keeps a unary table with zeros as a factor") {
  const UaiModel model = parse_uai("MARKOV\n1\n2\n1\n1 0\n\n2\n0 1\n");
  const auto [graph, evidence] = uai_to_graph(model);
  CHECK(graph.num_factors() == 1);
  CHECK(evidence.values == std::vector<double>{0.0, 0.0});

  const CompiledGraph compiled = compile(graph);
  CHECK_FALSE(score_assignment(compiled, evidence, std::vector<int32_t>{0}).has_value());
  const auto allowed = score_assignment(compiled, evidence, std::vector<int32_t>{1});
  REQUIRE(allowed.has_value());
  CHECK(close_abs(*allowed, 0.0, 1e-15));
}

TEST_CASE("uai_to_graph rejects an identically zero table") {
  const UaiModel model = parse_uai("MARKOV\n1\n2\n1\n1 0\n\n2\n0 0\n");
  CHECK(error_code_of([&] { uai_to_graph(model); }) == ErrorCode::infeasible_model);
}

TEST_CASE("write_uai renders an evidence-only graph") {
  FactorGraph graph;
  graph.add_variables({2});
  const std::string text = write_uai(graph, Evidence{{0.0, std::log(2.0)}});
  CHECK(text.find("MARKOV") == 0);

  const UaiModel model = parse_uai(text);
  CHECK(model.cardinalities == std::vector<int32_t>{2});
  REQUIRE(model.factors.size() == 1);
  CHECK(close_abs(model.factors[0].table[0], 1.0, 1e-15));
  CHECK(close_abs(model.factors[0].table[1], 2.0, 1e-15));
}

TEST_CASE("write_uai then parse_uai round-trips scores exactly where expected") {
  for (uint64_t seed = 0; seed < 8; ++seed) {
    CAPTURE(seed);
    const auto model = (seed % 2 == 0) ? testsupport::random_sparse_loopy_model(seed)
                                       : testsupport::random_dense_loopy_model(seed);
    const CompiledGraph compiled = compile(model.graph);

    const std::string text = write_uai(model.graph, model.evidence);
    const auto [round_graph, round_evidence] = uai_to_graph(parse_uai(text));
    const CompiledGraph round_compiled = compile(round_graph);

    CHECK(round_graph.num_variables() == model.graph.num_variables());

    std::mt19937_64 rng(seed * 31 + 7);
    for (int trial = 0; trial < 50; ++trial) {
      const auto assignment = testsupport::random_assignment(rng, model.graph);
      const auto original = score_assignment(compiled, model.evidence, assignment);
      const auto round = score_assignment(round_compiled, round_evidence, assignment);
      CHECK(original.has_value() == round.has_value());
      if (original && round) CHECK(close_abs(*original, *round, 1e-9));
    }
  }
}

TEST_CASE("an RBM survives the UAI round trip") {
  const RBMSpec rbm = random_rbm(3, 3, 21);
  const auto [graph, evidence] = rbm_to_factor_graph(rbm);
  const auto [round_graph, round_evidence] = uai_to_graph(parse_uai(write_uai(graph, evidence)));

  const CompiledGraph compiled = compile(graph);
  const CompiledGraph round_compiled = compile(round_graph);
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto assignment = testsupport::random_assignment(rng, graph);
    const auto original = score_assignment(compiled, evidence, assignment);
    const auto round = score_assignment(round_compiled, round_evidence, assignment);
    REQUIRE(original.has_value());
    REQUIRE(round.has_value());
    CHECK(close_abs(*original, *round, 1e-9));
  }
}

TEST_CASE("write_uai validates the evidence length") {
  FactorGraph graph;
  graph.add_variables({2});
  CHECK(error_code_of([&] { write_uai(graph, Evidence{{0.0}}); }) ==
        ErrorCode::configuration_error);
}
