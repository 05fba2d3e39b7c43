#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <limits>
#include <vector>

#include "flatbp/graph.hpp"
#include "flatbp/inference.hpp"
#include "flatbp/wiring.hpp"
#include "support/random_models.hpp"
#include "support/test_util.hpp"

using namespace flatbp;
using testsupport::error_code_of;

TEST_CASE("add_variables assigns fresh sequential ids") {
  FactorGraph graph;
  CHECK(graph.add_variables({2, 2, 3}) == std::vector<int32_t>{0, 1, 2});
  CHECK(graph.num_variables() == 3);
  CHECK(graph.cardinality(2) == 3);

  FactorGraph five;
  five.add_variables({2, 2, 2, 2, 2});
  CHECK(five.add_variables({4}) == std::vector<int32_t>{5});
}

TEST_CASE("add_variables rejects cardinality below two") {
  FactorGraph graph;
  CHECK(error_code_of([&] { graph.add_variables({1}); }) == ErrorCode::invalid_cardinality);
  CHECK(error_code_of([&] { graph.add_variables({2, 0}); }) == ErrorCode::invalid_cardinality);
  CHECK(graph.num_variables() == 0);
}

TEST_CASE("add_enumeration_factor stores a well formed factor") {
  FactorGraph graph;
  graph.add_variables({2, 2});
  const int32_t index = graph.add_enumeration_factor({0, 1}, {{0, 0}, {1, 1}}, {0.0, 1.0});
  CHECK(index == 0);
  CHECK(graph.num_factors() == 1);
  const EnumerationFactor& factor = graph.factors()[0];
  CHECK(factor.arity() == 2);
  CHECK(factor.num_configs() == 2);
  CHECK(factor.config(1)[0] == 1);
  CHECK(factor.log_potentials == std::vector<double>{0.0, 1.0});
}

TEST_CASE("add_enumeration_factor rejects malformed input") {
  FactorGraph graph;
  graph.add_variables({2, 2});

  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {{0, 2}}, {0.0});
        }) == ErrorCode::invalid_config);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 0}, {{0, 0}}, {0.0});
        }) == ErrorCode::invalid_scope);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 7}, {{0, 0}}, {0.0});
        }) == ErrorCode::invalid_scope);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({}, {}, {});
        }) == ErrorCode::invalid_scope);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {{0, 0}, {0, 0}}, {0.0, 1.0});
        }) == ErrorCode::duplicate_config);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {{0, 0}}, {0.0, 1.0});
        }) == ErrorCode::arity_mismatch);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {{0, 0, 1}}, {0.0});
        }) == ErrorCode::arity_mismatch);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {}, {});
        }) == ErrorCode::invalid_config);
  CHECK(error_code_of([&] {
          graph.add_enumeration_factor({0, 1}, {{0, 0}},
                                       {std::numeric_limits<double>::infinity()});
        }) == ErrorCode::invalid_potential);
  CHECK(graph.num_factors() == 0);
}

TEST_CASE("add_dense_pairwise_factor lists all configurations row-major") {
  FactorGraph graph;
  graph.add_variables({2, 2, 3});

  const double w = 1.5;
  graph.add_dense_pairwise_factor(0, 1, {{0.0, 0.0}, {0.0, w}});
  const EnumerationFactor& square = graph.factors()[0];
  CHECK(square.num_configs() == 4);
  CHECK(square.configs == std::vector<int32_t>{0, 0, 0, 1, 1, 0, 1, 1});
  CHECK(square.log_potentials == std::vector<double>{0.0, 0.0, 0.0, w});

  graph.add_dense_pairwise_factor(1, 2, {{1, 2, 3}, {4, 5, 6}});
  const EnumerationFactor& rect = graph.factors()[1];
  CHECK(rect.num_configs() == 6);
  CHECK(rect.configs == std::vector<int32_t>{0, 0, 0, 1, 0, 2, 1, 0, 1, 1, 1, 2});
  CHECK(rect.log_potentials == std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("add_dense_pairwise_factor rejects bad shapes and values") {
  FactorGraph graph;
  graph.add_variables({2, 3});
  CHECK(error_code_of([&] {
          graph.add_dense_pairwise_factor(0, 1, {{0.0, 0.0}, {0.0, 0.0}});
        }) == ErrorCode::arity_mismatch);
  CHECK(error_code_of([&] {
          graph.add_dense_pairwise_factor(0, 1, {{0, 0, 0}});
        }) == ErrorCode::arity_mismatch);
  CHECK(error_code_of([&] {
          graph.add_dense_pairwise_factor(
              0, 1, {{0, 0, std::numeric_limits<double>::quiet_NaN()}, {0, 0, 0}});
        }) == ErrorCode::invalid_potential);
  CHECK(error_code_of([&] {
          graph.add_dense_pairwise_factor(0, 5, {{0, 0}, {0, 0}});
        }) == ErrorCode::index_out_of_range);
}

TEST_CASE("validate accepts every graph the builders accept") {
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto model = testsupport::random_acyclic_model(seed);
    CHECK_NOTHROW(model.graph.validate());
  }
  for (uint64_t seed = 0; seed < 20; ++seed) {
    const auto model = testsupport::random_sparse_loopy_model(seed);
    CHECK_NOTHROW(model.graph.validate());
  }
}

TEST_CASE("factor insertion order does not change inference results") {
  const auto model = testsupport::random_sparse_loopy_model(7);

  // Rebuild with the factor list reversed.
  FactorGraph reversed;
  std::vector<int32_t> cards;
  for (const Variable& v : model.graph.variables()) cards.push_back(v.cardinality);
  reversed.add_variables(cards);
  for (int32_t f = model.graph.num_factors(); f-- > 0;) {
    const EnumerationFactor& factor = model.graph.factors()[f];
    std::vector<std::vector<int32_t>> configs;
    for (int64_t c = 0; c < factor.num_configs(); ++c) {
      configs.emplace_back(factor.config(c).begin(), factor.config(c).end());
    }
    reversed.add_enumeration_factor(factor.scope, configs, factor.log_potentials);
  }

  BPOptions options;
  options.num_iters = 30;
  const auto [msg_a, result_a] = run_bp(compile(model.graph), model.evidence, options);
  const auto [msg_b, result_b] = run_bp(compile(reversed), model.evidence, options);

  CHECK(result_a.decoded == result_b.decoded);
  REQUIRE(result_a.beliefs.size() == result_b.beliefs.size());
  for (size_t i = 0; i < result_a.beliefs.size(); ++i) {
    CHECK(result_a.beliefs[i] == doctest::Approx(result_b.beliefs[i]).epsilon(1e-9));
  }
  REQUIRE(result_a.score.has_value());
  REQUIRE(result_b.score.has_value());
  CHECK(*result_a.score == doctest::Approx(*result_b.score).epsilon(1e-12));
}
