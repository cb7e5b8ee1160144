#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <variant>

#include "snotes/errors.hpp"
#include "snotes/expectation_engine.hpp"
#include "snotes/payoff_kernels.hpp"
#include "test_support.hpp"

using namespace snotes;
using snotes::testing::data_path;
using snotes::testing::random_distribution;
using snotes::testing::write_temp_file;

namespace {

double sum_contributions(const ExpectationBound& bound) {
  double total = 0.0;
  for (const auto& term : bound.decomposition) total += term.contribution();
  return total;
}

// Independent total-expectation split: average the holder return inside
// each sign branch of the driver, then recombine with the branch masses.
double branch_split_expectation(const ProductTerms& terms,
                                const DiscreteReturnDistribution& dist) {
  auto kernel = [&](double r) {
    if (std::holds_alternative<RosTerms>(terms))
      return ros_return(std::get<RosTerms>(terms), ReturnFraction(r)).value();
    if (std::holds_alternative<ReverseExchangeableTerms>(terms))
      return rev_exch_return(std::get<ReverseExchangeableTerms>(terms), ReturnFraction(r))
          .value();
    return ppn_return(std::get<PpnTerms>(terms), ReturnFraction(r)).value();
  };
  // The ros branch boundary puts zero with the gains; rev_exch and ppn put
  // it with the non-paying branch.
  auto in_upper = [&](double r) {
    return std::holds_alternative<RosTerms>(terms) ? r >= 0.0 : r > 0.0;
  };
  double p_upper = 0.0;
  double upper_mass_weighted = 0.0;
  double p_lower = 0.0;
  double lower_mass_weighted = 0.0;
  for (const auto& o : dist.outcomes) {
    if (in_upper(o.r)) {
      p_upper += o.p;
      upper_mass_weighted += kernel(o.r) * o.p;
    } else {
      p_lower += o.p;
      lower_mass_weighted += kernel(o.r) * o.p;
    }
  }
  double total = 0.0;
  if (p_upper > 0.0) total += (upper_mass_weighted / p_upper) * p_upper;
  if (p_lower > 0.0) total += (lower_mass_weighted / p_lower) * p_lower;
  return total;
}

}  // namespace

TEST_CASE("ros bound reproduces the cap scenarios") {
  const RosTerms terms;  // cap 0.30

  const ExpectationBound gain_only = ros_expected_return_bound(terms, Scenario{0.1, {}, {}});
  CHECK(gain_only.kind == BoundKind::kUpperBound);
  REQUIRE(gain_only.decomposition.size() == 1);
  CHECK(std::abs(gain_only.value - 0.03) <= 1e-12);

  const ExpectationBound mild = ros_expected_return_bound(terms, Scenario{0.1, -0.2, {}});
  REQUIRE(mild.decomposition.size() == 2);
  CHECK(std::abs(mild.value - -0.15) <= 1e-12);
  CHECK(mild.decomposition[0].probability == 0.1);
  CHECK(mild.decomposition[0].conditional_expectation == 0.30);
  CHECK(mild.decomposition[1].probability == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(mild.decomposition[1].conditional_expectation == -0.2);

  const ExpectationBound severe = ros_expected_return_bound(terms, Scenario{0.1, -0.3, {}});
  CHECK(std::abs(severe.value - -0.24) <= 1e-12);
  CHECK(severe.value == sum_contributions(severe));

  CHECK_THROWS_AS(ros_expected_return_bound(terms, Scenario{1.5, {}, {}}), std::domain_error);
}

TEST_CASE("yield magnet coupon bound") {
  const YieldMagnetTerms terms =
      std::get<YieldMagnetTerms>(load_terms_file(data_path("terms/yield_magnet.json")));
  const ExpectationBound bound = yield_magnet_expected_coupon_bound(terms, Scenario{0.1, {}, {}});
  CHECK(bound.kind == BoundKind::kUpperBound);
  CHECK(std::abs(bound.value - 0.008) <= 1e-12);
  REQUIRE(bound.decomposition.size() == 1);
  CHECK(bound.decomposition[0].conditional_expectation == 0.08);
}

TEST_CASE("reverse exchangeable exact expectation") {
  const ReverseExchangeableTerms terms;  // coupon 0.12

  const ExpectationBound crash = rev_exch_expected_return(terms, Scenario{0.05, -0.42, {}});
  CHECK(crash.kind == BoundKind::kExact);
  CHECK(std::abs(crash.value - -0.279) <= 1e-12);
  CHECK(crash.value == sum_contributions(crash));

  CHECK(std::abs(rev_exch_expected_return(terms, Scenario{0.1, -0.21, {}}).value - -0.069) <=
        1e-12);
  CHECK(std::abs(rev_exch_expected_return(terms, Scenario{0.5, -0.105, {}}).value - 0.0675) <=
        1e-12);

  CHECK_THROWS_AS(rev_exch_expected_return(terms, Scenario{0.5, {}, {}}), std::domain_error);
}

TEST_CASE("ppn exact expectation") {
  const PpnTerms terms;  // participation 0.8
  const ExpectationBound bound = ppn_expected_return(terms, Scenario{0.1, {}, 0.25});
  CHECK(bound.kind == BoundKind::kExact);
  CHECK(std::abs(bound.value - 0.02) <= 1e-12);
  REQUIRE(bound.decomposition.size() == 2);
  CHECK(bound.decomposition[1].conditional_expectation == 0.0);

  CHECK(ppn_expected_return(terms, Scenario{1.0, {}, 0.0}).value == 0.0);
  CHECK_THROWS_AS(ppn_expected_return(terms, Scenario{0.1, {}, {}}), std::domain_error);
}

TEST_CASE("oracle matches hand-computed expectations") {
  const DiscreteReturnDistribution dist =
      load_distribution_file(data_path("dist/rev_exch_two_outcome.json"));

  const double rev_exch_expected = 0.95 * (0.12 + std::min(-0.42, 0.0)) + 0.05 * 0.12;
  CHECK(expected_return_oracle(ReverseExchangeableTerms{}, dist) == rev_exch_expected);
  CHECK(std::abs(expected_return_oracle(ReverseExchangeableTerms{}, dist) - -0.279) <= 1e-12);

  const double ros_expected = 0.95 * -0.42 + 0.05 * std::min(5.0 * 0.10, 0.30);
  CHECK(expected_return_oracle(RosTerms{}, dist) == ros_expected);

  const double ppn_expected = 0.05 * (0.8 * 0.10);
  CHECK(std::abs(expected_return_oracle(PpnTerms{}, dist) - ppn_expected) <= 1e-15);

  CHECK_THROWS_AS(
      expected_return_oracle(YieldMagnetTerms{}, dist), std::invalid_argument);
  CHECK_THROWS_AS(expected_return_oracle(BarrierNoteTerms{}, dist), std::invalid_argument);
}

TEST_CASE("total-expectation splits agree with the oracle on random distributions") {
  std::mt19937_64 rng(3401);
  const ProductTerms products[] = {RosTerms{}, ReverseExchangeableTerms{}, PpnTerms{}};
  for (int trial = 0; trial < 250; ++trial) {
    const DiscreteReturnDistribution dist = random_distribution(rng);
    REQUIRE(validate(dist).ok);
    for (const auto& terms : products) {
      const double oracle = expected_return_oracle(terms, dist);
      CHECK(std::abs(branch_split_expectation(terms, dist) - oracle) <= 1e-12);
    }
  }
}

TEST_CASE("ros bounds dominate the oracle on random distributions") {
  std::mt19937_64 rng(3402);
  const RosTerms terms;
  for (int trial = 0; trial < 250; ++trial) {
    const DiscreteReturnDistribution dist = random_distribution(rng);
    double p_nonneg = 0.0;
    double loss_mass = 0.0;
    double loss_weighted = 0.0;
    for (const auto& o : dist.outcomes) {
      if (o.r >= 0.0) {
        p_nonneg += o.p;
      } else {
        loss_mass += o.p;
        loss_weighted += o.r * o.p;
      }
    }
    Scenario scenario{p_nonneg, {}, {}};
    if (loss_mass > 0.0) scenario.cond_loss = loss_weighted / loss_mass;

    const double oracle = expected_return_oracle(terms, dist);
    const double two_branch = ros_expected_return_bound(terms, scenario).value;
    const double gain_only =
        ros_expected_return_bound(terms, Scenario{scenario.p_nonneg, {}, {}}).value;
    CHECK(oracle <= two_branch + 1e-12);
    CHECK(oracle <= gain_only + 1e-12);
    CHECK(two_branch <= gain_only + 1e-12);
  }
}

TEST_CASE("monte carlo is exact on a point mass") {
  const DiscreteReturnDistribution dist = load_distribution_file(data_path("dist/point_mass.json"));
  const double oracle = expected_return_oracle(RosTerms{}, dist);
  const MonteCarloEstimate mc = monte_carlo_expected_return(RosTerms{}, dist, 4096, 99);
  CHECK(mc.estimate == oracle);
  CHECK(mc.std_error == 0.0);
  CHECK(mc.n_paths == 4096);
  CHECK(mc.seed == 99);
}

TEST_CASE("monte carlo estimates converge on the exact expectation") {
  const DiscreteReturnDistribution dist =
      load_distribution_file(data_path("dist/rev_exch_two_outcome.json"));
  const ReverseExchangeableTerms terms;
  const double oracle = expected_return_oracle(terms, dist);

  const MonteCarloEstimate mc = monte_carlo_expected_return(terms, dist, 100000, 42);
  CHECK(mc.std_error > 0.0);
  CHECK(std::abs(mc.estimate - oracle) <= 4.0 * mc.std_error);
}

TEST_CASE("monte carlo is deterministic and worker-count invariant") {
  std::mt19937_64 rng(3403);
  const DiscreteReturnDistribution dist = random_distribution(rng, 8);
  const RosTerms terms;

  const MonteCarloEstimate a = monte_carlo_expected_return(terms, dist, 50000, 7, 1);
  const MonteCarloEstimate b = monte_carlo_expected_return(terms, dist, 50000, 7, 1);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);

  for (int workers : {2, 3, 4, 7}) {
    CAPTURE(workers);
    const MonteCarloEstimate parallel =
        monte_carlo_expected_return(terms, dist, 50000, 7, workers);
    CHECK(parallel.estimate == a.estimate);
    CHECK(parallel.std_error == a.std_error);
  }
}

TEST_CASE("monte carlo rejects undersized runs") {
  const DiscreteReturnDistribution dist{{{0.0, 1.0}}};
  CHECK_THROWS_AS(monte_carlo_expected_return(RosTerms{}, dist, 999, 1), std::domain_error);
  CHECK_THROWS_AS(monte_carlo_expected_return(RosTerms{}, dist, 1000, 1, 0), std::domain_error);
  CHECK_THROWS_AS(monte_carlo_expected_return(YieldMagnetTerms{}, dist, 1000, 1),
                  std::invalid_argument);
}

TEST_CASE("distribution json round-trips and rejects malformed input") {
  const DiscreteReturnDistribution dist =
      load_distribution_file(data_path("dist/rev_exch_two_outcome.json"));
  CHECK(dist.outcomes.size() == 2);
  CHECK(distribution_from_json(distribution_to_json(dist)) == dist);

  CHECK_THROWS_AS(distribution_from_json(nlohmann::json::parse("{}")), ParseError);
  CHECK_THROWS_AS(distribution_from_json(nlohmann::json::parse(R"({"outcomes":[{"r":1}]})")),
                  ParseError);
  CHECK_THROWS_AS(distribution_from_json(nlohmann::json::parse(
                      R"({"outcomes":[{"r":"x","p":1}]})")),
                  ParseError);
  CHECK_THROWS_AS(load_distribution_file(write_temp_file("bad_dist.json", "[1,2")), ParseError);
  CHECK_THROWS_AS(load_distribution_file("/nonexistent/dist.json"), ParseError);
}
