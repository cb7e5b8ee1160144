#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "snotes/product_model.hpp"

namespace snotes {

/// Whether a figure bounds the expected return from above or equals it.
enum class BoundKind { kUpperBound, kExact };

/// One conditioning branch of a total-expectation split: the branch's
/// contribution is conditional_expectation * probability.
struct BranchTerm {
  std::string label;
  double conditional_expectation = 0.0;
  double probability = 0.0;

  double contribution() const noexcept { return conditional_expectation * probability; }
};

/// Expected-return figure with its conditioning decomposition. `value` is
/// always the sum of the branch contributions, in branch order.
struct ExpectationBound {
  double value = 0.0;
  BoundKind kind = BoundKind::kUpperBound;
  std::vector<BranchTerm> decomposition;
};

/// Return optimization security. Gains contribute at most the cap; losses
/// contribute their conditional mean when the scenario provides one
/// (two-branch bound), else only the gain branch is kept (one-branch
/// bound, valid because the loss branch contributes non-positively).
/// p_nonneg is P(index return >= 0).
ExpectationBound ros_expected_return_bound(const RosTerms& terms, const Scenario& scenario);

/// Yield magnet note, one coupon year: the coupon is at most theta_cap and
/// only paid when the basket average is non-negative, so
/// E(R) <= theta_cap * p_nonneg with p_nonneg = P(average theta >= 0).
ExpectationBound yield_magnet_expected_coupon_bound(const YieldMagnetTerms& terms,
                                                    const Scenario& scenario);

/// Reverse exchangeable, exact: E(R) = coupon + E(x | x <= 0) P(x <= 0).
/// p_nonneg is P(stock return > 0) and cond_loss is required.
ExpectationBound rev_exch_expected_return(const ReverseExchangeableTerms& terms,
                                          const Scenario& scenario);

/// Principal-protected note, exact:
/// E(R) = participation * E(r | r > 0) P(r > 0). p_nonneg is P(r > 0) and
/// cond_gain is required.
ExpectationBound ppn_expected_return(const PpnTerms& terms, const Scenario& scenario);

/// Exact expectation of the product's holder return over a finite driver
/// distribution, by direct summation. Supports ros, rev_exch, and ppn;
/// yield_magnet and barrier payoffs are path/basket functionals with no
/// single-driver kernel, so they are rejected with std::invalid_argument.
double expected_return_oracle(const ProductTerms& terms,
                              const DiscreteReturnDistribution& dist);

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t n_paths = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo check of the same expectation: draws i.i.d. outcomes from
/// `dist` by inverse CDF and averages the product's return kernel.
/// Deterministic for a fixed seed, and the estimate is bitwise independent
/// of n_workers because draws are tallied per outcome in fixed-size blocks
/// with per-block substreams. n_paths must be >= 1000.
MonteCarloEstimate monte_carlo_expected_return(const ProductTerms& terms,
                                               const DiscreteReturnDistribution& dist,
                                               std::uint64_t n_paths, std::uint64_t seed,
                                               int n_workers = 1);

/// Serialization: {"outcomes": [{"r": ..., "p": ...}, ...]}.
nlohmann::json distribution_to_json(const DiscreteReturnDistribution& dist);
DiscreteReturnDistribution distribution_from_json(const nlohmann::json& doc);
DiscreteReturnDistribution load_distribution_file(const std::string& path);

}  // namespace snotes
