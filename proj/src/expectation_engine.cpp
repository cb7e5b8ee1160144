#include "snotes/expectation_engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

#include "snotes/errors.hpp"
#include "snotes/payoff_kernels.hpp"

namespace snotes {

ExpectationBound ros_expected_return_bound(const RosTerms& terms, const Scenario& scenario) {
  require_valid(validate(terms));
  require_valid(validate(scenario));
  ExpectationBound bound;
  bound.kind = BoundKind::kUpperBound;
  bound.decomposition.push_back({"index_return >= 0", terms.cap_m, scenario.p_nonneg});
  if (scenario.cond_loss) {
    bound.decomposition.push_back(
        {"index_return < 0", *scenario.cond_loss, 1.0 - scenario.p_nonneg});
  }
  bound.value = 0.0;
  for (const auto& term : bound.decomposition) bound.value += term.contribution();
  return bound;
}

ExpectationBound yield_magnet_expected_coupon_bound(const YieldMagnetTerms& terms,
                                                    const Scenario& scenario) {
  require_valid(validate(terms));
  require_valid(validate(scenario));
  ExpectationBound bound;
  bound.kind = BoundKind::kUpperBound;
  bound.decomposition.push_back({"theta_bar >= 0", terms.theta_cap, scenario.p_nonneg});
  bound.value = bound.decomposition.front().contribution();
  return bound;
}

ExpectationBound rev_exch_expected_return(const ReverseExchangeableTerms& terms,
                                          const Scenario& scenario) {
  require_valid(validate(terms));
  require_valid(validate(scenario));
  if (!scenario.cond_loss)
    throw std::domain_error("rev_exch expectation needs cond_loss (E of stock return when <= 0)");
  ExpectationBound bound;
  bound.kind = BoundKind::kExact;
  bound.decomposition.push_back({"stock_return > 0", terms.coupon_rate, scenario.p_nonneg});
  bound.decomposition.push_back({"stock_return <= 0", terms.coupon_rate + *scenario.cond_loss,
                                 1.0 - scenario.p_nonneg});
  bound.value = 0.0;
  for (const auto& term : bound.decomposition) bound.value += term.contribution();
  return bound;
}

ExpectationBound ppn_expected_return(const PpnTerms& terms, const Scenario& scenario) {
  require_valid(validate(terms));
  require_valid(validate(scenario));
  if (!scenario.cond_gain)
    throw std::domain_error("ppn expectation needs cond_gain (E of index return when > 0)");
  ExpectationBound bound;
  bound.kind = BoundKind::kExact;
  bound.decomposition.push_back(
      {"index_return > 0", terms.participation_rate * *scenario.cond_gain, scenario.p_nonneg});
  bound.decomposition.push_back({"index_return <= 0", 0.0, 1.0 - scenario.p_nonneg});
  bound.value = 0.0;
  for (const auto& term : bound.decomposition) bound.value += term.contribution();
  return bound;
}

namespace {

// The oracle and the Monte Carlo check only make sense for products whose
// payoff is a function of one driver return.
void require_single_driver(const ProductTerms& terms) {
  if (std::holds_alternative<YieldMagnetTerms>(terms))
    throw std::invalid_argument(
        "yield_magnet has no single-driver return kernel; use the coupon engine");
  if (std::holds_alternative<BarrierNoteTerms>(terms))
    throw std::invalid_argument(
        "barrier has no single-driver return kernel; it is a path functional");
}

// Holder return for one driver outcome; only defined for the single-driver
// products.
double kernel_value(const ProductTerms& terms, double r) {
  struct Visitor {
    double r;
    double operator()(const RosTerms& t) const {
      return ros_return(t, ReturnFraction(r)).value();
    }
    double operator()(const ReverseExchangeableTerms& t) const {
      return rev_exch_return(t, ReturnFraction(r)).value();
    }
    double operator()(const PpnTerms& t) const {
      return ppn_return(t, ReturnFraction(r)).value();
    }
    double operator()(const YieldMagnetTerms&) const {
      throw std::invalid_argument(
          "yield_magnet has no single-driver return kernel; use the coupon engine");
    }
    double operator()(const BarrierNoteTerms&) const {
      throw std::invalid_argument(
          "barrier has no single-driver return kernel; it is a path functional");
    }
  };
  return std::visit(Visitor{r}, terms);
}

// SplitMix64 step; mixes the seed with a block index to give each block an
// independent, reproducible substream.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (block + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d4ecf5735b92ffULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t kBlockSize = 16384;

// Draws `count` outcomes from the inverse CDF and tallies hits per outcome.
// Tallies are integers, so merging blocks in any order gives identical
// totals; that is what makes the estimate independent of thread count.
void tally_block(const std::vector<double>& cdf, std::uint64_t seed, std::uint64_t block,
                 std::uint64_t count, std::vector<std::uint64_t>& counts) {
  std::mt19937_64 gen(mix_seed(seed, block));
  for (std::uint64_t i = 0; i < count; ++i) {
    // 53 random bits mapped to [0, 1); identical on every platform, unlike
    // std::uniform_real_distribution.
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const std::size_t idx = static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u,
                         [](double edge, double value) { return edge <= value; }) -
        cdf.begin());
    ++counts[std::min(idx, counts.size() - 1)];
  }
}

}  // namespace

double expected_return_oracle(const ProductTerms& terms,
                              const DiscreteReturnDistribution& dist) {
  require_single_driver(terms);
  require_valid(validate_terms(terms));
  require_valid(validate(dist));
  double total = 0.0;
  for (const auto& outcome : dist.outcomes)
    total += kernel_value(terms, outcome.r) * outcome.p;
  return total;
}

MonteCarloEstimate monte_carlo_expected_return(const ProductTerms& terms,
                                               const DiscreteReturnDistribution& dist,
                                               std::uint64_t n_paths, std::uint64_t seed,
                                               int n_workers) {
  require_single_driver(terms);
  require_valid(validate_terms(terms));
  require_valid(validate(dist));
  if (n_paths < 1000) throw std::domain_error("n_paths must be at least 1000");
  if (n_workers < 1) throw std::domain_error("n_workers must be at least 1");

  std::vector<double> values(dist.outcomes.size());
  std::vector<double> cdf(dist.outcomes.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.outcomes.size(); ++i) {
    values[i] = kernel_value(terms, dist.outcomes[i].r);
    acc += dist.outcomes[i].p;
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  const std::uint64_t n_blocks = (n_paths + kBlockSize - 1) / kBlockSize;
  std::vector<std::uint64_t> counts(dist.outcomes.size(), 0);

  auto run_blocks = [&](std::uint64_t first_block, std::uint64_t stride) {
    std::vector<std::uint64_t> local(counts.size(), 0);
    for (std::uint64_t b = first_block; b < n_blocks; b += stride) {
      const std::uint64_t begin = b * kBlockSize;
      const std::uint64_t count = std::min(kBlockSize, n_paths - begin);
      tally_block(cdf, seed, b, count, local);
    }
    return local;
  };

  if (n_workers == 1 || n_blocks == 1) {
    counts = run_blocks(0, 1);
  } else {
    const int workers = static_cast<int>(
        std::min<std::uint64_t>(static_cast<std::uint64_t>(n_workers), n_blocks));
    std::vector<std::future<std::vector<std::uint64_t>>> futures;
    futures.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w)
      futures.push_back(std::async(std::launch::async, run_blocks,
                                   static_cast<std::uint64_t>(w),
                                   static_cast<std::uint64_t>(workers)));
    for (auto& f : futures) {
      const auto local = f.get();
      for (std::size_t i = 0; i < counts.size(); ++i) counts[i] += local[i];
    }
  }

  const double n = static_cast<double>(n_paths);
  double estimate = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i)
    estimate += values[i] * (static_cast<double>(counts[i]) / n);

  double ss = 0.0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const double d = values[i] - estimate;
    ss += static_cast<double>(counts[i]) * d * d;
  }
  MonteCarloEstimate result;
  result.estimate = estimate;
  result.std_error = n_paths > 1 ? std::sqrt(ss / (n - 1.0)) / std::sqrt(n) : 0.0;
  result.n_paths = n_paths;
  result.seed = seed;
  return result;
}

nlohmann::json distribution_to_json(const DiscreteReturnDistribution& dist) {
  nlohmann::json outcomes = nlohmann::json::array();
  for (const auto& o : dist.outcomes)
    outcomes.push_back(nlohmann::json{{"r", o.r}, {"p", o.p}});
  return nlohmann::json{{"outcomes", outcomes}};
}

DiscreteReturnDistribution distribution_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("outcomes") || !doc.at("outcomes").is_array())
    throw ParseError("distribution document must hold an 'outcomes' array");
  DiscreteReturnDistribution dist;
  for (const auto& item : doc.at("outcomes")) {
    if (!item.is_object() || !item.contains("r") || !item.contains("p") ||
        !item.at("r").is_number() || !item.at("p").is_number())
      throw ParseError("each outcome must be an object with numeric 'r' and 'p'");
    dist.outcomes.push_back({item.at("r").get<double>(), item.at("p").get<double>()});
  }
  return dist;
}

DiscreteReturnDistribution load_distribution_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open distribution file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("distribution file is not valid JSON: ") + e.what());
  }
  return distribution_from_json(doc);
}

}  // namespace snotes
