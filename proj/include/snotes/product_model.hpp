#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "snotes/dates.hpp"

namespace snotes {

/// Dimensionless signed return, e.g. -0.42 for a 42% decline. Rates and
/// returns are stored as fractions everywhere inside the library; percent
/// figures are converted at the reporting boundary.
class ReturnFraction {
 public:
  ReturnFraction() = default;

  /// Throws std::domain_error when `value` is NaN or infinite.
  explicit ReturnFraction(double value);

  double value() const noexcept { return value_; }

  friend auto operator<=>(const ReturnFraction&, const ReturnFraction&) = default;

 private:
  double value_ = 0.0;
};

/// Return optimization security: short-maturity note paying a capped
/// multiple of index gains but taking index losses one-for-one.
struct RosTerms {
  double price_per_note = 10.0;
  int maturity_days = 369;
  /// The prospectus cap, never disclosed exactly; must lie in [0.25, 0.30].
  double cap_m = 0.30;

  friend bool operator==(const RosTerms&, const RosTerms&) = default;
};

/// Yield magnet note: five-year note whose variable coupon derives from the
/// clamped average return of a 15-stock basket, with capped per-stock
/// returns frozen at the cap once reached.
struct YieldMagnetTerms {
  double redemption_price = 1000.0;
  int n_stocks = 15;
  double theta_floor = -0.125;
  double theta_cap = 0.08;
  double fixed_first_coupon = 0.055;
  Date settlement_date{};
  Date redemption_date{};
  /// Annual coupon payment dates; the first one closes the fixed-rate year.
  std::vector<Date> payment_dates;
  /// Business days between the determination date and its payment date.
  int d_date_offset = 3;

  friend bool operator==(const YieldMagnetTerms&, const YieldMagnetTerms&) = default;
};

/// Reverse exchangeable: fixed coupon, principal repaid in cash if the
/// reference stock rose, in depreciated shares if it fell.
struct ReverseExchangeableTerms {
  double price_per_note = 1000.0;
  int maturity_years = 1;
  double coupon_rate = 0.12;
  int coupon_frequency = 4;

  friend bool operator==(const ReverseExchangeableTerms&,
                         const ReverseExchangeableTerms&) = default;
};

/// Principal-protected note: zero floor plus a participation fraction of
/// index gains.
struct PpnTerms {
  double price_per_note = 1000.0;
  int maturity_years = 3;
  double participation_rate = 0.80;

  friend bool operator==(const PpnTerms&, const PpnTerms&) = default;
};

/// Absolute-return barrier note: pays |index return| only if every observed
/// close stays inside (lower_multiple, upper_multiple) times the initial
/// close for the whole term.
struct BarrierNoteTerms {
  double upper_multiple = 1.4;
  double lower_multiple = 0.6;
  /// true: a close exactly on a barrier knocks the note out (default);
  /// false: only a strict crossing does.
  bool barrier_touch_is_breach = true;

  friend bool operator==(const BarrierNoteTerms&, const BarrierNoteTerms&) = default;
};

using ProductTerms = std::variant<RosTerms, YieldMagnetTerms, ReverseExchangeableTerms,
                                  PpnTerms, BarrierNoteTerms>;

/// Probability mass on the sign of the driving return plus conditional
/// expected returns. Which boundary p_nonneg refers to (>= 0 vs > 0)
/// follows each product's payoff formula; see the expectation engine.
struct Scenario {
  double p_nonneg = 0.0;
  std::optional<double> cond_loss;  ///< E(driver | losing branch), <= 0.
  std::optional<double> cond_gain;  ///< E(driver | gaining branch), >= 0.

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// Finite outcome/probability pairs for a single-period driver return;
/// ground truth for brute-force expectation checks.
struct DiscreteReturnDistribution {
  struct Outcome {
    double r = 0.0;
    double p = 0.0;
    friend bool operator==(const Outcome&, const Outcome&) = default;
  };
  std::vector<Outcome> outcomes;

  friend bool operator==(const DiscreteReturnDistribution&,
                         const DiscreteReturnDistribution&) = default;
};

struct ValidationReport {
  bool ok = true;
  std::string violation;  ///< First violated invariant; empty when ok.

  static ValidationReport pass() { return {}; }
  static ValidationReport fail(std::string what) { return {false, std::move(what)}; }
  explicit operator bool() const noexcept { return ok; }
};

ValidationReport validate(const RosTerms& terms);
ValidationReport validate(const YieldMagnetTerms& terms);
ValidationReport validate(const ReverseExchangeableTerms& terms);
ValidationReport validate(const PpnTerms& terms);
ValidationReport validate(const BarrierNoteTerms& terms);
ValidationReport validate(const Scenario& scenario);
ValidationReport validate(const DiscreteReturnDistribution& dist);

/// Pass/fail plus the first violated invariant for any term sheet.
ValidationReport validate_terms(const ProductTerms& terms);

/// Throws std::domain_error carrying the violation text when the report
/// failed. Engines gate every entry point on this, so invalid inputs cannot
/// travel past a module boundary.
void require_valid(const ValidationReport& report);

/// JSON tag for the variant alternative: "ros" | "yield_magnet" |
/// "rev_exch" | "ppn" | "barrier".
std::string product_tag(const ProductTerms& terms);

/// Serialization: one top-level `product` tag plus a `terms` object whose
/// keys match the field names above.
nlohmann::json terms_to_json(const ProductTerms& terms);
ProductTerms terms_from_json(const nlohmann::json& doc);
ProductTerms load_terms_file(const std::string& path);

}  // namespace snotes
