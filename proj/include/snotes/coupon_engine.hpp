#pragma once

#include <vector>

#include "snotes/dates.hpp"
#include "snotes/market_data.hpp"
#include "snotes/product_model.hpp"

namespace snotes {

/// Per-stock capped return versus its baseline. delta is the raw fractional
/// change; clamp_theta squeezes it into [theta_floor, theta_cap].
double stock_delta(double baseline_price, double d_date_price);
double clamp_theta(const YieldMagnetTerms& terms, double delta);

/// Mean of the per-stock thetas. The mean is clamped back into
/// [min(thetas), max(thetas)] so that a basket sitting entirely at the cap
/// averages to exactly the cap despite summation rounding.
double theta_bar(const std::vector<double>& thetas);

/// Coupon rate produced by one year's average theta: zero when the average
/// is negative, capped at theta_cap otherwise.
double coupon_rate(const YieldMagnetTerms& terms, double theta_bar_value);

/// How the year-over-year coupon floor behaves.
///  kRunningMax: each coupon is at least the highest coupon paid so far.
///  kFirstYearFloor: each coupon is at least the first variable coupon.
enum class RatchetPolicy { kRunningMax, kFirstYearFloor };

/// Rolls forward across coupon years. frozen[i] records that stock i hit
/// theta_cap in some earlier year; its theta stays at the cap forever after.
/// last_coupon is the current ratchet floor: the fixed first coupon while
/// year_index == 0, then the policy's floor across variable years.
struct CouponState {
  std::vector<bool> frozen;
  double last_coupon = 0.0;
  int year_index = 0;

  friend bool operator==(const CouponState&, const CouponState&) = default;
};

/// State for a note that has not paid any coupon yet.
CouponState initial_coupon_state(const YieldMagnetTerms& terms);

/// Baseline and determination-date closes for one variable coupon year,
/// aligned by stock index.
struct BasketObservation {
  std::vector<double> baseline_prices;
  std::vector<double> d_date_prices;
};

struct CouponYearResult {
  CouponState state;
  double coupon = 0.0;
};

/// Advances one coupon year. Year 0 ignores `observation` and pays the
/// fixed first coupon; variable years compute the clamped basket average,
/// apply the ratchet floor, and freeze any stock whose theta reached the
/// cap. Throws std::domain_error on size mismatches or non-positive prices.
CouponYearResult advance_coupon_year(const YieldMagnetTerms& terms, const CouponState& state,
                                     const BasketObservation& observation,
                                     RatchetPolicy policy = RatchetPolicy::kRunningMax);

/// One paid coupon in a historical run.
struct CouponScheduleEntry {
  Date payment_date{};
  Date determination_date{};
  double coupon = 0.0;
  double coupon_amount = 0.0;  ///< coupon * redemption_price.
  bool fixed = false;          ///< true only for the year-0 coupon.
};

/// Replays the full coupon schedule against historical basket closes.
/// Baselines for each variable year are the closes at the last row on or
/// before the previous payment date; determination closes are at the last
/// row on or before the determination date (d_date_offset business days
/// before the payment date, weekend-only calendar). Years whose dates run
/// past the data are omitted.
std::vector<CouponScheduleEntry> run_coupon_schedule(
    const YieldMagnetTerms& terms, const BasketSeries& series,
    RatchetPolicy policy = RatchetPolicy::kRunningMax);

}  // namespace snotes
