#include "snotes/coupon_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snotes {

double stock_delta(double baseline_price, double d_date_price) {
  if (!std::isfinite(baseline_price) || baseline_price <= 0.0)
    throw std::domain_error("baseline price must be positive");
  if (!std::isfinite(d_date_price) || d_date_price <= 0.0)
    throw std::domain_error("determination date price must be positive");
  return (d_date_price - baseline_price) / baseline_price;
}

double clamp_theta(const YieldMagnetTerms& terms, double delta) {
  return std::clamp(delta, terms.theta_floor, terms.theta_cap);
}

double theta_bar(const std::vector<double>& thetas) {
  if (thetas.empty()) throw std::domain_error("theta list must not be empty");
  double sum = 0.0;
  double lo = thetas.front();
  double hi = thetas.front();
  for (double t : thetas) {
    sum += t;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
  }
  // The true mean lies in [lo, hi]; clamping removes summation rounding so
  // a basket sitting entirely at one value averages to exactly that value.
  return std::clamp(sum / static_cast<double>(thetas.size()), lo, hi);
}

double coupon_rate(const YieldMagnetTerms& terms, double theta_bar_value) {
  if (theta_bar_value < 0.0) return 0.0;
  return std::min(theta_bar_value, terms.theta_cap);
}

CouponState initial_coupon_state(const YieldMagnetTerms& terms) {
  require_valid(validate(terms));
  CouponState state;
  state.frozen.assign(static_cast<std::size_t>(terms.n_stocks), false);
  state.last_coupon = terms.fixed_first_coupon;
  state.year_index = 0;
  return state;
}

CouponYearResult advance_coupon_year(const YieldMagnetTerms& terms, const CouponState& state,
                                     const BasketObservation& observation,
                                     RatchetPolicy policy) {
  require_valid(validate(terms));
  if (state.frozen.size() != static_cast<std::size_t>(terms.n_stocks))
    throw std::domain_error("coupon state tracks a different basket size");

  if (state.year_index == 0) {
    CouponState next = state;
    next.year_index = 1;
    // The ratchet floor entering the first variable year is zero: the fixed
    // coupon does not carry over.
    next.last_coupon = 0.0;
    return {next, terms.fixed_first_coupon};
  }

  if (observation.baseline_prices.size() != static_cast<std::size_t>(terms.n_stocks) ||
      observation.d_date_prices.size() != static_cast<std::size_t>(terms.n_stocks))
    throw std::domain_error("basket observation size does not match n_stocks");

  CouponState next = state;
  std::vector<double> thetas(static_cast<std::size_t>(terms.n_stocks));
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (state.frozen[i]) {
      thetas[i] = terms.theta_cap;
      continue;
    }
    thetas[i] =
        clamp_theta(terms, stock_delta(observation.baseline_prices[i],
                                       observation.d_date_prices[i]));
    if (thetas[i] >= terms.theta_cap) next.frozen[i] = true;
  }

  const double rate = coupon_rate(terms, theta_bar(thetas));
  double coupon = rate;
  switch (policy) {
    case RatchetPolicy::kRunningMax:
    case RatchetPolicy::kFirstYearFloor:
      coupon = std::max(state.last_coupon, rate);
      break;
  }
  next.year_index = state.year_index + 1;
  if (policy == RatchetPolicy::kRunningMax) {
    next.last_coupon = coupon;
  } else {
    // First-year-floor keeps the floor at the first variable coupon: set it
    // once and leave it alone afterwards.
    next.last_coupon = state.year_index == 1 ? coupon : state.last_coupon;
  }
  return {next, coupon};
}

std::vector<CouponScheduleEntry> run_coupon_schedule(const YieldMagnetTerms& terms,
                                                     const BasketSeries& series,
                                                     RatchetPolicy policy) {
  require_valid(validate(terms));
  if (series.n_stocks() != static_cast<std::size_t>(terms.n_stocks))
    throw std::domain_error("basket series width does not match n_stocks");

  std::vector<CouponScheduleEntry> entries;
  CouponState state = initial_coupon_state(terms);
  for (std::size_t year = 0; year < terms.payment_dates.size(); ++year) {
    const Date payment = terms.payment_dates[year];
    const Date d_date = business_days_before(payment, terms.d_date_offset);

    BasketObservation observation;
    if (state.year_index > 0) {
      // Baselines reset to the closes at the previous payment date, or the
      // last trading day before it.
      const Date baseline_date = terms.payment_dates[year - 1];
      auto baseline_row = series.last_on_or_before(baseline_date);
      auto d_date_row = series.last_on_or_before(d_date);
      if (!baseline_row || !d_date_row) break;
      if (days_between(series.rows()[*d_date_row].date, series.rows()[*baseline_row].date) >= 0)
        break;
      observation.baseline_prices = series.rows()[*baseline_row].closes;
      observation.d_date_prices = series.rows()[*d_date_row].closes;
    }

    CouponYearResult result = advance_coupon_year(terms, state, observation, policy);
    CouponScheduleEntry entry;
    entry.payment_date = payment;
    entry.determination_date = d_date;
    entry.coupon = result.coupon;
    entry.coupon_amount = result.coupon * terms.redemption_price;
    entry.fixed = state.year_index == 0;
    entries.push_back(entry);
    state = result.state;
  }
  return entries;
}

}  // namespace snotes
