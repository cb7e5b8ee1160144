#include "snotes/payoff_kernels.hpp"

#include <algorithm>
#include <cmath>

namespace snotes {

ReturnFraction ros_return(const RosTerms& terms, ReturnFraction index_return) {
  require_valid(validate(terms));
  const double r = index_return.value();
  if (r < 0.0) return index_return;
  return ReturnFraction(std::min(5.0 * r, terms.cap_m));
}

NetPayment ros_net_payment(const RosTerms& terms, ReturnFraction index_return) {
  return NetPayment{terms.price_per_note * ros_return(terms, index_return).value()};
}

ReturnFraction rev_exch_return(const ReverseExchangeableTerms& terms,
                               ReturnFraction stock_return) {
  require_valid(validate(terms));
  return ReturnFraction(terms.coupon_rate + std::min(stock_return.value(), 0.0));
}

ReturnFraction ppn_return(const PpnTerms& terms, ReturnFraction index_return) {
  require_valid(validate(terms));
  return ReturnFraction(std::max(0.0, terms.participation_rate * index_return.value()));
}

bool barrier_breached(const BarrierNoteTerms& terms, double initial_close, double close) {
  require_valid(validate(terms));
  if (!(initial_close > 0.0) || !std::isfinite(initial_close))
    throw std::domain_error("initial close must be positive");
  if (!(close > 0.0) || !std::isfinite(close))
    throw std::domain_error("close must be positive");
  const double upper = terms.upper_multiple * initial_close;
  const double lower = terms.lower_multiple * initial_close;
  if (terms.barrier_touch_is_breach) return close >= upper || close <= lower;
  return close > upper || close < lower;
}

bool barrier_path_survives(const BarrierNoteTerms& terms, const PricePath& path_data) {
  const double initial = path_data.front().close;
  for (const auto& obs : path_data.observations()) {
    if (barrier_breached(terms, initial, obs.close)) return false;
  }
  return true;
}

ReturnFraction barrier_note_return(const BarrierNoteTerms& terms, const PricePath& path_data) {
  if (!barrier_path_survives(terms, path_data)) return ReturnFraction(0.0);
  return ReturnFraction(std::abs(realized_return(path_data).value()));
}

}  // namespace snotes
