#pragma once

#include "snotes/market_data.hpp"
#include "snotes/product_model.hpp"

namespace snotes {

/// Note-level cash difference against the purchase price, in the note's
/// currency. Negative means the holder lost money.
struct NetPayment {
  double amount = 0.0;

  friend bool operator==(const NetPayment&, const NetPayment&) = default;
};

/// Return optimization security holder return for index return `index_return`:
/// min(5 * r, cap) on gains, r itself on losses. Continuous at zero and
/// capped exactly at terms.cap_m.
ReturnFraction ros_return(const RosTerms& terms, ReturnFraction index_return);

/// price_per_note * ros_return. Computed as exactly that product, so the
/// note-level and return-level views never disagree.
NetPayment ros_net_payment(const RosTerms& terms, ReturnFraction index_return);

/// Reverse exchangeable holder return: full coupon always, principal loss
/// equal to the stock decline when the stock finished below the strike.
/// R = coupon + min(x, 0).
ReturnFraction rev_exch_return(const ReverseExchangeableTerms& terms,
                               ReturnFraction stock_return);

/// Principal-protected note holder return: participation share of gains,
/// zero on losses. R = max(0, participation * r).
ReturnFraction ppn_return(const PpnTerms& terms, ReturnFraction index_return);

/// Whether a close breaches the note's barriers placed at
/// upper_multiple/lower_multiple times `initial_close`.
bool barrier_breached(const BarrierNoteTerms& terms, double initial_close, double close);

/// Walks the whole path: knocked out (return 0) as soon as any close
/// breaches either barrier, else pays |last/first - 1|.
ReturnFraction barrier_note_return(const BarrierNoteTerms& terms, const PricePath& path_data);

/// True when no close in the path breaches the barriers around the first
/// close; the note survives to pay the absolute return.
bool barrier_path_survives(const BarrierNoteTerms& terms, const PricePath& path_data);

}  // namespace snotes
