#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "snotes/dates.hpp"
#include "snotes/product_model.hpp"

namespace snotes {

struct PriceObservation {
  Date date{};
  double close = 0.0;

  friend bool operator==(const PriceObservation&, const PriceObservation&) = default;
};

/// Immutable daily close series with strictly ascending dates and strictly
/// positive closes; the constructor rejects anything else.
class PricePath {
 public:
  explicit PricePath(std::vector<PriceObservation> observations);

  const std::vector<PriceObservation>& observations() const noexcept {
    return observations_;
  }
  std::size_t size() const noexcept { return observations_.size(); }
  const PriceObservation& front() const { return observations_.front(); }
  const PriceObservation& back() const { return observations_.back(); }
  const PriceObservation& at(std::size_t i) const { return observations_.at(i); }

  /// Index of the first observation dated on or after `date`, if any.
  std::optional<std::size_t> first_on_or_after(Date date) const;

  /// Index of the last observation dated on or before `date`, if any.
  std::optional<std::size_t> last_on_or_before(Date date) const;

 private:
  std::vector<PriceObservation> observations_;
};

/// Two-column CSV `date,close` with a mandatory header row, ISO dates,
/// positive closes, strictly ascending. Throws ParseError with the
/// offending line number.
PricePath load_price_csv(const std::string& path);
void save_price_csv(const PricePath& path_data, const std::string& path);

/// Sub-path spanning one holding period: entry at the first observation on
/// or after `start`, exit at the first observation on or after
/// start + horizon_days, or the last observation when the series ends
/// before that. Throws std::domain_error when no entry observation exists
/// or the window would contain fewer than two observations.
PricePath window(const PricePath& path_data, Date start, int horizon_days);

/// Same entry rule, exit at the last observation on or before `end`.
PricePath window_to(const PricePath& path_data, Date start, Date end);

/// (last close - first close) / first close.
ReturnFraction realized_return(const PricePath& path_data);

/// Sign statistics of rolling `horizon_days` returns: every observation i
/// opens a window closing at the first observation dated >= date_i +
/// horizon_days. Mirrors the Scenario convention: p_nonneg counts returns
/// >= 0, cond_gain averages those, cond_loss averages the strict negatives.
/// Either conditional mean is absent when its branch never occurs.
/// Throws std::domain_error when no window fits.
struct EmpiricalSignStats {
  std::size_t n_windows = 0;
  double p_nonneg = 0.0;
  std::optional<double> cond_gain;
  std::optional<double> cond_loss;
};
EmpiricalSignStats empirical_sign_stats(const PricePath& path_data, int horizon_days);

/// One row per date for a fixed-size stock basket.
struct BasketRow {
  Date date{};
  std::vector<double> closes;

  friend bool operator==(const BasketRow&, const BasketRow&) = default;
};

/// Daily close series for an n-stock basket; same ordering and positivity
/// rules as PricePath, and every row must carry the same number of closes.
class BasketSeries {
 public:
  explicit BasketSeries(std::vector<BasketRow> rows);

  const std::vector<BasketRow>& rows() const noexcept { return rows_; }
  std::size_t size() const noexcept { return rows_.size(); }
  std::size_t n_stocks() const noexcept { return n_stocks_; }

  std::optional<std::size_t> last_on_or_before(Date date) const;

 private:
  std::vector<BasketRow> rows_;
  std::size_t n_stocks_ = 0;
};

/// CSV `date,stock_1,...,stock_N` with a mandatory header naming each stock
/// column; same strictness as load_price_csv.
BasketSeries load_basket_csv(const std::string& path);

}  // namespace snotes
