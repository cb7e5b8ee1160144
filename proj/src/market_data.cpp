#include "snotes/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "snotes/errors.hpp"

namespace snotes {

namespace {

// Splits one CSV line on commas. The formats here never quote fields.
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

double parse_close(const std::string& text, std::size_t line_no) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &consumed);
  } catch (const std::exception&) {
    throw ParseError("close is not a number: '" + text + "'", line_no);
  }
  if (consumed != text.size())
    throw ParseError("close has trailing characters: '" + text + "'", line_no);
  if (!std::isfinite(value) || value <= 0.0)
    throw ParseError("close must be a positive number: '" + text + "'", line_no);
  return value;
}

Date parse_row_date(const std::string& text, std::size_t line_no) {
  try {
    return parse_date(text);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_no);
  }
}

}  // namespace

PricePath::PricePath(std::vector<PriceObservation> observations)
    : observations_(std::move(observations)) {
  if (observations_.empty()) throw std::domain_error("price path must not be empty");
  for (std::size_t i = 0; i < observations_.size(); ++i) {
    if (!std::isfinite(observations_[i].close) || observations_[i].close <= 0.0)
      throw std::domain_error("price path closes must be positive");
    if (i > 0 && days_between(observations_[i - 1].date, observations_[i].date) <= 0)
      throw std::domain_error("price path dates must be strictly ascending");
  }
}

std::optional<std::size_t> PricePath::first_on_or_after(Date date) const {
  auto it = std::lower_bound(observations_.begin(), observations_.end(), date,
                             [](const PriceObservation& obs, Date d) {
                               return days_between(obs.date, d) > 0;
                             });
  if (it == observations_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - observations_.begin());
}

std::optional<std::size_t> PricePath::last_on_or_before(Date date) const {
  auto it = std::upper_bound(observations_.begin(), observations_.end(), date,
                             [](Date d, const PriceObservation& obs) {
                               return days_between(d, obs.date) > 0;
                             });
  if (it == observations_.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - observations_.begin()) - 1;
}

PricePath load_price_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open price file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("price file is empty: " + path);
  ++line_no;
  auto header = split_csv(strip_cr(line));
  if (header.size() != 2 || header[0] != "date" || header[1] != "close")
    throw ParseError("expected header 'date,close'", line_no);

  std::vector<PriceObservation> observations;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != 2)
      throw ParseError("expected 2 fields, got " + std::to_string(fields.size()), line_no);
    PriceObservation obs{parse_row_date(fields[0], line_no), parse_close(fields[1], line_no)};
    if (!observations.empty() && days_between(observations.back().date, obs.date) <= 0)
      throw ParseError("dates must be strictly ascending", line_no);
    observations.push_back(obs);
  }
  if (observations.empty()) throw ParseError("price file has no data rows: " + path);
  return PricePath(std::move(observations));
}

void save_price_csv(const PricePath& path_data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  out << "date,close\n";
  out.precision(17);
  for (const auto& obs : path_data.observations())
    out << to_iso_string(obs.date) << ',' << obs.close << '\n';
}

PricePath window(const PricePath& path_data, Date start, int horizon_days) {
  if (horizon_days <= 0) throw std::domain_error("horizon_days must be positive");
  return window_to(path_data, start, add_calendar_days(start, horizon_days));
}

PricePath window_to(const PricePath& path_data, Date start, Date end) {
  if (days_between(start, end) <= 0)
    throw std::domain_error("window end must be after its start");
  auto begin_idx = path_data.first_on_or_after(start);
  if (!begin_idx)
    throw std::domain_error("no observation on or after window start " + to_iso_string(start));
  // Exit at the first observation on or after the end date; when the series
  // stops short, the last available observation closes the window.
  std::size_t end_idx = path_data.first_on_or_after(end).value_or(path_data.size() - 1);
  if (end_idx <= *begin_idx)
    throw std::domain_error("window holds fewer than two observations from " +
                            to_iso_string(start));
  std::vector<PriceObservation> slice(path_data.observations().begin() + *begin_idx,
                                      path_data.observations().begin() + end_idx + 1);
  return PricePath(std::move(slice));
}

ReturnFraction realized_return(const PricePath& path_data) {
  const double first = path_data.front().close;
  const double last = path_data.back().close;
  return ReturnFraction((last - first) / first);
}

EmpiricalSignStats empirical_sign_stats(const PricePath& path_data, int horizon_days) {
  if (horizon_days <= 0) throw std::domain_error("horizon_days must be positive");
  std::size_t n = 0;
  std::size_t n_gain = 0;
  double gain_sum = 0.0;
  double loss_sum = 0.0;
  std::size_t n_loss = 0;
  for (std::size_t i = 0; i < path_data.size(); ++i) {
    Date target = add_calendar_days(path_data.at(i).date, horizon_days);
    auto j = path_data.first_on_or_after(target);
    if (!j) break;
    double r = (path_data.at(*j).close - path_data.at(i).close) / path_data.at(i).close;
    ++n;
    if (r >= 0.0) {
      ++n_gain;
      gain_sum += r;
    } else {
      ++n_loss;
      loss_sum += r;
    }
  }
  if (n == 0)
    throw std::domain_error("price series is shorter than one horizon window");
  EmpiricalSignStats stats;
  stats.n_windows = n;
  stats.p_nonneg = static_cast<double>(n_gain) / static_cast<double>(n);
  if (n_gain > 0) stats.cond_gain = gain_sum / static_cast<double>(n_gain);
  if (n_loss > 0) stats.cond_loss = loss_sum / static_cast<double>(n_loss);
  return stats;
}

BasketSeries::BasketSeries(std::vector<BasketRow> rows) : rows_(std::move(rows)) {
  if (rows_.empty()) throw std::domain_error("basket series must not be empty");
  n_stocks_ = rows_.front().closes.size();
  if (n_stocks_ == 0) throw std::domain_error("basket rows must hold at least one close");
  for (std::size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].closes.size() != n_stocks_)
      throw std::domain_error("basket rows must all hold the same number of closes");
    for (double c : rows_[i].closes) {
      if (!std::isfinite(c) || c <= 0.0)
        throw std::domain_error("basket closes must be positive");
    }
    if (i > 0 && days_between(rows_[i - 1].date, rows_[i].date) <= 0)
      throw std::domain_error("basket dates must be strictly ascending");
  }
}

std::optional<std::size_t> BasketSeries::last_on_or_before(Date date) const {
  auto it = std::upper_bound(rows_.begin(), rows_.end(), date,
                             [](Date d, const BasketRow& row) {
                               return days_between(d, row.date) > 0;
                             });
  if (it == rows_.begin()) return std::nullopt;
  return static_cast<std::size_t>(it - rows_.begin()) - 1;
}

BasketSeries load_basket_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open basket file: " + path);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("basket file is empty: " + path);
  ++line_no;
  auto header = split_csv(strip_cr(line));
  if (header.size() < 2 || header[0] != "date")
    throw ParseError("expected header 'date,<stock columns...>'", line_no);
  const std::size_t n_stocks = header.size() - 1;

  std::vector<BasketRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    auto fields = split_csv(line);
    if (fields.size() != n_stocks + 1)
      throw ParseError("expected " + std::to_string(n_stocks + 1) + " fields, got " +
                           std::to_string(fields.size()),
                       line_no);
    BasketRow row;
    row.date = parse_row_date(fields[0], line_no);
    row.closes.reserve(n_stocks);
    for (std::size_t k = 1; k < fields.size(); ++k)
      row.closes.push_back(parse_close(fields[k], line_no));
    if (!rows.empty() && days_between(rows.back().date, row.date) <= 0)
      throw ParseError("dates must be strictly ascending", line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("basket file has no data rows: " + path);
  return BasketSeries(std::move(rows));
}

}  // namespace snotes
