#include "snotes/product_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "snotes/errors.hpp"

namespace snotes {

namespace {

bool finite(double v) { return std::isfinite(v); }

}  // namespace

ReturnFraction::ReturnFraction(double value) : value_(value) {
  if (!std::isfinite(value)) {
    throw std::domain_error("return fraction must be finite");
  }
}

ValidationReport validate(const RosTerms& terms) {
  if (!finite(terms.price_per_note) || terms.price_per_note <= 0.0)
    return ValidationReport::fail("price_per_note must be positive");
  if (terms.maturity_days <= 0)
    return ValidationReport::fail("maturity_days must be positive");
  if (!finite(terms.cap_m) || terms.cap_m < 0.25 || terms.cap_m > 0.30)
    return ValidationReport::fail("cap_m must lie in [0.25, 0.30]");
  return ValidationReport::pass();
}

ValidationReport validate(const YieldMagnetTerms& terms) {
  if (!finite(terms.redemption_price) || terms.redemption_price <= 0.0)
    return ValidationReport::fail("redemption_price must be positive");
  if (terms.n_stocks <= 0) return ValidationReport::fail("n_stocks must be positive");
  if (!finite(terms.theta_floor) || !finite(terms.theta_cap))
    return ValidationReport::fail("theta bounds must be finite");
  if (!(terms.theta_floor < 0.0) || !(terms.theta_cap > 0.0))
    return ValidationReport::fail("theta_floor must be negative and theta_cap positive");
  if (!finite(terms.fixed_first_coupon) || terms.fixed_first_coupon < 0.0)
    return ValidationReport::fail("fixed_first_coupon must be non-negative");
  if (terms.d_date_offset < 0)
    return ValidationReport::fail("d_date_offset must be >= 0");
  if (terms.payment_dates.empty())
    return ValidationReport::fail("payment_dates must not be empty");
  Date prev = terms.settlement_date;
  for (const Date& d : terms.payment_dates) {
    if (days_between(prev, d) <= 0)
      return ValidationReport::fail("payment_dates must be strictly ascending after settlement");
    prev = d;
  }
  if (days_between(terms.payment_dates.back(), terms.redemption_date) < 0)
    return ValidationReport::fail("redemption_date must not precede the last payment date");
  return ValidationReport::pass();
}

ValidationReport validate(const ReverseExchangeableTerms& terms) {
  if (!finite(terms.price_per_note) || terms.price_per_note <= 0.0)
    return ValidationReport::fail("price_per_note must be positive");
  if (terms.maturity_years <= 0)
    return ValidationReport::fail("maturity_years must be positive");
  if (!finite(terms.coupon_rate) || terms.coupon_rate < 0.0)
    return ValidationReport::fail("coupon_rate must be non-negative");
  if (terms.coupon_frequency <= 0)
    return ValidationReport::fail("coupon_frequency must be positive");
  return ValidationReport::pass();
}

ValidationReport validate(const PpnTerms& terms) {
  if (!finite(terms.price_per_note) || terms.price_per_note <= 0.0)
    return ValidationReport::fail("price_per_note must be positive");
  if (terms.maturity_years <= 0)
    return ValidationReport::fail("maturity_years must be positive");
  if (!finite(terms.participation_rate) || terms.participation_rate <= 0.0 ||
      terms.participation_rate > 1.0)
    return ValidationReport::fail("participation_rate must lie in (0, 1]");
  return ValidationReport::pass();
}

ValidationReport validate(const BarrierNoteTerms& terms) {
  if (!finite(terms.upper_multiple) || !finite(terms.lower_multiple))
    return ValidationReport::fail("barrier multiples must be finite");
  if (!(terms.lower_multiple > 0.0))
    return ValidationReport::fail("lower_multiple must be positive");
  if (!(terms.lower_multiple < 1.0))
    return ValidationReport::fail("lower_multiple must be below 1");
  if (!(terms.upper_multiple > 1.0))
    return ValidationReport::fail("upper_multiple must be above 1");
  return ValidationReport::pass();
}

ValidationReport validate(const Scenario& scenario) {
  if (!finite(scenario.p_nonneg) || scenario.p_nonneg < 0.0 || scenario.p_nonneg > 1.0)
    return ValidationReport::fail("p_nonneg must lie in [0, 1]");
  if (scenario.cond_loss && (!finite(*scenario.cond_loss) || *scenario.cond_loss > 0.0))
    return ValidationReport::fail("cond_loss must be <= 0");
  if (scenario.cond_gain && (!finite(*scenario.cond_gain) || *scenario.cond_gain < 0.0))
    return ValidationReport::fail("cond_gain must be >= 0");
  return ValidationReport::pass();
}

ValidationReport validate(const DiscreteReturnDistribution& dist) {
  if (dist.outcomes.empty())
    return ValidationReport::fail("distribution must have at least one outcome");
  double total = 0.0;
  for (const auto& o : dist.outcomes) {
    if (!finite(o.r)) return ValidationReport::fail("outcome returns must be finite");
    if (!finite(o.p) || o.p < 0.0)
      return ValidationReport::fail("outcome probabilities must be non-negative");
    total += o.p;
  }
  if (std::abs(total - 1.0) > 1e-9)
    return ValidationReport::fail("outcome probabilities must sum to 1");
  return ValidationReport::pass();
}

ValidationReport validate_terms(const ProductTerms& terms) {
  return std::visit([](const auto& t) { return validate(t); }, terms);
}

void require_valid(const ValidationReport& report) {
  if (!report.ok) throw std::domain_error(report.violation);
}

std::string product_tag(const ProductTerms& terms) {
  struct Tagger {
    std::string operator()(const RosTerms&) const { return "ros"; }
    std::string operator()(const YieldMagnetTerms&) const { return "yield_magnet"; }
    std::string operator()(const ReverseExchangeableTerms&) const { return "rev_exch"; }
    std::string operator()(const PpnTerms&) const { return "ppn"; }
    std::string operator()(const BarrierNoteTerms&) const { return "barrier"; }
  };
  return std::visit(Tagger{}, terms);
}

namespace {

using nlohmann::json;

json ros_to_json(const RosTerms& t) {
  return json{{"price_per_note", t.price_per_note},
              {"maturity_days", t.maturity_days},
              {"cap_m", t.cap_m}};
}

json yield_magnet_to_json(const YieldMagnetTerms& t) {
  json dates = json::array();
  for (const Date& d : t.payment_dates) dates.push_back(to_iso_string(d));
  return json{{"redemption_price", t.redemption_price},
              {"n_stocks", t.n_stocks},
              {"theta_floor", t.theta_floor},
              {"theta_cap", t.theta_cap},
              {"fixed_first_coupon", t.fixed_first_coupon},
              {"settlement_date", to_iso_string(t.settlement_date)},
              {"redemption_date", to_iso_string(t.redemption_date)},
              {"payment_dates", dates},
              {"d_date_offset", t.d_date_offset}};
}

json rev_exch_to_json(const ReverseExchangeableTerms& t) {
  return json{{"price_per_note", t.price_per_note},
              {"maturity_years", t.maturity_years},
              {"coupon_rate", t.coupon_rate},
              {"coupon_frequency", t.coupon_frequency}};
}

json ppn_to_json(const PpnTerms& t) {
  return json{{"price_per_note", t.price_per_note},
              {"maturity_years", t.maturity_years},
              {"participation_rate", t.participation_rate}};
}

json barrier_to_json(const BarrierNoteTerms& t) {
  return json{{"upper_multiple", t.upper_multiple},
              {"lower_multiple", t.lower_multiple},
              {"barrier_touch_is_breach", t.barrier_touch_is_breach}};
}

// Field access that distinguishes "absent, keep the default" from
// "present but malformed".
template <typename T>
void read_field(const json& obj, const char* key, T& into) {
  if (!obj.contains(key)) return;
  try {
    into = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("terms field '") + key + "' has the wrong type");
  }
}

void read_date_field(const json& obj, const char* key, Date& into) {
  if (!obj.contains(key)) return;
  if (!obj.at(key).is_string())
    throw ParseError(std::string("terms field '") + key + "' must be an ISO date string");
  try {
    into = parse_date(obj.at(key).get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("terms field '") + key + "': " + e.what());
  }
}

RosTerms ros_from_json(const json& obj) {
  RosTerms t;
  read_field(obj, "price_per_note", t.price_per_note);
  read_field(obj, "maturity_days", t.maturity_days);
  read_field(obj, "cap_m", t.cap_m);
  return t;
}

YieldMagnetTerms yield_magnet_from_json(const json& obj) {
  YieldMagnetTerms t;
  read_field(obj, "redemption_price", t.redemption_price);
  read_field(obj, "n_stocks", t.n_stocks);
  read_field(obj, "theta_floor", t.theta_floor);
  read_field(obj, "theta_cap", t.theta_cap);
  read_field(obj, "fixed_first_coupon", t.fixed_first_coupon);
  read_date_field(obj, "settlement_date", t.settlement_date);
  read_date_field(obj, "redemption_date", t.redemption_date);
  read_field(obj, "d_date_offset", t.d_date_offset);
  if (obj.contains("payment_dates")) {
    if (!obj.at("payment_dates").is_array())
      throw ParseError("terms field 'payment_dates' must be an array of ISO dates");
    t.payment_dates.clear();
    for (const auto& item : obj.at("payment_dates")) {
      if (!item.is_string())
        throw ParseError("terms field 'payment_dates' must contain only ISO date strings");
      try {
        t.payment_dates.push_back(parse_date(item.get<std::string>()));
      } catch (const std::invalid_argument& e) {
        throw ParseError(std::string("terms field 'payment_dates': ") + e.what());
      }
    }
  }
  return t;
}

ReverseExchangeableTerms rev_exch_from_json(const json& obj) {
  ReverseExchangeableTerms t;
  read_field(obj, "price_per_note", t.price_per_note);
  read_field(obj, "maturity_years", t.maturity_years);
  read_field(obj, "coupon_rate", t.coupon_rate);
  read_field(obj, "coupon_frequency", t.coupon_frequency);
  return t;
}

PpnTerms ppn_from_json(const json& obj) {
  PpnTerms t;
  read_field(obj, "price_per_note", t.price_per_note);
  read_field(obj, "maturity_years", t.maturity_years);
  read_field(obj, "participation_rate", t.participation_rate);
  return t;
}

BarrierNoteTerms barrier_from_json(const json& obj) {
  BarrierNoteTerms t;
  read_field(obj, "upper_multiple", t.upper_multiple);
  read_field(obj, "lower_multiple", t.lower_multiple);
  read_field(obj, "barrier_touch_is_breach", t.barrier_touch_is_breach);
  return t;
}

}  // namespace

nlohmann::json terms_to_json(const ProductTerms& terms) {
  struct Writer {
    json operator()(const RosTerms& t) const { return ros_to_json(t); }
    json operator()(const YieldMagnetTerms& t) const { return yield_magnet_to_json(t); }
    json operator()(const ReverseExchangeableTerms& t) const { return rev_exch_to_json(t); }
    json operator()(const PpnTerms& t) const { return ppn_to_json(t); }
    json operator()(const BarrierNoteTerms& t) const { return barrier_to_json(t); }
  };
  return json{{"product", product_tag(terms)}, {"terms", std::visit(Writer{}, terms)}};
}

ProductTerms terms_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("product") || !doc.contains("terms"))
    throw ParseError("terms document must be an object with 'product' and 'terms' keys");
  if (!doc.at("product").is_string())
    throw ParseError("terms field 'product' must be a string");
  if (!doc.at("terms").is_object())
    throw ParseError("terms field 'terms' must be an object");
  const std::string tag = doc.at("product").get<std::string>();
  const nlohmann::json& body = doc.at("terms");
  if (tag == "ros") return ros_from_json(body);
  if (tag == "yield_magnet") return yield_magnet_from_json(body);
  if (tag == "rev_exch") return rev_exch_from_json(body);
  if (tag == "ppn") return ppn_from_json(body);
  if (tag == "barrier") return barrier_from_json(body);
  throw ParseError("unknown product tag '" + tag + "'");
}

ProductTerms load_terms_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open terms file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("terms file is not valid JSON: ") + e.what());
  }
  return terms_from_json(doc);
}

}  // namespace snotes
