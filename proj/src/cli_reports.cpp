#include "snotes/cli_reports.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "snotes/coupon_engine.hpp"
#include "snotes/dates.hpp"
#include "snotes/errors.hpp"
#include "snotes/market_data.hpp"
#include "snotes/payoff_kernels.hpp"

namespace snotes {

namespace {

using nlohmann::json;

std::string normalize_product(std::string name) {
  std::replace(name.begin(), name.end(), '-', '_');
  static constexpr std::array known = {"ros", "yield_magnet", "rev_exch", "ppn", "barrier"};
  if (std::find(known.begin(), known.end(), name) == known.end())
    throw std::invalid_argument("unknown product '" + name + "'");
  return name;
}

std::string utc_now_iso() {
  std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json num_field(double value) {
  return json{{"value", value}, {"display", display_4sig(value)}};
}

json money_field(double value) {
  return json{{"value", value}, {"display", money_display(value)}};
}

// Provenance block shared by all JSON reports.
struct ReportContext {
  bool no_timestamp = false;
  json input_files = json::object();
  std::optional<std::uint64_t> seed;

  void add_file(const std::string& role, const std::string& path) {
    input_files[role] = json{{"path", path}, {"fnv1a64", file_digest(path)}};
  }

  json provenance() const {
    json block{{"artifact_version", kVersion}, {"inputs", input_files}};
    if (seed) block["seed"] = *seed;
    if (!no_timestamp) block["timestamp"] = utc_now_iso();
    return block;
  }
};

void emit_report(std::ostream& out, const std::string& command, const std::string& product,
                 json inputs, json outputs, const ReportContext& ctx) {
  json report{{"command", command},
              {"product", product},
              {"inputs", std::move(inputs)},
              {"outputs", std::move(outputs)},
              {"provenance", ctx.provenance()}};
  out << report.dump(2) << '\n';
}

ProductTerms load_terms_checked(const std::string& path, const std::string& product) {
  ProductTerms terms = load_terms_file(path);
  require_valid(validate_terms(terms));
  if (product_tag(terms) != product)
    throw std::domain_error("terms file describes product '" + product_tag(terms) +
                            "' but the command names '" + product + "'");
  return terms;
}

std::string bound_kind_name(BoundKind kind) {
  return kind == BoundKind::kExact ? "exact" : "upper_bound";
}

json decomposition_to_json(const std::vector<BranchTerm>& branches) {
  json arr = json::array();
  for (const auto& b : branches) {
    arr.push_back(json{{"label", b.label},
                       {"conditional_expectation", b.conditional_expectation},
                       {"probability", b.probability},
                       {"contribution", b.contribution()}});
  }
  return arr;
}

struct PayoffArgs {
  std::string product;
  std::string terms_path;
  std::optional<double> index_return;
  std::optional<double> stock_return;
  std::string prices_path;
};

void require_driver(bool present, const std::string& product, const char* flag) {
  if (!present)
    throw std::invalid_argument("payoff " + product + " needs " + flag);
}

void forbid_driver(bool present, const std::string& product, const char* flag) {
  if (present)
    throw std::invalid_argument(std::string(flag) + " does not apply to " + product);
}

int cmd_payoff(const PayoffArgs& args, ReportContext ctx, std::ostream& out) {
  const ProductTerms terms = load_terms_checked(args.terms_path, args.product);
  ctx.add_file("terms", args.terms_path);
  json inputs{{"terms_file", args.terms_path}, {"terms", terms_to_json(terms)}};
  json outputs;

  if (args.product == "ros") {
    require_driver(args.index_return.has_value(), args.product, "--index-return");
    forbid_driver(args.stock_return.has_value(), args.product, "--stock-return");
    forbid_driver(!args.prices_path.empty(), args.product, "--prices");
    const auto& t = std::get<RosTerms>(terms);
    const ReturnFraction driver{*args.index_return};
    const ReturnFraction holder = ros_return(t, driver);
    inputs["index_return"] = driver.value();
    outputs["return"] = num_field(holder.value());
    outputs["net_payment"] = money_field(ros_net_payment(t, driver).amount);
  } else if (args.product == "rev_exch") {
    require_driver(args.stock_return.has_value(), args.product, "--stock-return");
    forbid_driver(args.index_return.has_value(), args.product, "--index-return");
    forbid_driver(!args.prices_path.empty(), args.product, "--prices");
    const auto& t = std::get<ReverseExchangeableTerms>(terms);
    const ReturnFraction driver{*args.stock_return};
    const ReturnFraction holder = rev_exch_return(t, driver);
    inputs["stock_return"] = driver.value();
    outputs["return"] = num_field(holder.value());
    outputs["net_payment"] = money_field(t.price_per_note * holder.value());
  } else if (args.product == "ppn") {
    require_driver(args.index_return.has_value(), args.product, "--index-return");
    forbid_driver(args.stock_return.has_value(), args.product, "--stock-return");
    forbid_driver(!args.prices_path.empty(), args.product, "--prices");
    const auto& t = std::get<PpnTerms>(terms);
    const ReturnFraction driver{*args.index_return};
    const ReturnFraction holder = ppn_return(t, driver);
    inputs["index_return"] = driver.value();
    outputs["return"] = num_field(holder.value());
    outputs["net_payment"] = money_field(t.price_per_note * holder.value());
  } else if (args.product == "barrier") {
    require_driver(!args.prices_path.empty(), args.product, "--prices");
    forbid_driver(args.index_return.has_value(), args.product, "--index-return");
    forbid_driver(args.stock_return.has_value(), args.product, "--stock-return");
    const auto& t = std::get<BarrierNoteTerms>(terms);
    const PricePath path = load_price_csv(args.prices_path);
    ctx.add_file("prices", args.prices_path);
    inputs["prices_file"] = args.prices_path;
    const bool survived = barrier_path_survives(t, path);
    outputs["survived"] = survived;
    outputs["index_return"] = num_field(realized_return(path).value());
    outputs["return"] = num_field(barrier_note_return(t, path).value());
  } else {
    throw std::invalid_argument(
        "payoff is not defined for yield_magnet; run backtest with a basket price history");
  }

  emit_report(out, "payoff", args.product, std::move(inputs), std::move(outputs), ctx);
  return 0;
}

struct BoundArgs {
  std::string product;
  std::string terms_path;
  double p_nonneg = 0.0;
  std::optional<double> cond_loss;
  std::optional<double> cond_gain;
};

int cmd_bound(const BoundArgs& args, ReportContext ctx, std::ostream& out) {
  const ProductTerms terms = load_terms_checked(args.terms_path, args.product);
  ctx.add_file("terms", args.terms_path);
  const Scenario scenario{args.p_nonneg, args.cond_loss, args.cond_gain};

  ExpectationBound bound;
  if (args.product == "ros") {
    bound = ros_expected_return_bound(std::get<RosTerms>(terms), scenario);
  } else if (args.product == "yield_magnet") {
    bound = yield_magnet_expected_coupon_bound(std::get<YieldMagnetTerms>(terms), scenario);
  } else if (args.product == "rev_exch") {
    bound = rev_exch_expected_return(std::get<ReverseExchangeableTerms>(terms), scenario);
  } else if (args.product == "ppn") {
    bound = ppn_expected_return(std::get<PpnTerms>(terms), scenario);
  } else {
    throw std::invalid_argument(
        "no scenario bound is defined for barrier; its payoff depends on the whole path");
  }

  json inputs{{"terms_file", args.terms_path},
              {"terms", terms_to_json(terms)},
              {"p_nonneg", args.p_nonneg}};
  if (args.cond_loss) inputs["cond_loss"] = *args.cond_loss;
  if (args.cond_gain) inputs["cond_gain"] = *args.cond_gain;

  json outputs{{"value", num_field(bound.value)},
               {"kind", bound_kind_name(bound.kind)},
               {"decomposition", decomposition_to_json(bound.decomposition)}};
  emit_report(out, "bound", args.product, std::move(inputs), std::move(outputs), ctx);
  return 0;
}

struct SweepArgs {
  std::string product;
  std::string terms_path;
  std::string p_range;
  std::string cond_loss_range;
};

// "start:stop:step" inclusive of stop, or a single value.
std::vector<double> parse_range(const std::string& text, const char* flag) {
  std::vector<std::string> parts;
  std::string part;
  std::istringstream stream(text);
  while (std::getline(stream, part, ':')) parts.push_back(part);
  auto to_double = [&](const std::string& s) {
    std::size_t consumed = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &consumed);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(flag) + ": '" + s + "' is not a number");
    }
    if (consumed != s.size() || !std::isfinite(v))
      throw std::invalid_argument(std::string(flag) + ": '" + s + "' is not a number");
    return v;
  };
  if (parts.size() == 1) return {to_double(parts[0])};
  if (parts.size() != 3)
    throw std::invalid_argument(std::string(flag) +
                                " must be a single value or <start:stop:step>");
  const double start = to_double(parts[0]);
  const double stop = to_double(parts[1]);
  const double step = to_double(parts[2]);
  if (step <= 0.0) throw std::invalid_argument(std::string(flag) + ": step must be positive");
  if (stop < start)
    throw std::domain_error(std::string(flag) + ": empty grid, stop is below start");
  const auto count =
      static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = start + static_cast<double>(i) * step;
  return values;
}

int cmd_sweep(const SweepArgs& args, std::ostream& out) {
  const ProductTerms terms = load_terms_checked(args.terms_path, args.product);
  const std::vector<double> ps = parse_range(args.p_range, "--p-nonneg");
  const std::vector<double> losses = parse_range(args.cond_loss_range, "--cond-loss");

  auto bound_at = [&](double p, double loss) {
    const Scenario scenario{p, loss, std::nullopt};
    if (args.product == "ros")
      return ros_expected_return_bound(std::get<RosTerms>(terms), scenario).value;
    if (args.product == "rev_exch")
      return rev_exch_expected_return(std::get<ReverseExchangeableTerms>(terms), scenario).value;
    throw std::invalid_argument(
        "sweep covers the products with a cond_loss branch: ros, rev_exch");
  };

  out << "p_nonneg,cond_loss,bound\n";
  for (double p : ps) {
    for (double loss : losses) {
      out << full_precision(p) << ',' << full_precision(loss) << ','
          << full_precision(bound_at(p, loss)) << '\n';
    }
  }
  return 0;
}

struct BacktestArgs {
  std::string product;
  std::string terms_path;
  std::string prices_path;
  std::optional<std::string> start;
  std::string ratchet_policy = "running-max";
};

json window_to_json(const PricePath& win) {
  return json{{"entry_date", to_iso_string(win.front().date)},
              {"entry_close", win.front().close},
              {"exit_date", to_iso_string(win.back().date)},
              {"exit_close", win.back().close},
              {"observations", win.size()}};
}

int cmd_backtest(const BacktestArgs& args, ReportContext ctx, std::ostream& out) {
  const ProductTerms terms = load_terms_checked(args.terms_path, args.product);
  ctx.add_file("terms", args.terms_path);
  ctx.add_file("prices", args.prices_path);
  json inputs{{"terms_file", args.terms_path},
              {"terms", terms_to_json(terms)},
              {"prices_file", args.prices_path}};
  json outputs;

  if (args.product == "yield_magnet") {
    const auto& t = std::get<YieldMagnetTerms>(terms);
    const RatchetPolicy policy = args.ratchet_policy == "first-year-floor"
                                     ? RatchetPolicy::kFirstYearFloor
                                     : RatchetPolicy::kRunningMax;
    const BasketSeries series = load_basket_csv(args.prices_path);
    const auto entries = run_coupon_schedule(t, series, policy);
    inputs["ratchet_policy"] = args.ratchet_policy;
    json coupons = json::array();
    for (const auto& entry : entries) {
      coupons.push_back(json{{"payment_date", to_iso_string(entry.payment_date)},
                             {"determination_date", to_iso_string(entry.determination_date)},
                             {"fixed", entry.fixed},
                             {"coupon", num_field(entry.coupon)},
                             {"coupon_amount", money_field(entry.coupon_amount)}});
    }
    outputs["coupons"] = std::move(coupons);
    emit_report(out, "backtest", args.product, std::move(inputs), std::move(outputs), ctx);
    return 0;
  }

  if (!args.start)
    throw std::invalid_argument("backtest " + args.product + " needs --start <date>");
  const Date start = parse_date(*args.start);
  inputs["start"] = *args.start;
  const PricePath path = load_price_csv(args.prices_path);

  PricePath win = [&] {
    if (args.product == "ros")
      return window(path, start, std::get<RosTerms>(terms).maturity_days);
    if (args.product == "rev_exch")
      return window_to(path, start,
                       add_years(start, std::get<ReverseExchangeableTerms>(terms).maturity_years));
    if (args.product == "ppn")
      return window_to(path, start, add_years(start, std::get<PpnTerms>(terms).maturity_years));
    return window_to(path, start, path.back().date);
  }();

  const ReturnFraction driver = realized_return(win);
  outputs["window"] = window_to_json(win);

  if (args.product == "ros") {
    const auto& t = std::get<RosTerms>(terms);
    outputs["index_return"] = num_field(driver.value());
    outputs["return"] = num_field(ros_return(t, driver).value());
    outputs["net_payment"] = money_field(ros_net_payment(t, driver).amount);
  } else if (args.product == "rev_exch") {
    const auto& t = std::get<ReverseExchangeableTerms>(terms);
    const ReturnFraction holder = rev_exch_return(t, driver);
    outputs["stock_return"] = num_field(driver.value());
    outputs["return"] = num_field(holder.value());
    outputs["net_payment"] = money_field(t.price_per_note * holder.value());
  } else if (args.product == "ppn") {
    const auto& t = std::get<PpnTerms>(terms);
    const ReturnFraction holder = ppn_return(t, driver);
    outputs["index_return"] = num_field(driver.value());
    outputs["return"] = num_field(holder.value());
    outputs["net_payment"] = money_field(t.price_per_note * holder.value());
  } else {
    const auto& t = std::get<BarrierNoteTerms>(terms);
    outputs["index_return"] = num_field(driver.value());
    outputs["survived"] = barrier_path_survives(t, win);
    outputs["return"] = num_field(barrier_note_return(t, win).value());
  }

  emit_report(out, "backtest", args.product, std::move(inputs), std::move(outputs), ctx);
  return 0;
}

struct SimulateArgs {
  std::string product;
  std::string terms_path;
  std::string dist_path;
  std::uint64_t paths = 0;
  std::uint64_t seed = 0;
};

int cmd_simulate(const SimulateArgs& args, ReportContext ctx, std::ostream& out) {
  const ProductTerms terms = load_terms_checked(args.terms_path, args.product);
  const DiscreteReturnDistribution dist = load_distribution_file(args.dist_path);
  ctx.add_file("terms", args.terms_path);
  ctx.add_file("dist", args.dist_path);
  ctx.seed = args.seed;

  const double oracle = expected_return_oracle(terms, dist);
  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = static_cast<int>(std::clamp(hw, 1u, 8u));
  const MonteCarloEstimate mc =
      monte_carlo_expected_return(terms, dist, args.paths, args.seed, workers);
  const double diff = std::abs(mc.estimate - oracle);
  const double ratio = diff == 0.0 ? 0.0 : diff / mc.std_error;

  json inputs{{"terms_file", args.terms_path},
              {"terms", terms_to_json(terms)},
              {"dist_file", args.dist_path},
              {"dist", distribution_to_json(dist)},
              {"paths", args.paths},
              {"seed", args.seed}};
  json outputs{{"oracle", num_field(oracle)},
               {"estimate", num_field(mc.estimate)},
               {"std_error", num_field(mc.std_error)},
               {"deviation_ratio", num_field(ratio)},
               {"n_paths", mc.n_paths}};
  emit_report(out, "simulate", args.product, std::move(inputs), std::move(outputs), ctx);
  return 0;
}

}  // namespace

std::string money_display(double amount) {
  const double cents = std::nearbyint(amount * 100.0);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", cents / 100.0);
  std::string text = buf;
  if (text == "-0.00") text = "0.00";
  return text;
}

std::string display_4sig(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", value);
  return buf;
}

std::string full_precision(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

std::string file_digest(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open file for digest: " + path);
  std::uint64_t hash = 14695981039346656037ULL;
  char buf[4096];
  while (true) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      hash ^= static_cast<unsigned char>(buf[i]);
      hash *= 1099511628211ULL;
    }
    if (got < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return hex;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured note payoff models, scenario bounds, and backtests", "snotes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  bool no_timestamp = false;
  app.add_flag("--no-timestamp", no_timestamp,
               "Omit the provenance timestamp so reports compare byte for byte");

  PayoffArgs payoff_args;
  auto* payoff = app.add_subcommand("payoff", "Evaluate one payoff for a given driver");
  payoff->fallthrough();
  payoff->add_option("product", payoff_args.product, "ros | rev-exch | ppn | barrier")
      ->required();
  payoff->add_option("--terms", payoff_args.terms_path, "Terms JSON file")->required();
  payoff->add_option("--index-return", payoff_args.index_return,
                     "Index return over the term (ros, ppn)");
  payoff->add_option("--stock-return", payoff_args.stock_return,
                     "Stock return over the term (rev-exch)");
  payoff->add_option("--prices", payoff_args.prices_path, "Daily close CSV (barrier)");

  BoundArgs bound_args;
  auto* bound = app.add_subcommand("bound", "Expected-return bound or exact value for a scenario");
  bound->fallthrough();
  bound->add_option("product", bound_args.product, "ros | yield-magnet | rev-exch | ppn")
      ->required();
  bound->add_option("--terms", bound_args.terms_path, "Terms JSON file")->required();
  bound->add_option("--p-nonneg", bound_args.p_nonneg,
                    "Probability of the non-losing branch")
      ->required();
  bound->add_option("--cond-loss", bound_args.cond_loss,
                    "Expected driver return on the losing branch (<= 0)");
  bound->add_option("--cond-gain", bound_args.cond_gain,
                    "Expected driver return on the gaining branch (>= 0)");

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Tabulate bounds over a scenario grid as CSV");
  sweep->fallthrough();
  sweep->add_option("product", sweep_args.product, "ros | rev-exch")->required();
  sweep->add_option("--terms", sweep_args.terms_path, "Terms JSON file")->required();
  sweep->add_option("--p-nonneg", sweep_args.p_range, "Grid <start:stop:step> or single value")
      ->required();
  sweep->add_option("--cond-loss", sweep_args.cond_loss_range,
                    "Grid <start:stop:step> or single value")
      ->required();

  BacktestArgs backtest_args;
  auto* backtest = app.add_subcommand("backtest", "Replay a payoff against historical closes");
  backtest->fallthrough();
  backtest->add_option("product", backtest_args.product,
                       "ros | yield-magnet | rev-exch | ppn | barrier")
      ->required();
  backtest->add_option("--terms", backtest_args.terms_path, "Terms JSON file")->required();
  backtest->add_option("--prices", backtest_args.prices_path,
                       "Daily close CSV (basket CSV for yield-magnet)")
      ->required();
  backtest->add_option("--start", backtest_args.start,
                       "Holding period start date, ISO (ignored for yield-magnet)");
  backtest
      ->add_option("--ratchet-policy", backtest_args.ratchet_policy,
                   "Coupon floor rule for yield-magnet")
      ->check(CLI::IsMember({"running-max", "first-year-floor"}));

  SimulateArgs simulate_args;
  auto* simulate =
      app.add_subcommand("simulate", "Monte Carlo check against the exact expectation");
  simulate->fallthrough();
  simulate->add_option("product", simulate_args.product, "ros | rev-exch | ppn")->required();
  simulate->add_option("--terms", simulate_args.terms_path, "Terms JSON file")->required();
  simulate->add_option("--dist", simulate_args.dist_path, "Outcome distribution JSON file")
      ->required();
  simulate->add_option("--paths", simulate_args.paths, "Number of simulated paths (>= 1000)")
      ->required();
  simulate->add_option("--seed", simulate_args.seed, "RNG seed")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return 2;
  }

  try {
    ReportContext ctx;
    ctx.no_timestamp = no_timestamp;
    if (payoff->parsed()) {
      payoff_args.product = normalize_product(payoff_args.product);
      return cmd_payoff(payoff_args, std::move(ctx), out);
    }
    if (bound->parsed()) {
      bound_args.product = normalize_product(bound_args.product);
      return cmd_bound(bound_args, std::move(ctx), out);
    }
    if (sweep->parsed()) {
      sweep_args.product = normalize_product(sweep_args.product);
      return cmd_sweep(sweep_args, out);
    }
    if (backtest->parsed()) {
      backtest_args.product = normalize_product(backtest_args.product);
      return cmd_backtest(backtest_args, std::move(ctx), out);
    }
    if (simulate->parsed()) {
      simulate_args.product = normalize_product(simulate_args.product);
      return cmd_simulate(simulate_args, std::move(ctx), out);
    }
    err << "error: no command given\n";
    return 2;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace snotes
