#include "shotnoise/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "shotnoise/greeks.hpp"

#ifndef SHOTNOISE_VERSION
#define SHOTNOISE_VERSION "unknown"
#endif

namespace shotnoise::cli {

using nlohmann::json;

namespace {

constexpr Command kCommands[] = {Command::price,    Command::greeks, Command::bond,
                                 Command::curve,    Command::mc,     Command::validate,
                                 Command::limits};

// Reads one JSON object, remembering which keys were consumed so that leftovers can be
// reported as unknown.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(path_ + ": expected an object");
  }

  bool has(const char* key) const { return node_.contains(key); }

  template <typename T>
  void read(const char* key, T& target) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    try {
      target = node_.at(key).get<T>();
    } catch (const json::exception&) {
      throw ConfigError(path_ + "." + key + ": wrong type");
    }
  }

  template <typename T, typename Parse>
  void read_enum(const char* key, T& target, Parse parse) {
    std::string name;
    if (!node_.contains(key)) return;
    read(key, name);
    try {
      target = parse(name);
    } catch (const DomainError& e) {
      throw ConfigError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T, typename Parse>
  void read_enum_list(const char* key, std::vector<T>& target, Parse parse) {
    std::vector<std::string> names;
    if (!node_.contains(key)) return;
    read(key, names);
    target.clear();
    for (const auto& n : names) {
      try {
        target.push_back(parse(n));
      } catch (const DomainError& e) {
        throw ConfigError(path_ + "." + key + ": " + e.what());
      }
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    return Section(node_.at(key), path_ + "." + key);
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) throw ConfigError("unknown key " + path_ + "." + item.key());
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void require_nonempty(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw ConfigError(std::string(what) + " must not be empty");
}

void validate_config(const RunConfig& c) {
  try {
    c.asset.validate();
    c.rate.validate();
    c.sim.validate();
    c.quad.validate();
    for (const double s : c.contracts.spots) OptionTerms{s, 1.0, 1.0, 0.0, 0.0}.validate();
    for (const double k : c.contracts.strikes) OptionTerms{1.0, k, 1.0, 0.0, 0.0}.validate();
    for (const double t : c.contracts.maturities) OptionTerms{1.0, 1.0, t, 0.0, 0.0}.validate();
    OptionTerms{1.0, 1.0, 1.0, c.contracts.rate, c.contracts.dividend}.validate();
    for (const double T : c.bonds.maturities) BondTerms{c.bonds.t, T, c.bonds.r0}.validate();
    c.limits.terms.validate();
    c.limits.rate.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("invalid configuration: ") + e.what());
  }
  require_nonempty(c.contracts.spots, "contracts.spots");
  require_nonempty(c.contracts.strikes, "contracts.strikes");
  require_nonempty(c.contracts.maturities, "contracts.maturities");
  require_nonempty(c.bonds.maturities, "bonds.maturities");
  if (c.contracts.kinds.empty()) throw ConfigError("contracts.kinds must not be empty");
  if (c.bonds.variants.empty()) throw ConfigError("bonds.variants must not be empty");
  if (c.limits.scales.empty()) throw ConfigError("limits.scales must not be empty");
  if (!(c.limits.lambda0 > 0.0 && c.limits.rate.lambda_r > 0.0)) {
    throw ConfigError("limits: base intensities must be > 0");
  }
}

std::string iso_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::string cell_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    return std::isfinite(*d) ? json(*d) : json(nullptr);
  }
  if (const auto* i = std::get_if<long long>(&c)) return json(*i);
  return json(std::get<std::string>(c));
}

const Cell kBlank = std::string();

Cell yes_no(bool v) { return std::string(v ? "yes" : "no"); }

// ---- commands -------------------------------------------------------------------------

std::vector<Cell> asset_cells(const OptionTerms& t, const AssetModel& m) {
  return {t.spot, t.strike, t.tau, t.rate, t.dividend, m.lambda, m.law.nu, m.law.delta,
          m.sigma, std::string(to_string(t.kind))};
}

const std::vector<std::string> kAssetColumns{"S",      "K",  "tau",   "r",     "q",
                                             "lambda", "nu", "delta", "sigma", "kind"};

std::vector<Cell> rate_cells(const RateModel& m) {
  return {m.a, m.b, m.sigma_r, m.lambda_r, m.law.nu, m.law.delta};
}

const std::vector<std::string> kRateColumns{"a", "b", "sigma_r", "lambda_r", "nu_r", "delta_r"};

template <typename Fn>
void for_each_contract(const RunConfig& c, Fn fn) {
  for (const double s : c.contracts.spots) {
    for (const double k : c.contracts.strikes) {
      for (const double tau : c.contracts.maturities) {
        for (const OptionKind kind : c.contracts.kinds) {
          fn(OptionTerms{s, k, tau, c.contracts.rate, c.contracts.dividend, kind});
        }
      }
    }
  }
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

Report run_price(const RunConfig& c) {
  Report r;
  r.columns = concat(kAssetColumns, {"price", "est_error", "backend"});
  for_each_contract(c, [&](const OptionTerms& t) {
    const PriceResult p = price(t, c.asset, c.backend, c.quad);
    auto row = asset_cells(t, c.asset);
    row.insert(row.end(), {p.value, p.est_error, std::string(to_string(p.backend))});
    r.rows.push_back(std::move(row));
  });
  return r;
}

Report run_greeks(const RunConfig& c) {
  Report r;
  r.columns = concat(kAssetColumns, {"Delta", "Gamma", "Rho", "Psi", "Theta", "Vega", "Kappa",
                                     "Mu", "Epsilon", "delta_jump", "note"});
  for_each_contract(c, [&](const OptionTerms& t) {
    auto row = asset_cells(t, c.asset);
    if (t.tau == 0.0) {
      row.insert(row.end(), 10, kBlank);
      row.push_back(std::string("tau = 0"));
    } else {
      try {
        const GreekSet g = common_greeks(t, c.asset, c.backend, c.quad);
        const NewGreekSet n = new_greeks(t, c.asset, c.backend, c.quad);
        row.insert(row.end(), {g.delta, g.gamma, g.rho, g.psi, g.theta,
                               g.vega ? Cell(*g.vega) : kBlank, n.kappa, n.mu, n.epsilon,
                               g.delta_jump,
                               std::string(n.extension ? "jump greeks with diffusion" : "")});
      } catch (const KinkError&) {
        row.insert(row.end(), 10, kBlank);
        row.push_back(std::string("kink: evaluate at l +/- eps"));
      }
    }
    r.rows.push_back(std::move(row));
  });
  return r;
}

Report run_bond(const RunConfig& c, bool curve) {
  Report r;
  r.columns = concat({"t", "T", "r_t"}, kRateColumns);
  r.columns = concat(r.columns, curve ? std::vector<std::string>{"variant", "price", "zero_yield"}
                                      : std::vector<std::string>{"variant", "A", "B", "price"});
  for (const RateVariant v : c.bonds.variants) {
    for (const double T : c.bonds.maturities) {
      const BondTerms bt{c.bonds.t, T, c.bonds.r0};
      std::vector<Cell> row{bt.t, bt.T, bt.r_t};
      const auto rc = rate_cells(c.rate);
      row.insert(row.end(), rc.begin(), rc.end());
      row.push_back(std::string(to_string(v)));
      const double p = bond_price(c.rate, bt, v, c.quad);
      if (curve) {
        row.push_back(p);
        row.push_back(bt.tenor() > 0.0 ? Cell(zero_yield(p, bt.tenor())) : kBlank);
      } else {
        row.push_back(a_variant(c.rate, bt.t, bt.T, v, c.quad));
        row.push_back(b_factor(c.rate, bt.t, bt.T));
        row.push_back(p);
      }
      r.rows.push_back(std::move(row));
    }
  }
  return r;
}

Report run_mc(const RunConfig& c) {
  Report r;
  r.columns = concat(concat({"target"}, kAssetColumns), {"t", "T", "r_t"});
  r.columns = concat(r.columns, kRateColumns);
  r.columns = concat(r.columns, {"seed", "paths", "analytic", "mc_mean", "std_error", "z_score"});
  const auto seed = static_cast<long long>(c.sim.seed);
  const auto finish_row = [&](std::vector<Cell> row, double analytic, const McEstimate& e) {
    row.insert(row.end(), {seed, static_cast<long long>(e.paths_used), analytic, e.mean,
                           e.std_error,
                           e.std_error > 0.0 ? Cell((e.mean - analytic) / e.std_error) : kBlank});
    r.rows.push_back(std::move(row));
  };
  const auto blank_asset = std::vector<Cell>(kAssetColumns.size(), kBlank);
  const auto blank_rate = std::vector<Cell>(kRateColumns.size() + 3, kBlank);

  for_each_contract(c, [&](const OptionTerms& t) {
    if (t.tau == 0.0) return;
    std::vector<Cell> row{std::string("option")};
    const auto a = asset_cells(t, c.asset);
    row.insert(row.end(), a.begin(), a.end());
    row.insert(row.end(), blank_rate.begin(), blank_rate.end());
    finish_row(std::move(row), price(t, c.asset, c.backend, c.quad).value,
               mc_option_price(t, c.asset, c.sim));
  });
  for (const double s : c.contracts.spots) {
    for (const double tau : c.contracts.maturities) {
      if (tau == 0.0) continue;
      const OptionTerms t{s, s, tau, c.contracts.rate, c.contracts.dividend, OptionKind::call};
      std::vector<Cell> row{std::string("forward")};
      auto a = asset_cells(t, c.asset);
      a[1] = kBlank;
      a.back() = kBlank;
      row.insert(row.end(), a.begin(), a.end());
      row.insert(row.end(), blank_rate.begin(), blank_rate.end());
      finish_row(std::move(row), s * std::exp(-t.dividend * tau),
                 mc_discounted_forward(t, c.asset, c.sim));
    }
  }
  for (const double T : c.bonds.maturities) {
    if (!(T > c.bonds.t)) continue;
    const BondTerms bt{c.bonds.t, T, c.bonds.r0};
    std::vector<Cell> row{std::string("bond")};
    row.insert(row.end(), blank_asset.begin(), blank_asset.end());
    row.insert(row.end(), {bt.t, bt.T, bt.r_t});
    const auto rc = rate_cells(c.rate);
    row.insert(row.end(), rc.begin(), rc.end());
    finish_row(std::move(row), bond_price(c.rate, bt, RateVariant::general, c.quad),
               mc_bond_price(c.rate, bt, c.sim));
  }
  {
    const double horizon = c.bonds.maturities.front() - c.bonds.t;
    if (horizon > 0.0) {
      SimConfig sim = c.sim;
      sim.antithetic = false;
      const RateMomentEstimate est = mc_rate_moments(c.rate, c.bonds.r0, horizon, sim);
      const RateMoments exact =
          conditional_moments(c.rate, c.bonds.r0, horizon, RateVariant::general);
      for (const bool is_mean : {true, false}) {
        std::vector<Cell> row{std::string(is_mean ? "rate_mean" : "rate_variance")};
        row.insert(row.end(), blank_asset.begin(), blank_asset.end());
        row.insert(row.end(), {c.bonds.t, c.bonds.t + horizon, c.bonds.r0});
        const auto rc = rate_cells(c.rate);
        row.insert(row.end(), rc.begin(), rc.end());
        finish_row(std::move(row), is_mean ? exact.mean : exact.variance,
                   is_mean ? est.mean : est.variance);
      }
    }
  }
  return r;
}

Report run_validate(const RunConfig& c) {
  Report r;
  r.columns = {"check", "detail", "value", "tolerance", "pass"};
  const auto add = [&](const std::string& check, const std::string& detail, double value,
                       double tol) {
    const bool ok = std::isfinite(value) && value <= tol;
    r.rows.push_back({check, detail, value, tol, yes_no(ok)});
    if (!ok) {
      r.failures.push_back(check + " [" + detail + "] = " + format_number(value) + " > " +
                           format_number(tol));
    }
  };
  const auto detail = [](std::initializer_list<std::pair<const char*, double>> kv) {
    std::string s;
    for (const auto& [k, v] : kv) {
      if (!s.empty()) s += ' ';
      s += std::string(k) + "=" + format_number(v);
    }
    return s;
  };
  QuadratureSpec tight = c.quad;
  tight.rel_tol = std::min(c.quad.rel_tol, 1e-14);

  for (const double s : c.contracts.spots) {
    for (const double k : c.contracts.strikes) {
      for (const double tau : c.contracts.maturities) {
        if (tau == 0.0) continue;
        const OptionTerms t{s, k, tau, c.contracts.rate, c.contracts.dividend};
        const double res = parity_residual(t, c.asset, c.backend, c.quad);
        add("parity", detail({{"S", s}, {"K", k}, {"tau", tau}}), std::abs(res) / std::max(s, k),
            c.tolerances.parity);
      }
    }
  }

  const ResidualReport agreement = backend_agreement(BackendGrid{}, c.quad);
  add("backend_agreement", "points=" + std::to_string(agreement.grid_points),
      agreement.max_residual, c.tolerances.backend);

  std::vector<OptionGridPoint> grid;
  for (const double s : c.contracts.spots) {
    for (const double k : c.contracts.strikes) {
      for (const double tau : c.contracts.maturities) grid.push_back({s * 100.0 / k, tau});
    }
  }
  for (const OptionKind kind : c.contracts.kinds) {
    const OptionTerms base{100.0, 100.0, 1.0, c.contracts.rate, c.contracts.dividend, kind};
    const ResidualReport pide = option_pide_residual(base, grid, c.asset, tight);
    add("option_pide", std::string(to_string(kind)) + " points=" +
                           std::to_string(pide.grid_points) +
                           " rejected=" + std::to_string(pide.rejected.size()),
        pide.max_residual, c.tolerances.option_pide);
  }

  const double first_T = c.bonds.maturities.front();
  for (const RateVariant v : c.bonds.variants) {
    if (first_T - c.bonds.t > 0.01) {
      std::vector<BondGridPoint> bgrid;
      for (const double frac : {0.25, 0.5, 0.75}) {
        for (const double dr : {-0.02, 0.0, 0.02}) {
          bgrid.push_back({c.bonds.t + frac * (first_T - c.bonds.t), c.bonds.r0 + dr});
        }
      }
      const ResidualReport bp = bond_pide_residual(c.rate, v, first_T, bgrid, tight);
      add("bond_pide", std::string(to_string(v)) + " T=" + format_number(first_T),
          bp.max_residual, c.tolerances.bond_pide);
    }
    for (const double T : c.bonds.maturities) {
      if (!(T > c.bonds.t)) continue;
      const OdeResidual ode = ode_residual(c.rate, c.bonds.t, T, v, c.quad);
      const std::string d = std::string(to_string(v)) + " T=" + format_number(T);
      add("ode_B", d, ode.res_b, c.tolerances.ode_b);
      add("ode_A", d, ode.res_a,
          v == RateVariant::vasicek ? c.tolerances.ode_a_closed : c.tolerances.ode_a_quadrature);
    }
  }

  if (c.asset.sigma == 0.0 && c.asset.lambda > 0.0) {
    for (const double s : c.contracts.spots) {
      for (const double k : c.contracts.strikes) {
        for (const double tau : c.contracts.maturities) {
          if (tau == 0.0) continue;
          const OptionTerms t{s, k, tau, c.contracts.rate, c.contracts.dividend};
          if (std::abs(l_parameter(t, c.asset)) < 0.05) continue;
          for (const auto& id : identity_report(t, c.asset, Backend::series, c.quad)) {
            add("identity_" + id.name, detail({{"S", s}, {"K", k}, {"tau", tau}}), id.residual,
                c.tolerances.identity);
          }
        }
      }
    }
  }
  return r;
}

Report run_limits(const RunConfig& c) {
  Report r;
  r.columns = {"scale", "lambda", "nu", "delta", "bs_vol", "price_error", "theta_error",
               "bond_error"};
  const auto rows = diffusion_convergence(c.limits, c.quad);
  for (const auto& row : rows) {
    const double lam = c.limits.lambda0 * row.scale;
    const double nu = c.limits.m / lam;
    const double delta = std::sqrt(c.limits.s2 / lam);
    const double vol = std::sqrt(lam * (nu * nu + delta * delta));
    r.rows.push_back({static_cast<long long>(row.scale), lam, nu, delta, vol, row.price_error,
                      row.theta_error, row.bond_error});
  }
  if (!is_monotone(rows)) r.failures.push_back("errors are not monotone in the scale");
  const auto& last = rows.back();
  if (last.price_error > c.tolerances.limit_price) {
    r.failures.push_back("price error at largest scale " + format_number(last.price_error));
  }
  if (last.theta_error > c.tolerances.limit_theta) {
    r.failures.push_back("theta error at largest scale " + format_number(last.theta_error));
  }
  if (last.bond_error > c.tolerances.limit_bond) {
    r.failures.push_back("bond error at largest scale " + format_number(last.bond_error));
  }
  return r;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path == "-") {
    out << text;
    out.flush();
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file '" + path + "'");
  f << text;
  if (!f) throw ConfigError("failed writing output file '" + path + "'");
}

}  // namespace

std::string_view to_string(Command command) {
  switch (command) {
    case Command::price: return "price";
    case Command::greeks: return "greeks";
    case Command::bond: return "bond";
    case Command::curve: return "curve";
    case Command::mc: return "mc";
    case Command::validate: return "validate";
    case Command::limits: return "limits";
  }
  return "price";
}

Command parse_command(std::string_view name) {
  for (const Command c : kCommands) {
    if (to_string(c) == name) return c;
  }
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

RunConfig parse_config(std::string_view json_text, Command command) {
  RunConfig c;
  c.command = command;
  if (command == Command::curve) {
    c.bonds.maturities = {0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 7.0, 10.0, 15.0, 20.0, 30.0};
  }
  json root;
  try {
    root = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  Section top(root, "config");
  if (top.has("command")) {
    std::string name;
    top.read("command", name);
    if (parse_command(name) != command) {
      throw ConfigError("config command '" + name + "' does not match the subcommand");
    }
  }
  top.read_enum("backend", c.backend, parse_backend);

  if (top.has("model")) {
    Section s = top.child("model");
    s.read("lambda", c.asset.lambda);
    s.read("nu", c.asset.law.nu);
    s.read("delta", c.asset.law.delta);
    s.read("sigma", c.asset.sigma);
    s.finish();
  }
  if (top.has("contracts")) {
    Section s = top.child("contracts");
    s.read("spots", c.contracts.spots);
    s.read("strikes", c.contracts.strikes);
    s.read("maturities", c.contracts.maturities);
    s.read("rate", c.contracts.rate);
    s.read("dividend", c.contracts.dividend);
    s.read_enum_list("kinds", c.contracts.kinds, parse_option_kind);
    s.finish();
  }
  if (top.has("rate_model")) {
    Section s = top.child("rate_model");
    s.read("a", c.rate.a);
    s.read("b", c.rate.b);
    s.read("sigma_r", c.rate.sigma_r);
    s.read("lambda_r", c.rate.lambda_r);
    s.read("nu_r", c.rate.law.nu);
    s.read("delta_r", c.rate.law.delta);
    s.finish();
  }
  if (top.has("bonds")) {
    Section s = top.child("bonds");
    s.read("t", c.bonds.t);
    s.read("maturities", c.bonds.maturities);
    s.read("r0", c.bonds.r0);
    s.read_enum_list("variants", c.bonds.variants, parse_rate_variant);
    s.finish();
  }
  if (top.has("sim")) {
    Section s = top.child("sim");
    s.read("paths", c.sim.paths);
    s.read("seed", c.sim.seed);
    s.read("antithetic", c.sim.antithetic);
    s.read("threads", c.sim.threads);
    s.finish();
  }
  if (top.has("quad")) {
    Section s = top.child("quad");
    s.read("rel_tol", c.quad.rel_tol);
    s.read("k_max", c.quad.k_max);
    s.read("k_nodes", c.quad.k_nodes);
    s.read("n_max", c.quad.n_max);
    s.finish();
  }
  if (top.has("tolerances")) {
    Section s = top.child("tolerances");
    s.read("parity", c.tolerances.parity);
    s.read("backend", c.tolerances.backend);
    s.read("option_pide", c.tolerances.option_pide);
    s.read("bond_pide", c.tolerances.bond_pide);
    s.read("ode_b", c.tolerances.ode_b);
    s.read("ode_a_closed", c.tolerances.ode_a_closed);
    s.read("ode_a_quadrature", c.tolerances.ode_a_quadrature);
    s.read("identity", c.tolerances.identity);
    s.read("limit_price", c.tolerances.limit_price);
    s.read("limit_theta", c.tolerances.limit_theta);
    s.read("limit_bond", c.tolerances.limit_bond);
    s.finish();
  }
  if (top.has("limits")) {
    Section s = top.child("limits");
    s.read("spot", c.limits.terms.spot);
    s.read("strike", c.limits.terms.strike);
    s.read("tau", c.limits.terms.tau);
    s.read("rate", c.limits.terms.rate);
    s.read("dividend", c.limits.terms.dividend);
    s.read("lambda0", c.limits.lambda0);
    s.read("m", c.limits.m);
    s.read("s2", c.limits.s2);
    s.read("a", c.limits.rate.a);
    s.read("rate_lambda0", c.limits.rate.lambda_r);
    s.read("rate_m", c.limits.rate_m);
    s.read("rate_s2", c.limits.rate_s2);
    s.read("t", c.limits.t);
    s.read("T", c.limits.T);
    s.read("scales", c.limits.scales);
    s.finish();
  }
  if (top.has("output")) {
    Section s = top.child("output");
    s.read("path", c.out);
    s.read_enum("format", c.format, [](const std::string& f) {
      if (f == "csv") return Format::csv;
      if (f == "json") return Format::json;
      throw DomainError("unknown format '" + f + "'");
    });
    s.finish();
  }
  top.finish();
  return c;
}

std::string config_to_json(const RunConfig& c) {
  json j;
  j["command"] = std::string(to_string(c.command));
  j["backend"] = std::string(to_string(c.backend));
  j["model"] = {{"lambda", c.asset.lambda},
                {"nu", c.asset.law.nu},
                {"delta", c.asset.law.delta},
                {"sigma", c.asset.sigma}};
  std::vector<std::string> kinds;
  for (const auto k : c.contracts.kinds) kinds.emplace_back(to_string(k));
  j["contracts"] = {{"spots", c.contracts.spots},         {"strikes", c.contracts.strikes},
                    {"maturities", c.contracts.maturities}, {"rate", c.contracts.rate},
                    {"dividend", c.contracts.dividend},   {"kinds", kinds}};
  j["rate_model"] = {{"a", c.rate.a},           {"b", c.rate.b},
                     {"sigma_r", c.rate.sigma_r}, {"lambda_r", c.rate.lambda_r},
                     {"nu_r", c.rate.law.nu},   {"delta_r", c.rate.law.delta}};
  std::vector<std::string> variants;
  for (const auto v : c.bonds.variants) variants.emplace_back(to_string(v));
  j["bonds"] = {{"t", c.bonds.t},
                {"maturities", c.bonds.maturities},
                {"r0", c.bonds.r0},
                {"variants", variants}};
  j["sim"] = {{"paths", c.sim.paths},
              {"seed", c.sim.seed},
              {"antithetic", c.sim.antithetic},
              {"threads", c.sim.threads}};
  j["quad"] = {{"rel_tol", c.quad.rel_tol},
               {"k_max", c.quad.k_max},
               {"k_nodes", c.quad.k_nodes},
               {"n_max", c.quad.n_max}};
  const Tolerances& t = c.tolerances;
  j["tolerances"] = {{"parity", t.parity},
                     {"backend", t.backend},
                     {"option_pide", t.option_pide},
                     {"bond_pide", t.bond_pide},
                     {"ode_b", t.ode_b},
                     {"ode_a_closed", t.ode_a_closed},
                     {"ode_a_quadrature", t.ode_a_quadrature},
                     {"identity", t.identity},
                     {"limit_price", t.limit_price},
                     {"limit_theta", t.limit_theta},
                     {"limit_bond", t.limit_bond}};
  const ScalingStudy& l = c.limits;
  j["limits"] = {{"spot", l.terms.spot},       {"strike", l.terms.strike},
                 {"tau", l.terms.tau},         {"rate", l.terms.rate},
                 {"dividend", l.terms.dividend}, {"lambda0", l.lambda0},
                 {"m", l.m},                   {"s2", l.s2},
                 {"a", l.rate.a},              {"rate_lambda0", l.rate.lambda_r},
                 {"rate_m", l.rate_m},         {"rate_s2", l.rate_s2},
                 {"t", l.t},                   {"T", l.T},
                 {"scales", l.scales}};
  j["output"] = {{"path", c.out}, {"format", c.format == Format::csv ? "csv" : "json"}};
  return j.dump();
}

Report execute(const RunConfig& config) {
  validate_config(config);
  switch (config.command) {
    case Command::price: return run_price(config);
    case Command::greeks: return run_greeks(config);
    case Command::bond: return run_bond(config, false);
    case Command::curve: return run_bond(config, true);
    case Command::mc: return run_mc(config);
    case Command::validate: return run_validate(config);
    case Command::limits: return run_limits(config);
  }
  return {};
}

std::string render_body(const Report& report, Format format) {
  if (format == Format::json) {
    json rows = json::array();
    for (const auto& row : report.rows) {
      json jr = json::array();
      for (const auto& cell : row) jr.push_back(cell_json(cell));
      rows.push_back(std::move(jr));
    }
    json body = {{"columns", report.columns}, {"rows", rows}, {"failures", report.failures}};
    return body.dump(1);
  }
  std::string out;
  for (std::size_t i = 0; i < report.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(report.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : report.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(cell_text(row[i]));
    }
    out += "\r\n";
  }
  return out;
}

std::string render(const Report& report, const RunConfig& config, std::string_view timestamp) {
  const std::string body = render_body(report, config.format);
  if (config.format == Format::json) {
    // Header and body on separate top-level lines so the body can be compared verbatim.
    json header = {{"library", "shotnoise"},
                   {"version", SHOTNOISE_VERSION},
                   {"command", std::string(to_string(config.command))},
                   {"generated", std::string(timestamp)},
                   {"config", json::parse(config_to_json(config))}};
    return "{\"header\": " + header.dump() + ",\n\"body\": " + body + "}\n";
  }
  std::string out;
  out += "# shotnoise " SHOTNOISE_VERSION "\r\n";
  out += "# command: " + std::string(to_string(config.command)) + "\r\n";
  out += "# generated: " + std::string(timestamp) + "\r\n";
  out += "# config: " + config_to_json(config) + "\r\n";
  return out + body;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shot-noise option and bond pricing", "shotnoise"};
  app.set_version_flag("--version", SHOTNOISE_VERSION);
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> paths;
  std::optional<std::string> backend;
  std::optional<std::string> out_path;
  std::optional<std::string> format;
  std::optional<double> tol;
  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--seed", seed, "Monte Carlo seed");
  app.add_option("--paths", paths, "Monte Carlo path count");
  app.add_option("--backend", backend, "series | fourier")
      ->check(CLI::IsMember({"series", "fourier"}));
  app.add_option("--out", out_path, "output file ('-' for stdout)");
  app.add_option("--format", format, "csv | json")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--tol", tol, "relative tolerance of the transforms");

  for (const Command c : kCommands) {
    app.add_subcommand(std::string(to_string(c)))->fallthrough();
  }
  app.get_subcommand("price")->description("option prices over the contract grid");
  app.get_subcommand("greeks")->description("common and jump Greeks over the contract grid");
  app.get_subcommand("bond")->description("affine bond prices with A and B factors");
  app.get_subcommand("curve")->description("bond prices and zero yields across maturities");
  app.get_subcommand("mc")->description("Monte Carlo estimates beside the analytic values");
  app.get_subcommand("validate")->description("residual and identity checks with contracts");
  app.get_subcommand("limits")->description("diffusion-limit convergence study");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Command command = parse_command(app.get_subcommands().front()->get_name());
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream f(config_path, std::ios::binary);
      if (!f) throw ConfigError("cannot read config file '" + config_path + "'");
      std::ostringstream ss;
      ss << f.rdbuf();
      text = ss.str();
    }
    RunConfig config = parse_config(text, command);
    if (seed) config.sim.seed = *seed;
    if (paths) config.sim.paths = *paths;
    if (backend) config.backend = parse_backend(*backend);
    if (out_path) config.out = *out_path;
    if (format) config.format = *format == "json" ? Format::json : Format::csv;
    if (tol) config.quad.rel_tol = *tol;

    const Report report = execute(config);
    write_output(config.out, render(report, config, iso_timestamp()), out);
    if (!report.failures.empty()) {
      for (const auto& f : report.failures) err << "contract failure: " << f << '\n';
      return 1;
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace shotnoise::cli
