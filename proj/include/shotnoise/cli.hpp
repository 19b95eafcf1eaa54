#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "shotnoise/error.hpp"
#include "shotnoise/montecarlo.hpp"
#include "shotnoise/option_pricer.hpp"
#include "shotnoise/shortrate.hpp"
#include "shotnoise/validation.hpp"

namespace shotnoise::cli {

enum class Command { price, greeks, bond, curve, mc, validate, limits };
enum class Format { csv, json };

std::string_view to_string(Command command);
Command parse_command(std::string_view name);

/// Raised for malformed or incomplete configuration; maps to exit status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ContractGrid {
  std::vector<double> spots{100.0};
  std::vector<double> strikes{90.0, 100.0, 110.0};
  std::vector<double> maturities{1.0};
  double rate = 0.02;
  double dividend = 0.0;
  std::vector<OptionKind> kinds{OptionKind::call, OptionKind::put};
};

struct BondSetup {
  double t = 0.0;
  std::vector<double> maturities{1.0, 2.0, 5.0, 10.0};
  double r0 = 0.03;
  std::vector<RateVariant> variants{RateVariant::shot, RateVariant::vasicek, RateVariant::general};
};

/// Contract thresholds used by `validate` and `limits`.
struct Tolerances {
  double parity = 1e-8;  ///< relative to max(S, K)
  double backend = 1e-7;
  double option_pide = 1e-4;
  double bond_pide = 1e-4;
  double ode_b = 1e-6;
  double ode_a_closed = 1e-6;
  double ode_a_quadrature = 1e-4;
  double identity = 1e-4;
  double limit_price = 1e-2;
  double limit_theta = 1e-2;
  double limit_bond = 5e-3;
};

struct RunConfig {
  Command command = Command::price;
  AssetModel asset{1.0, {-0.05, 0.15}, 0.0};
  RateModel rate{0.5, 0.03, 0.01, 2.0, {0.01, 0.02}};
  ContractGrid contracts{};
  BondSetup bonds{};
  SimConfig sim{};
  QuadratureSpec quad{};
  Backend backend = Backend::series;
  Tolerances tolerances{};
  ScalingStudy limits{};
  std::string out = "-";
  Format format = Format::csv;
};

/// Reads a JSON configuration over the defaults. Unknown keys, wrong types and invalid
/// values raise ConfigError.
RunConfig parse_config(std::string_view json_text, Command command);

/// The fully resolved configuration as compact JSON with sorted keys.
std::string config_to_json(const RunConfig& config);

using Cell = std::variant<double, long long, std::string>;

struct Report {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::vector<std::string> failures;  ///< non-empty means a numerical contract failed
};

Report execute(const RunConfig& config);

/// Body only (no header), in the requested format. Deterministic for a given report.
std::string render_body(const Report& report, Format format);

/// Header (version, command, timestamp, resolved config) followed by the body.
std::string render(const Report& report, const RunConfig& config, std::string_view timestamp);

/// Formats a double with 17 significant digits.
std::string format_number(double value);

/// Full command line entry point. Returns 0 on success, 1 on a numerical contract failure,
/// 2 on a configuration or usage error.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace shotnoise::cli
