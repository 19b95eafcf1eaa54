#pragma once

#include <string>
#include <vector>

#include "shotnoise/option_pricer.hpp"
#include "shotnoise/shortrate.hpp"

namespace shotnoise {

struct ResidualReport {
  double max_residual = 0.0;
  int grid_points = 0;
  double dt = 0.0;
  double dx_or_dr = 0.0;
  int quad_nodes = 0;
  std::vector<std::string> rejected;  ///< points skipped because they touch a kink
};

/// Finite-difference steps and jump-integral resolution for the residual checks.
struct PideSettings {
  double dt = 1e-4;
  double dx = 1e-4;
  int hermite_nodes = 64;
};

struct OptionGridPoint {
  double spot = 100.0;
  double tau = 1.0;
};

/// Residual of the option pricing equation in log-price form,
///   -C_tau + (r - q - sigma^2/2) C_x + sigma^2/2 C_xx
///     + lambda E[C(x + eta) - C(x) - (e^eta - 1) C_x] - r C,
/// normalized by max(|r C|, 1e-3), maximized over the grid. `terms` supplies K, r, q and the
/// kind; spot and tau come from the grid. With sigma = 0, points with |l| < 0.05 or
/// tau < 0.05 are rejected.
ResidualReport option_pide_residual(const OptionTerms& terms,
                                    const std::vector<OptionGridPoint>& grid,
                                    const AssetModel& model, const QuadratureSpec& quad = {},
                                    const PideSettings& settings = {});

struct BondGridPoint {
  double t = 0.0;
  double r = 0.0;
};

/// Residual of the term-structure equation
///   P_t + a(b - r) P_r + sigma_r^2/2 P_rr + lambda_r E[P(r + eta) - P] - r P,
/// normalized by max(|r P|, 1e-3); b and sigma_r are dropped for the shot variant and the
/// jump term for the Vasicek variant.
ResidualReport bond_pide_residual(const RateModel& model, RateVariant variant, double maturity,
                                  const std::vector<BondGridPoint>& grid,
                                  const QuadratureSpec& quad = {},
                                  const PideSettings& settings = {});

/// Parameters of the diffusion-limit study: at scale n the intensity is n lambda0 and the
/// jump law has mean m / (n lambda0) and variance s2 / (n lambda0).
struct ScalingStudy {
  OptionTerms terms{};
  double lambda0 = 1.0;
  double m = 0.05;
  double s2 = 0.04;
  RateModel rate{0.5, 0.0, 0.0, 1.0, {}};  ///< a, and lambda_r as the base rate intensity
  double rate_m = 0.01;
  double rate_s2 = 1e-4;
  double t = 0.0;
  double T = 5.0;
  std::vector<int> scales{1, 10, 100, 1000};
};

struct ConvergenceRow {
  int scale = 0;
  double price_error = 0.0;  ///< relative, against Black-Scholes at vol^2 = lambda E[eta^2]
  double theta_error = 0.0;  ///< relative
  double bond_error = 0.0;   ///< relative error of A(t,T) against the Vasicek form
};

std::vector<ConvergenceRow> diffusion_convergence(const ScalingStudy& study,
                                                  const QuadratureSpec& quad = {});

/// True when each error column is nonincreasing in the scale.
bool is_monotone(const std::vector<ConvergenceRow>& rows);

struct BackendGrid {
  double tau = 1.0;
  std::vector<double> lambda_tau{0.25, 1.0, 4.0};
  std::vector<double> nu{-0.1, 0.0, 0.1};
  std::vector<double> delta{0.05, 0.2, 0.4};
  std::vector<double> sigma{0.0, 0.1, 0.2};
  std::vector<double> l{-1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0};
};

/// Max |series - fourier| over the plain and tilted transforms and both complements.
/// Points with sigma = 0 and l = 0 sit on the point mass and are rejected.
ResidualReport backend_agreement(const BackendGrid& grid = {}, const QuadratureSpec& quad = {});

}  // namespace shotnoise
