#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "shotnoise/numerics.hpp"
#include "shotnoise/option_pricer.hpp"

namespace shotnoise {

/// First-order Greeks plus gamma. theta is dV/dt = -dV/dtau.
struct GreekSet {
  double delta = 0.0;
  double gamma = 0.0;
  double rho = 0.0;
  double psi = 0.0;  ///< dV/dq
  double theta = 0.0;
  std::optional<double> vega;  ///< absent for the pure shot-noise model
  /// Size of the jump in delta across l = 0 when sigma = 0 (zero otherwise). gamma
  /// excludes this point mass.
  double delta_jump = 0.0;
};

/// Sensitivities to the jump parameters: kappa = dV/dlambda, mu = dV/dnu,
/// epsilon = dV/ddelta. Identical for calls and puts.
struct NewGreekSet {
  double kappa = 0.0;
  double mu = 0.0;
  double epsilon = 0.0;
  /// True when sigma > 0: the values are exact derivatives of the generalized price but
  /// the pure shot-noise identities no longer apply to them.
  bool extension = false;
};

/// Throws KinkError when sigma = 0 and l sits on a point mass of the transition law.
GreekSet common_greeks(const OptionTerms& terms, const AssetModel& model,
                       Backend backend = Backend::series, const QuadratureSpec& quad = {});

NewGreekSet new_greeks(const OptionTerms& terms, const AssetModel& model,
                       Backend backend = Backend::series, const QuadratureSpec& quad = {});

GreekSet bs_greeks(const OptionTerms& terms, double sigma);

/// Central difference with one Richardson step; see numerics::central_difference.
numerics::Derivative fd_sensitivity(const std::function<double(double)>& f, double at, double step);

struct IdentityResidual {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;  ///< |lhs - rhs| / max(|lhs|, |rhs|, floor)
};

/// Evaluates the theta-kappa relations and the kappa/mu/epsilon identities of the pure
/// shot-noise model. Parameter derivatives of delta and rho come from fd_sensitivity with
/// step 1e-4 max(1, |param|). Requires lambda > 0 and sigma = 0.
std::vector<IdentityResidual> identity_report(const OptionTerms& terms, const AssetModel& model,
                                              Backend backend = Backend::series,
                                              const QuadratureSpec& quad = {});

}  // namespace shotnoise
