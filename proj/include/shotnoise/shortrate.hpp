#pragma once

#include <string_view>

#include "shotnoise/jump_measure.hpp"
#include "shotnoise/transform_engine.hpp"

namespace shotnoise {

/// dr = a(b - r) dt + sigma_r dW + dJ, with J compound Poisson (lambda_r, Gaussian law).
/// The pure shot-noise model uses only a and the jump part; Vasicek uses only a, b, sigma_r.
struct RateModel {
  double a = 0.5;
  double b = 0.0;
  double sigma_r = 0.0;
  double lambda_r = 0.0;
  GaussianJumpLaw law{};

  void validate() const;
};

struct BondTerms {
  double t = 0.0;
  double T = 1.0;
  double r_t = 0.0;

  void validate() const;
  double tenor() const noexcept { return T - t; }
};

/// Which parts of RateModel drive the bond price.
enum class RateVariant { shot, vasicek, general };

std::string_view to_string(RateVariant variant);
RateVariant parse_rate_variant(std::string_view name);

/// B(t,T) = (1 - e^{-a(T-t)}) / a.
double b_factor(const RateModel& model, double t, double T);

/// lambda_r int_t^T [exp(-nu B(s,T) + delta^2 B(s,T)^2 / 2) - 1] ds by adaptive
/// Gauss-Legendre. Throws ConvergenceError when the tolerance is not met.
double a_shot(const RateModel& model, double t, double T, const QuadratureSpec& quad = {});

/// The same quantity after substituting y = B(s,T):
/// lambda_r int_0^{B(t,T)} [exp(-nu y + delta^2 y^2 / 2) - 1] / (1 - a y) dy.
double a_shot_substituted(const RateModel& model, double t, double T,
                          const QuadratureSpec& quad = {});

/// (b - sigma_r^2 / 2a^2)(B - (T - t)) - sigma_r^2 B^2 / 4a.
double a_vasicek(const RateModel& model, double t, double T);

double a_general(const RateModel& model, double t, double T, const QuadratureSpec& quad = {});

double a_variant(const RateModel& model, double t, double T, RateVariant variant,
                 const QuadratureSpec& quad = {});

/// exp{A(t,T) - B(t,T) r_t}.
double bond_price(const RateModel& model, const BondTerms& terms,
                  RateVariant variant = RateVariant::general, const QuadratureSpec& quad = {});

/// Vasicek model whose drift and instantaneous variance match the jump part's first two
/// moments: b = b + lambda_r nu / a, sigma_r^2 = sigma_r^2 + lambda_r (nu^2 + delta^2).
RateModel diffusion_limit(const RateModel& model);

struct RateMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Mean and variance of r(t + h) given r(t), from the mean-reverting jump dynamics.
/// variant = shot ignores b and sigma_r; vasicek ignores the jumps.
RateMoments conditional_moments(const RateModel& model, double r_t, double horizon,
                                RateVariant variant = RateVariant::general);

/// Textbook Vasicek conditional moments for (a, b, sigma).
RateMoments vasicek_moments(double a, double b, double sigma, double r_t, double horizon);

struct OdeResidual {
  double res_a = 0.0;
  double res_b = 0.0;
};

/// Max residuals of dB/dt - aB + 1 = 0 and
/// dA/dt - a b B + sigma_r^2 B^2 / 2 + lambda_r E[e^{-eta B} - 1] = 0 over interior times of
/// (t, T), with time derivatives from central differences of step `step`.
OdeResidual ode_residual(const RateModel& model, double t, double T, RateVariant variant,
                         const QuadratureSpec& quad = {}, double step = 1e-4);

/// -ln(price) / tenor.
double zero_yield(double price, double tenor);

}  // namespace shotnoise
