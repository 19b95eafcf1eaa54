#pragma once

#include <complex>

namespace shotnoise {

/// Normal law of jump magnitudes, N(nu, delta^2). Used for log-price jumps of the
/// asset and for additive jumps of the short rate. delta = 0 is a point mass at nu.
struct GaussianJumpLaw {
  double nu = 0.0;
  double delta = 0.0;

  /// Throws DomainError when delta is negative or a field is not finite.
  void validate() const;
};

/// Jump arrivals per unit time.
struct ArrivalRate {
  double lambda = 0.0;

  void validate() const;
};

/// Mean and correlation structure of the shot-noise force F(t):
///   <F> = mean,  <F(t1) F(t2)> = spike_weight * delta(t1 - t2) + mean_product.
struct ForceStatistics {
  double mean = 0.0;
  double spike_weight = 0.0;
  double mean_product = 0.0;
};

struct DiffusionMoments {
  double drift = 0.0;     ///< lambda * E[eta]
  double sigma_sq = 0.0;  ///< lambda * E[eta^2]
};

/// Jump compensator E[e^eta] - 1 = exp(nu + delta^2 / 2) - 1.
double varsigma(const GaussianJumpLaw& law);

/// d varsigma / d nu = varsigma + 1.
double varsigma_dnu(const GaussianJumpLaw& law);

/// d varsigma / d delta = delta (varsigma + 1).
double varsigma_ddelta(const GaussianJumpLaw& law);

/// Characteristic exponent per unit intensity, E[e^{i k eta}] - 1, for complex k.
/// xi(0) = 0 and xi(-i) = varsigma.
std::complex<double> xi(const GaussianJumpLaw& law, std::complex<double> k);

/// E[e^{i k eta}] itself, i.e. xi(k) + 1 without the cancellation.
std::complex<double> jump_char(const GaussianJumpLaw& law, std::complex<double> k);

/// First and second raw moments of the law.
double first_moment(const GaussianJumpLaw& law);
double second_moment(const GaussianJumpLaw& law);

DiffusionMoments diffusion_moments(const ArrivalRate& rate, const GaussianJumpLaw& law);

ForceStatistics force_statistics(const ArrivalRate& rate, const GaussianJumpLaw& law);

}  // namespace shotnoise
