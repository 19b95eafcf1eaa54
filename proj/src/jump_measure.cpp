#include "shotnoise/jump_measure.hpp"

#include <cmath>

#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

void GaussianJumpLaw::validate() const {
  if (!std::isfinite(nu) || !std::isfinite(delta)) {
    throw DomainError("GaussianJumpLaw: parameters must be finite");
  }
  if (delta < 0.0) throw DomainError("GaussianJumpLaw: delta must be >= 0");
}

void ArrivalRate::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) {
    throw DomainError("ArrivalRate: lambda must be finite and >= 0");
  }
}

double varsigma(const GaussianJumpLaw& law) {
  return std::expm1(law.nu + 0.5 * law.delta * law.delta);
}

double varsigma_dnu(const GaussianJumpLaw& law) {
  return std::exp(law.nu + 0.5 * law.delta * law.delta);
}

double varsigma_ddelta(const GaussianJumpLaw& law) {
  return law.delta * std::exp(law.nu + 0.5 * law.delta * law.delta);
}

std::complex<double> jump_char(const GaussianJumpLaw& law, std::complex<double> k) {
  const std::complex<double> i{0.0, 1.0};
  return std::exp(i * k * law.nu - 0.5 * k * k * law.delta * law.delta);
}

std::complex<double> xi(const GaussianJumpLaw& law, std::complex<double> k) {
  const std::complex<double> i{0.0, 1.0};
  return numerics::expm1(i * k * law.nu - 0.5 * k * k * law.delta * law.delta);
}

double first_moment(const GaussianJumpLaw& law) { return law.nu; }

double second_moment(const GaussianJumpLaw& law) {
  return law.nu * law.nu + law.delta * law.delta;
}

DiffusionMoments diffusion_moments(const ArrivalRate& rate, const GaussianJumpLaw& law) {
  rate.validate();
  law.validate();
  return {rate.lambda * first_moment(law), rate.lambda * second_moment(law)};
}

ForceStatistics force_statistics(const ArrivalRate& rate, const GaussianJumpLaw& law) {
  rate.validate();
  law.validate();
  const double mean = rate.lambda * first_moment(law);
  return {mean, rate.lambda * second_moment(law), mean * mean};
}

}  // namespace shotnoise
