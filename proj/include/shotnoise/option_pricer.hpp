#pragma once

#include <string_view>

#include "shotnoise/jump_measure.hpp"
#include "shotnoise/transform_engine.hpp"

namespace shotnoise {

enum class OptionKind { call, put };

std::string_view to_string(OptionKind kind);
OptionKind parse_option_kind(std::string_view name);

struct OptionTerms {
  double spot = 100.0;
  double strike = 100.0;
  double tau = 1.0;  ///< T - t in years
  double rate = 0.0;
  double dividend = 0.0;
  OptionKind kind = OptionKind::call;

  void validate() const;
};

/// Log-price driven by shot-noise jumps with Gaussian magnitudes plus an optional
/// Brownian component. sigma = 0 is the pure shot-noise model.
struct AssetModel {
  double lambda = 0.0;
  GaussianJumpLaw law{};
  double sigma = 0.0;

  void validate() const;
  CharSpec char_spec(double tau) const { return {tau, lambda, sigma, law}; }
};

struct PriceResult {
  double value = 0.0;
  double l_used = 0.0;
  Backend backend = Backend::series;
  double est_error = 0.0;
};

double log_moneyness(const OptionTerms& terms);

/// l = ln(S/K) + (r - q - sigma^2/2 - lambda varsigma) tau. Throws DegenerateMaturityError
/// for tau = 0.
double l_parameter(const OptionTerms& terms, const AssetModel& model);

double payoff(const OptionTerms& terms);

/// European value under the jump (+ diffusion) model. tau = 0 returns the payoff.
/// A model with neither jumps nor diffusion is the deterministic forward and is always
/// evaluated through the series backend.
PriceResult price(const OptionTerms& terms, const AssetModel& model,
                  Backend backend = Backend::series, const QuadratureSpec& quad = {});

/// Pure shot-noise value (no Brownian part) from its own l and sigma-free transforms.
PriceResult shot_noise_price(const OptionTerms& terms, const ArrivalRate& rate,
                             const GaussianJumpLaw& law, Backend backend = Backend::series,
                             const QuadratureSpec& quad = {});

/// Closed-form Black-Scholes value with continuous dividend yield.
PriceResult bs_price(const OptionTerms& terms, double sigma);

/// C - P - (S e^{-q tau} - K e^{-r tau}) for the contract's (S, K, tau, r, q).
double parity_residual(const OptionTerms& terms, const AssetModel& model,
                       Backend backend = Backend::series, const QuadratureSpec& quad = {});

}  // namespace shotnoise
