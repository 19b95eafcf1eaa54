#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include "shotnoise/jump_measure.hpp"

namespace shotnoise {

/// Evaluation strategy for the cumulative transforms.
///  - series: condition on the Poisson jump count; each term is a Gaussian CDF.
///  - fourier: Gil-Pelaez inversion of the characteristic function, with the
///    zero-jump point mass split off analytically when there is no diffusion.
enum class Backend { series, fourier };

std::string_view to_string(Backend backend);
/// Parses "series" / "fourier"; throws DomainError otherwise.
Backend parse_backend(std::string_view name);

/// Law of the log-price displacement over a horizon tau: Brownian part with
/// volatility sigma plus compound Poisson jumps with intensity lambda.
struct CharSpec {
  double tau = 1.0;
  double lambda = 0.0;
  double sigma = 0.0;
  GaussianJumpLaw law{};

  void validate() const;
  /// True when the displacement has a point mass at zero (no diffusion).
  bool has_atom() const noexcept { return sigma == 0.0; }
};

struct QuadratureSpec {
  double rel_tol = 1e-10;
  double k_max = 0.0;  ///< Frequency cutoff for the Fourier backend; 0 selects it from the decay envelope.
  int k_nodes = 32;    ///< Gauss-Legendre nodes per frequency panel.
  int n_max = 20000;   ///< Largest Poisson index the series may use.

  void validate() const;
};

/// psi(k) = exp{[-sigma^2 k^2 / 2 + lambda xi(k)] tau}; undiscounted.
std::complex<double> char_function(const CharSpec& spec, std::complex<double> k);

/// Poisson probabilities P_0..P_N for the given mean, with N the first index whose
/// upper tail is below rel_tol / 10. Throws TruncationError when N would exceed n_max.
std::vector<double> poisson_weights(double mean_count, const QuadratureSpec& quad);

/// Lower and upper cumulative integrals at one point. lower + upper = 1 up to the
/// reported error; both are computed directly, neither as one minus the other.
struct CdfValue {
  double lower = 0.0;
  double upper = 0.0;
  double error = 0.0;
};

/// Plain cumulative transform (1/2pi) int_{-inf}^{l} dz int dk e^{ikz} psi(k), together with
/// its complement over [l, inf).
CdfValue eval_plain(const CharSpec& spec, double l, Backend backend, const QuadratureSpec& quad);

/// Exponentially tilted cumulative transform
/// e^{-(sigma^2/2 + lambda varsigma) tau} (1/2pi) int_{-inf}^{l} dz e^{-z} int dk e^{ikz} psi(k),
/// together with its complement.
CdfValue eval_tilted(const CharSpec& spec, double l, Backend backend, const QuadratureSpec& quad);

inline double cdf_plain(const CharSpec& spec, double l, Backend backend,
                        const QuadratureSpec& quad) {
  return eval_plain(spec, l, backend, quad).lower;
}
inline double cdf_tilted(const CharSpec& spec, double l, Backend backend,
                         const QuadratureSpec& quad) {
  return eval_tilted(spec, l, backend, quad).lower;
}
inline double ccdf_plain(const CharSpec& spec, double l, Backend backend,
                         const QuadratureSpec& quad) {
  return eval_plain(spec, l, backend, quad).upper;
}
inline double ccdf_tilted(const CharSpec& spec, double l, Backend backend,
                          const QuadratureSpec& quad) {
  return eval_tilted(spec, l, backend, quad).upper;
}

/// Analytic sensitivities of one cumulative transform at fixed l, from the series
/// backend differentiated term by term. Point-mass terms contribute to `value`,
/// `complement` and `d_lambda`/`d_tau` through their weights only.
struct SeriesSensitivities {
  double value = 0.0;
  double complement = 0.0;
  double d_l = 0.0;       ///< density at l (continuous part)
  double d_lambda = 0.0;
  double d_nu = 0.0;
  double d_delta = 0.0;
  double d_sigma = 0.0;
  double d_tau = 0.0;     ///< at fixed l and fixed lambda, sigma, law
  double d_l_mass = 0.0;  ///< d(density)/d(lambda tau) at fixed l
  double atom_weight = 0.0;
  double tail_mass = 0.0;
};

SeriesSensitivities plain_sensitivities(const CharSpec& spec, double l, const QuadratureSpec& quad);
SeriesSensitivities tilted_sensitivities(const CharSpec& spec, double l,
                                         const QuadratureSpec& quad);

/// How the first argument of green_density is to be read.
enum class GreenArgument {
  shifted,  ///< u = x - x' + (r - q - lambda varsigma - sigma^2/2) tau
  raw,      ///< u = x - x'; the drift is applied internally
};

/// Discounted transition kernel G(u) of the option pricing equation (continuous part).
/// When sigma = 0 the kernel also carries a point mass, see green_atom; the two together
/// integrate to e^{-r tau}.
double green_density(const CharSpec& spec, double u, double rate, const QuadratureSpec& quad,
                     GreenArgument arg = GreenArgument::shifted, double dividend = 0.0);

/// Weight of the kernel's point mass at u = 0 (shifted coordinates); zero when sigma > 0.
double green_atom(const CharSpec& spec, double rate);

/// Standard deviation of the kernel's displacement; shrinks like sqrt(tau).
double green_spread(const CharSpec& spec);

}  // namespace shotnoise
