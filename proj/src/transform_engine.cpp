#include "shotnoise/transform_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

using numerics::complex;

std::string_view to_string(Backend backend) {
  return backend == Backend::series ? "series" : "fourier";
}

Backend parse_backend(std::string_view name) {
  if (name == "series") return Backend::series;
  if (name == "fourier") return Backend::fourier;
  throw DomainError("unknown backend '" + std::string(name) + "' (expected series|fourier)");
}

void CharSpec::validate() const {
  if (!std::isfinite(tau) || tau <= 0.0) throw DomainError("CharSpec: tau must be > 0");
  if (!std::isfinite(lambda) || lambda < 0.0) throw DomainError("CharSpec: lambda must be >= 0");
  if (!std::isfinite(sigma) || sigma < 0.0) throw DomainError("CharSpec: sigma must be >= 0");
  law.validate();
}

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) {
    throw DomainError("QuadratureSpec: rel_tol must lie in (0, 1e-2]");
  }
  if (!std::isfinite(k_max) || k_max < 0.0) throw DomainError("QuadratureSpec: k_max must be >= 0");
  if (k_nodes < 16) throw DomainError("QuadratureSpec: k_nodes must be >= 16");
  if (n_max < 1) throw DomainError("QuadratureSpec: n_max must be >= 1");
}

complex char_function(const CharSpec& spec, complex k) {
  return std::exp((-0.5 * spec.sigma * spec.sigma * k * k + spec.lambda * xi(spec.law, k)) *
                  spec.tau);
}

std::vector<double> poisson_weights(double mean_count, const QuadratureSpec& quad) {
  if (!std::isfinite(mean_count) || mean_count < 0.0) {
    throw DomainError("poisson_weights: mean count must be finite and >= 0");
  }
  if (mean_count == 0.0) return {1.0};
  const double target = quad.rel_tol / 10.0;
  const auto n_max = static_cast<std::size_t>(quad.n_max);

  // Start at the mode so that neither recursion direction underflows prematurely.
  const auto mode = static_cast<std::size_t>(std::floor(mean_count));
  if (mode > n_max) {
    throw TruncationError("poisson_weights: mode of the Poisson law exceeds n_max", 1.0);
  }
  const double log_mode = -mean_count + static_cast<double>(mode) * std::log(mean_count) -
                          std::lgamma(static_cast<double>(mode) + 1.0);
  std::vector<double> w(mode + 1);
  w[mode] = std::exp(log_mode);
  for (std::size_t n = mode; n > 0; --n) {
    w[n - 1] = w[n] * static_cast<double>(n) / mean_count;
  }
  // Extend upward until the geometric bound on the remaining tail is small enough.
  for (std::size_t n = mode;; ++n) {
    const double next = w[n] * mean_count / static_cast<double>(n + 1);
    const double ratio = mean_count / static_cast<double>(n + 2);
    const double tail = ratio < 1.0 ? next / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    if (tail < target) break;
    if (n + 1 > n_max) {
      throw TruncationError("poisson_weights: tail mass above tolerance at n_max", tail);
    }
    w.push_back(next);
  }
  return w;
}

namespace {

// Mixture of Gaussian components indexed by the jump count n: weight Poisson(mass)_n,
// mean c_n = -n * shift - base_shift, variance n * delta^2 + sigma^2 tau.
struct Mixture {
  double mass = 0.0;
  double shift = 0.0;
  double base_shift = 0.0;
  double jump_var = 0.0;
  double diff_var = 0.0;
};

Mixture plain_mixture(const CharSpec& s) {
  return {s.lambda * s.tau, s.law.nu, 0.0, s.law.delta * s.law.delta,
          s.sigma * s.sigma * s.tau};
}

Mixture tilted_mixture(const CharSpec& s) {
  const double d2 = s.law.delta * s.law.delta;
  const double v = s.sigma * s.sigma * s.tau;
  return {s.lambda * s.tau * (1.0 + varsigma(s.law)), s.law.nu + d2, v, d2, v};
}

// Raw sensitivities of the mixture CDF at fixed l with respect to its own ingredients.
struct MixtureSums {
  numerics::CompensatedSum value, complement, density, d_mass, d_mass_density;
  numerics::CompensatedSum d_shift;     // sum w_n phi(d_n)/s_n * n  (d/d shift)
  numerics::CompensatedSum d_base;      // sum w_n phi(d_n)/s_n      (d/d base_shift)
  numerics::CompensatedSum d_jump_var;  // sum w_n phi(d_n) * (-d_n / 2 s_n^2) * n
  numerics::CompensatedSum d_diff_var;  // sum w_n phi(d_n) * (-d_n / 2 s_n^2)
  double atom_weight = 0.0;
  double tail = 0.0;
};

MixtureSums sum_mixture(const Mixture& m, double l, const QuadratureSpec& quad) {
  const std::vector<double> w = poisson_weights(m.mass, quad);
  MixtureSums out;
  double covered = 0.0;
  // The mass derivative pairs w_{n-1} - w_n, so one extra index is visited.
  const std::size_t last = w.size();
  for (std::size_t n = 0; n <= last; ++n) {
    const double wn = n < w.size() ? w[n] : 0.0;
    const double wprev = n == 0 ? 0.0 : w[n - 1];
    const double dw = wprev - wn;
    if (wn == 0.0 && dw == 0.0) continue;
    const double nn = static_cast<double>(n);
    const double c = -nn * m.shift - m.base_shift;
    const double var = nn * m.jump_var + m.diff_var;
    if (var == 0.0) {
      const double step = l >= c ? 1.0 : 0.0;
      out.value += wn * step;
      out.complement += wn * (1.0 - step);
      out.d_mass += dw * step;
      if (n == 0) out.atom_weight = wn;
    } else {
      const double sd = std::sqrt(var);
      const double d = (l - c) / sd;
      const double pdf = numerics::normal_pdf(d);
      out.value += wn * numerics::normal_cdf(d);
      out.complement += wn * numerics::normal_cdf(-d);
      out.d_mass += dw * numerics::normal_cdf(d);
      out.density += wn * pdf / sd;
      out.d_mass_density += dw * pdf / sd;
      out.d_shift += wn * pdf / sd * nn;
      out.d_base += wn * pdf / sd;
      const double dvar = -d / (2.0 * var);
      out.d_jump_var += wn * pdf * dvar * nn;
      out.d_diff_var += wn * pdf * dvar;
    }
    covered += wn;
  }
  out.tail = std::max(0.0, 1.0 - covered);
  return out;
}

SeriesSensitivities assemble(const CharSpec& s, const MixtureSums& ms, bool tilted) {
  SeriesSensitivities r;
  r.value = ms.value.value();
  r.complement = ms.complement.value();
  r.d_l = ms.density.value();
  r.d_l_mass = ms.d_mass_density.value();
  r.atom_weight = ms.atom_weight;
  r.tail_mass = ms.tail;

  const double d_mass = ms.d_mass.value();
  const double d_shift = ms.d_shift.value();
  const double d_base = ms.d_base.value();
  const double d_jv = ms.d_jump_var.value();
  const double d_dv = ms.d_diff_var.value();
  const double delta = s.law.delta;
  const double sigma = s.sigma;
  const double tau = s.tau;

  if (!tilted) {
    // mass = lambda tau; shift = nu; jump_var = delta^2; diff_var = sigma^2 tau.
    r.d_lambda = tau * d_mass;
    r.d_nu = d_shift;
    r.d_delta = 2.0 * delta * d_jv;
    r.d_sigma = 2.0 * sigma * tau * d_dv;
    r.d_tau = s.lambda * d_mass + sigma * sigma * d_dv;
  } else {
    // mass = lambda tau (1 + varsigma); shift = nu + delta^2; base = sigma^2 tau;
    // jump_var = delta^2; diff_var = sigma^2 tau.
    const double g = 1.0 + varsigma(s.law);
    r.d_lambda = tau * g * d_mass;
    r.d_nu = s.lambda * tau * g * d_mass + d_shift;
    r.d_delta = s.lambda * tau * delta * g * d_mass + 2.0 * delta * d_shift + 2.0 * delta * d_jv;
    r.d_sigma = 2.0 * sigma * tau * (d_base + d_dv);
    r.d_tau = s.lambda * g * d_mass + sigma * sigma * (d_base + d_dv);
  }
  return r;
}

// Gil-Pelaez inversion for the continuous remainder of the law. The remainder R(k) is the
// Fourier transform of the law minus its point mass at zero (weight `atom`).
struct FourierProblem {
  CharSpec spec;
  bool tilted = false;
  double atom = 0.0;
  double mass = 0.0;  // Poisson mean of the jump count under this measure
  double oscillation = 0.0;
};

FourierProblem make_problem(const CharSpec& s, bool tilted) {
  FourierProblem p{s, tilted, 0.0, 0.0, 0.0};
  const double g = tilted ? 1.0 + varsigma(s.law) : 1.0;
  p.mass = s.lambda * s.tau * g;
  if (s.sigma == 0.0) p.atom = std::exp(-p.mass);
  const double shift = std::abs(s.law.nu + (tilted ? s.law.delta * s.law.delta : 0.0));
  p.oscillation = shift * (p.mass + 6.0 * std::sqrt(p.mass) + 6.0) +
                  s.sigma * s.sigma * s.tau * (tilted ? 1.0 : 0.0);
  return p;
}

complex remainder(const FourierProblem& p, double k) {
  const CharSpec& s = p.spec;
  const complex kk = p.tilted ? complex{k, -1.0} : complex{k, 0.0};
  if (s.sigma == 0.0) {
    return p.atom * numerics::expm1(s.lambda * s.tau * jump_char(s.law, kk));
  }
  complex expo = (-0.5 * s.sigma * s.sigma * kk * kk + s.lambda * xi(s.law, kk)) * s.tau;
  if (p.tilted) expo -= (0.5 * s.sigma * s.sigma + s.lambda * varsigma(s.law)) * s.tau;
  return std::exp(expo);
}

// Upper bound on |R(k)| for real k.
double envelope(const FourierProblem& p, double k) {
  const CharSpec& s = p.spec;
  const double x = 0.5 * k * k * s.law.delta * s.law.delta;
  return std::exp(-0.5 * s.sigma * s.sigma * k * k * s.tau + p.mass * std::expm1(-x)) - p.atom;
}

double cutoff(const FourierProblem& p, const QuadratureSpec& quad) {
  if (quad.k_max > 0.0) return quad.k_max;
  const double target = quad.rel_tol * 1e-3;
  double hi = 1.0;
  while (envelope(p, hi) > target) {
    hi *= 2.0;
    if (hi > 1e8) throw ConvergenceError("fourier: characteristic function does not decay", 1.0);
  }
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (envelope(p, mid) > target ? lo : hi) = mid;
  }
  return hi;
}

CdfValue fourier_eval(const CharSpec& s, double l, bool tilted, const QuadratureSpec& quad) {
  const FourierProblem p = make_problem(s, tilted);
  if (s.sigma == 0.0 && (s.law.delta == 0.0 || s.lambda == 0.0)) {
    throw ConvergenceError(
        "fourier: law has no continuous part to invert (sigma = 0 and delta = 0 or lambda = 0); "
        "use the series backend",
        1.0);
  }
  const double k_max = cutoff(p, quad);
  const double rate = std::abs(l) + p.oscillation + 1.0;
  const auto panels0 =
      static_cast<std::size_t>(std::max(8.0, std::ceil(k_max * rate / std::numbers::pi)));
  const auto integrand = [&](double k) {
    if (k == 0.0) return 0.0;
    const complex v = std::exp(complex{0.0, k * l}) * remainder(p, k);
    return v.imag() / k;
  };
  const double continuous = 1.0 - p.atom;
  const std::size_t order = static_cast<std::size_t>(quad.k_nodes);
  std::size_t panels = panels0;
  double prev = numerics::integrate_panels(integrand, 0.0, k_max, panels, order);
  double err = std::numeric_limits<double>::infinity();
  double integral = prev;
  for (int retry = 0; retry <= 4; ++retry) {
    panels *= 2;
    integral = numerics::integrate_panels(integrand, 0.0, k_max, panels, order);
    err = std::abs(integral - prev) / std::numbers::pi;
    if (err <= quad.rel_tol) break;
    prev = integral;
  }
  if (!(err <= quad.rel_tol)) {
    throw ConvergenceError("fourier: panel refinement did not reach rel_tol", err);
  }
  const double scaled = integral / std::numbers::pi;
  CdfValue out;
  out.lower = 0.5 * continuous + scaled + (l >= 0.0 ? p.atom : 0.0);
  out.upper = 0.5 * continuous - scaled + (l < 0.0 ? p.atom : 0.0);
  out.error = err + quad.rel_tol * 1e-3;
  return out;
}

CdfValue series_eval(const CharSpec& s, double l, bool tilted, const QuadratureSpec& quad) {
  const MixtureSums ms = sum_mixture(tilted ? tilted_mixture(s) : plain_mixture(s), l, quad);
  return {ms.value.value(), ms.complement.value(), ms.tail};
}

void check_inputs(const CharSpec& spec, double l, const QuadratureSpec& quad) {
  spec.validate();
  quad.validate();
  if (std::isnan(l)) throw DomainError("cumulative transform: l is NaN");
}

}  // namespace

CdfValue eval_plain(const CharSpec& spec, double l, Backend backend, const QuadratureSpec& quad) {
  check_inputs(spec, l, quad);
  return backend == Backend::series ? series_eval(spec, l, false, quad)
                                    : fourier_eval(spec, l, false, quad);
}

CdfValue eval_tilted(const CharSpec& spec, double l, Backend backend, const QuadratureSpec& quad) {
  check_inputs(spec, l, quad);
  return backend == Backend::series ? series_eval(spec, l, true, quad)
                                    : fourier_eval(spec, l, true, quad);
}

SeriesSensitivities plain_sensitivities(const CharSpec& spec, double l,
                                        const QuadratureSpec& quad) {
  check_inputs(spec, l, quad);
  return assemble(spec, sum_mixture(plain_mixture(spec), l, quad), false);
}

SeriesSensitivities tilted_sensitivities(const CharSpec& spec, double l,
                                         const QuadratureSpec& quad) {
  check_inputs(spec, l, quad);
  return assemble(spec, sum_mixture(tilted_mixture(spec), l, quad), true);
}

double green_density(const CharSpec& spec, double u, double rate, const QuadratureSpec& quad,
                     GreenArgument arg, double dividend) {
  check_inputs(spec, u, quad);
  if (spec.lambda == 0.0 && spec.sigma == 0.0) {
    throw DomainError("green_density: law is a pure point mass (lambda = 0 and sigma = 0)");
  }
  if (arg == GreenArgument::raw) {
    u += (rate - dividend - spec.lambda * varsigma(spec.law) - 0.5 * spec.sigma * spec.sigma) *
         spec.tau;
  }
  // The kernel in the shifted coordinate is the law of -(jumps + diffusion) evaluated at u.
  return std::exp(-rate * spec.tau) * plain_sensitivities(spec, u, quad).d_l;
}

double green_atom(const CharSpec& spec, double rate) {
  spec.validate();
  if (spec.sigma > 0.0) return 0.0;
  return std::exp(-rate * spec.tau - spec.lambda * spec.tau);
}

double green_spread(const CharSpec& spec) {
  spec.validate();
  return std::sqrt(spec.lambda * spec.tau * second_moment(spec.law) +
                   spec.sigma * spec.sigma * spec.tau);
}

}  // namespace shotnoise
