#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace shotnoise::numerics {

using complex = std::complex<double>;

inline double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

/// Standard normal CDF via erfc, accurate in both tails.
inline double normal_cdf(double x) noexcept {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// Inverse of the standard normal CDF: Acklam rational approximation plus one Halley step.
double normal_quantile(double p);

/// exp(z) - 1 without cancellation for small |z|.
inline complex expm1(complex z) noexcept {
  const double x = z.real();
  const double y = z.imag();
  const double s = std::sin(0.5 * y);
  return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule on [-1, 1]. Rules are cached per node count.
const QuadratureRule& gauss_legendre(std::size_t n);

/// Gauss-Hermite rule for the weight exp(-x^2) on the real line. Cached per node count.
const QuadratureRule& gauss_hermite(std::size_t n);

/// E[f(X)] for X ~ N(mean, sd^2) by an n-node Gauss-Hermite rule.
double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd,
                            std::size_t n);

struct IntegralEstimate {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Adaptive bisection on panels of a fixed-order Gauss-Legendre rule. A panel is
/// accepted when the one-panel and two-half-panel estimates agree to
/// max(abs_tol, rel_tol * |value|) scaled by the panel's share of [a, b].
IntegralEstimate integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol = 0.0,
                                    std::size_t order = 16, int max_depth = 30);

/// Fixed composite Gauss-Legendre with `panels` equal panels of `order` nodes.
double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels, std::size_t order);

struct Derivative {
  double value = 0.0;
  double error = 0.0;
};

/// Central difference with one Richardson step (h and h/2). Throws EvaluationError when
/// f returns a non-finite value.
Derivative central_difference(const std::function<double(double)>& f, double at, double step);

/// Plain second-order central second difference (f(x+h) - 2 f(x) + f(x-h)) / h^2.
double second_difference(const std::function<double(double)>& f, double at, double step);

}  // namespace shotnoise::numerics
