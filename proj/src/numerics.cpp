#include "shotnoise/numerics.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <map>
#include <mutex>

#include "shotnoise/error.hpp"

namespace shotnoise::numerics {

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    if (p == 0.0) return -std::numeric_limits<double>::infinity();
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    throw DomainError("normal_quantile: probability outside [0, 1]");
  }
  static constexpr std::array<double, 6> a{-3.969683028665376e+01, 2.209460984245205e+02,
                                           -2.759285104469687e+02, 1.383577518672690e+02,
                                           -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b{-5.447609879822406e+01, 1.615858368580409e+02,
                                           -1.556989798598866e+02, 6.680131188771972e+01,
                                           -1.328068155288572e+01};
  static constexpr std::array<double, 6> c{-7.784894002430293e-03, -3.223964580411365e-01,
                                           -2.400758277161838e+00, -2.549732539343734e+00,
                                           4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d{7.784695709041462e-03, 3.224671290700398e-01,
                                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x = 0.0;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  // Halley refinement against the erfc-based CDF. In the upper tail the residual is
  // formed from the complementary probability to keep it accurate.
  double e = 0.0;
  if (x > 0.0) {
    e = (1.0 - p) - 0.5 * std::erfc(x / std::numbers::sqrt2);
  } else {
    e = normal_cdf(x) - p;
  }
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(0.5 * x * x);
  return x - u / (1.0 + 0.5 * x * u);
}

namespace {

QuadratureRule make_gauss_legendre(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p1 = 1.0;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = ((2.0 * jj + 1.0) * z * p2 - jj * p3) / (jj + 1.0);
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    rule.nodes[i] = -z;
    rule.nodes[n - 1 - i] = z;
    const double w = 2.0 / ((1.0 - z * z) * pp * pp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

// Newton iteration on orthonormal Hermite polynomials; the initial guesses are the
// classical asymptotic ones.
QuadratureRule make_gauss_hermite(std::size_t n) {
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
  const double nn = static_cast<double>(n);
  const std::size_t m = (n + 1) / 2;
  double z = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * nn + 1.0) - 1.85575 * std::pow(2.0 * nn + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(nn, 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * rule.nodes[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * rule.nodes[1];
    } else {
      z = 2.0 * z - rule.nodes[i - 2];
    }
    double pp = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      double p1 = pim4;
      double p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jj = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jj + 1.0)) * p2 - std::sqrt(jj / (jj + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nn) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[n - 1 - i] = -z;
    rule.weights[i] = 2.0 / (pp * pp);
    rule.weights[n - 1 - i] = rule.weights[i];
  }
  std::reverse(rule.nodes.begin(), rule.nodes.end());
  std::reverse(rule.weights.begin(), rule.weights.end());
  return rule;
}

template <typename Maker>
const QuadratureRule& cached_rule(std::map<std::size_t, QuadratureRule>& cache, std::mutex& mu,
                                  std::size_t n, Maker make) {
  if (n == 0) throw DomainError("quadrature rule needs at least one node");
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make(n)).first;
  return it->second;
}

}  // namespace

const QuadratureRule& gauss_legendre(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, n, make_gauss_legendre);
}

const QuadratureRule& gauss_hermite(std::size_t n) {
  static std::map<std::size_t, QuadratureRule> cache;
  static std::mutex mu;
  return cached_rule(cache, mu, n, make_gauss_hermite);
}

double gaussian_expectation(const std::function<double(double)>& f, double mean, double sd,
                            std::size_t n) {
  if (sd == 0.0) return f(mean);
  const auto& rule = gauss_hermite(n);
  CompensatedSum acc;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mean + std::numbers::sqrt2 * sd * rule.nodes[i]);
  }
  return acc.value() / std::sqrt(std::numbers::pi);
}

namespace {

double gl_panel(const std::function<double(double)>& f, double a, double b,
                const QuadratureRule& rule) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

struct AdaptiveState {
  const std::function<double(double)>& f;
  const QuadratureRule& rule;
  double tol;
  double total_length;
  int max_depth;
  CompensatedSum value;
  double error = 0.0;
  bool converged = true;
};

void adapt(AdaptiveState& st, double a, double b, double whole, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl_panel(st.f, a, mid, st.rule);
  const double right = gl_panel(st.f, mid, b, st.rule);
  const double refined = left + right;
  const double err = std::abs(refined - whole);
  const double allowed = st.tol * std::abs(b - a) / st.total_length;
  if (err <= allowed || depth >= st.max_depth) {
    if (err > allowed) st.converged = false;
    st.value += refined;
    st.error += err;
    return;
  }
  adapt(st, a, mid, left, depth + 1);
  adapt(st, mid, b, right, depth + 1);
}

}  // namespace

IntegralEstimate integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    double rel_tol, double abs_tol, std::size_t order,
                                    int max_depth) {
  if (a == b) return {};
  const auto& rule = gauss_legendre(order);
  const double whole = gl_panel(f, a, b, rule);
  // Scale for the relative tolerance comes from a cheap 8-panel pass.
  const double scale = std::abs(integrate_panels(f, a, b, 8, order));
  AdaptiveState st{f, rule, std::max(abs_tol, rel_tol * scale), std::abs(b - a), max_depth, {}};
  if (st.tol == 0.0) st.tol = std::numeric_limits<double>::min();
  adapt(st, a, b, whole, 0);
  return {st.value.value(), st.error, st.converged};
}

double integrate_panels(const std::function<double(double)>& f, double a, double b,
                        std::size_t panels, std::size_t order) {
  const auto& rule = gauss_legendre(order);
  const double width = (b - a) / static_cast<double>(panels);
  CompensatedSum acc;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + width * static_cast<double>(p);
    acc += gl_panel(f, lo, lo + width, rule);
  }
  return acc.value();
}

Derivative central_difference(const std::function<double(double)>& f, double at, double step) {
  if (!(step > 0.0)) throw DomainError("central_difference: step must be positive");
  auto eval = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) throw EvaluationError("central_difference: non-finite function value");
    return v;
  };
  const double coarse = (eval(at + step) - eval(at - step)) / (2.0 * step);
  const double h2 = 0.5 * step;
  const double fine = (eval(at + h2) - eval(at - h2)) / (2.0 * h2);
  const double extrapolated = (4.0 * fine - coarse) / 3.0;
  return {extrapolated, std::abs(extrapolated - fine)};
}

double second_difference(const std::function<double(double)>& f, double at, double step) {
  if (!(step > 0.0)) throw DomainError("second_difference: step must be positive");
  const double up = f(at + step);
  const double mid = f(at);
  const double down = f(at - step);
  if (!std::isfinite(up) || !std::isfinite(mid) || !std::isfinite(down)) {
    throw EvaluationError("second_difference: non-finite function value");
  }
  return (up - 2.0 * mid + down) / (step * step);
}

}  // namespace shotnoise::numerics
