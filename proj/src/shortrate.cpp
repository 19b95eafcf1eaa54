#include "shotnoise/shortrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

void RateModel::validate() const {
  if (!std::isfinite(a) || a <= 0.0) throw DomainError("RateModel: a must be > 0");
  if (!std::isfinite(b)) throw DomainError("RateModel: b must be finite");
  if (!std::isfinite(sigma_r) || sigma_r < 0.0) throw DomainError("RateModel: sigma_r must be >= 0");
  if (!std::isfinite(lambda_r) || lambda_r < 0.0) {
    throw DomainError("RateModel: lambda_r must be >= 0");
  }
  law.validate();
}

void BondTerms::validate() const {
  if (!std::isfinite(t) || !std::isfinite(T) || !std::isfinite(r_t)) {
    throw DomainError("BondTerms: fields must be finite");
  }
  if (t < 0.0 || t > T) throw DomainError("BondTerms: need 0 <= t <= T");
}

std::string_view to_string(RateVariant variant) {
  switch (variant) {
    case RateVariant::shot: return "shot";
    case RateVariant::vasicek: return "vasicek";
    case RateVariant::general: return "general";
  }
  return "general";
}

RateVariant parse_rate_variant(std::string_view name) {
  if (name == "shot") return RateVariant::shot;
  if (name == "vasicek") return RateVariant::vasicek;
  if (name == "general") return RateVariant::general;
  throw DomainError("unknown rate variant '" + std::string(name) + "'");
}

namespace {

void check_interval(double t, double T) {
  if (!std::isfinite(t) || !std::isfinite(T) || t > T) {
    throw DomainError("bond interval: need finite t <= T");
  }
}

double jump_exponent(const RateModel& m, double y) {
  return std::expm1(-m.law.nu * y + 0.5 * m.law.delta * m.law.delta * y * y);
}

double checked_integral(const std::function<double(double)>& f, double lo, double hi,
                        const RateModel& model, const QuadratureSpec& quad, const char* what) {
  const double abs_tol = 1e-16 * std::max(1.0, model.lambda_r * (hi - lo));
  const auto est = numerics::integrate_adaptive(f, lo, hi, quad.rel_tol, abs_tol, 16);
  if (!est.converged) throw ConvergenceError(what, est.error);
  return est.value;
}

}  // namespace

double b_factor(const RateModel& model, double t, double T) {
  model.validate();
  check_interval(t, T);
  return -std::expm1(-model.a * (T - t)) / model.a;
}

double a_shot(const RateModel& model, double t, double T, const QuadratureSpec& quad) {
  model.validate();
  quad.validate();
  check_interval(t, T);
  if (t == T || model.lambda_r == 0.0) return 0.0;
  const auto f = [&](double s) {
    return jump_exponent(model, -std::expm1(-model.a * (T - s)) / model.a);
  };
  return model.lambda_r * checked_integral(f, t, T, model, quad, "a_shot: tolerance not met");
}

double a_shot_substituted(const RateModel& model, double t, double T, const QuadratureSpec& quad) {
  model.validate();
  quad.validate();
  check_interval(t, T);
  if (t == T || model.lambda_r == 0.0) return 0.0;
  const double upper = b_factor(model, t, T);
  const auto f = [&](double y) { return jump_exponent(model, y) / (1.0 - model.a * y); };
  return model.lambda_r *
         checked_integral(f, 0.0, upper, model, quad, "a_shot_substituted: tolerance not met");
}

double a_vasicek(const RateModel& model, double t, double T) {
  const double bb = b_factor(model, t, T);
  const double a = model.a;
  const double s2 = model.sigma_r * model.sigma_r;
  return (model.b - s2 / (2.0 * a * a)) * (bb - (T - t)) - s2 * bb * bb / (4.0 * a);
}

double a_general(const RateModel& model, double t, double T, const QuadratureSpec& quad) {
  return a_vasicek(model, t, T) + a_shot(model, t, T, quad);
}

double a_variant(const RateModel& model, double t, double T, RateVariant variant,
                 const QuadratureSpec& quad) {
  switch (variant) {
    case RateVariant::shot: return a_shot(model, t, T, quad);
    case RateVariant::vasicek: return a_vasicek(model, t, T);
    case RateVariant::general: return a_general(model, t, T, quad);
  }
  return a_general(model, t, T, quad);
}

double bond_price(const RateModel& model, const BondTerms& terms, RateVariant variant,
                  const QuadratureSpec& quad) {
  terms.validate();
  if (terms.t == terms.T) return 1.0;
  const double a = a_variant(model, terms.t, terms.T, variant, quad);
  return std::exp(a - b_factor(model, terms.t, terms.T) * terms.r_t);
}

RateModel diffusion_limit(const RateModel& model) {
  model.validate();
  RateModel v = model;
  v.b = model.b + model.lambda_r * model.law.nu / model.a;
  v.sigma_r = std::sqrt(model.sigma_r * model.sigma_r +
                        model.lambda_r * second_moment(model.law));
  v.lambda_r = 0.0;
  v.law = {};
  return v;
}

RateMoments vasicek_moments(double a, double b, double sigma, double r_t, double horizon) {
  if (!(a > 0.0)) throw DomainError("vasicek_moments: a must be > 0");
  if (!(horizon >= 0.0)) throw DomainError("vasicek_moments: horizon must be >= 0");
  const double decay = std::exp(-a * horizon);
  return {b + (r_t - b) * decay, sigma * sigma / (2.0 * a) * -std::expm1(-2.0 * a * horizon)};
}

RateMoments conditional_moments(const RateModel& model, double r_t, double horizon,
                                RateVariant variant) {
  model.validate();
  if (!std::isfinite(horizon) || horizon < 0.0) {
    throw DomainError("conditional_moments: horizon must be >= 0");
  }
  const bool jumps = variant != RateVariant::vasicek;
  const bool wiener = variant != RateVariant::shot;
  // Jumps arrive uniformly in time and decay at rate a; their first two moments add
  // lambda_r nu / a to the long-run mean and lambda_r E[eta^2] to the variance rate.
  double long_mean = 0.0;
  double var_rate = 0.0;
  if (jumps) {
    long_mean += model.lambda_r * model.law.nu / model.a;
    var_rate += model.lambda_r * second_moment(model.law);
  }
  if (wiener) {
    long_mean += model.b;
    var_rate += model.sigma_r * model.sigma_r;
  }
  const double decay = std::exp(-model.a * horizon);
  return {long_mean + (r_t - long_mean) * decay,
          var_rate / (2.0 * model.a) * -std::expm1(-2.0 * model.a * horizon)};
}

OdeResidual ode_residual(const RateModel& model, double t, double T, RateVariant variant,
                         const QuadratureSpec& quad, double step) {
  model.validate();
  check_interval(t, T);
  if (!(t < T)) throw DomainError("ode_residual: need t < T");
  if (!(step > 0.0)) throw DomainError("ode_residual: step must be positive");
  const bool jumps = variant != RateVariant::vasicek;
  const bool wiener = variant != RateVariant::shot;
  const double b = wiener ? model.b : 0.0;
  const double s2 = wiener ? model.sigma_r * model.sigma_r : 0.0;
  const double lambda = jumps ? model.lambda_r : 0.0;

  OdeResidual out;
  constexpr int kPoints = 9;
  for (int i = 1; i <= kPoints; ++i) {
    const double s = t + (T - t) * static_cast<double>(i) / (kPoints + 1);
    const double h = std::min(step, 0.5 * std::min(s - t, T - s));
    const auto bf = [&](double x) { return b_factor(model, x, T); };
    const auto af = [&](double x) { return a_variant(model, x, T, variant, quad); };
    const double bb = bf(s);
    const double db = numerics::central_difference(bf, s, h).value;
    const double da = numerics::central_difference(af, s, h).value;
    const double res_b = db - model.a * bb + 1.0;
    const double res_a =
        da - model.a * b * bb + 0.5 * s2 * bb * bb + lambda * jump_exponent(model, bb);
    out.res_b = std::max(out.res_b, std::abs(res_b));
    out.res_a = std::max(out.res_a, std::abs(res_a));
  }
  return out;
}

double zero_yield(double price, double tenor) {
  if (!std::isfinite(price) || price <= 0.0) throw DomainError("zero_yield: price must be > 0");
  if (!std::isfinite(tenor) || tenor <= 0.0) throw DomainError("zero_yield: tenor must be > 0");
  return -std::log(price) / tenor;
}

}  // namespace shotnoise
