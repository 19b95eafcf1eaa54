#include "shotnoise/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "shotnoise/error.hpp"
#include "shotnoise/greeks.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

namespace {

std::string describe(const char* fmt, double a, double b) {
  char buf[96];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

// E[max(e^{l + eta} - 1, 0)] for eta ~ N(nu, delta^2).
double gaussian_call_on_exp(double l, double nu, double delta) {
  if (delta == 0.0) return std::max(std::expm1(l + nu), 0.0);
  const double d2 = (l + nu) / delta;
  return std::exp(l + nu + 0.5 * delta * delta) * numerics::normal_cdf(d2 + delta) -
         numerics::normal_cdf(d2);
}

}  // namespace

ResidualReport option_pide_residual(const OptionTerms& terms,
                                    const std::vector<OptionGridPoint>& grid,
                                    const AssetModel& model, const QuadratureSpec& quad,
                                    const PideSettings& settings) {
  terms.validate();
  model.validate();
  ResidualReport report;
  report.dt = settings.dt;
  report.dx_or_dr = settings.dx;
  report.quad_nodes = settings.hermite_nodes;

  const double k = terms.strike;
  const double r = terms.rate;
  const double q = terms.dividend;
  const double sig2 = model.sigma * model.sigma;
  const double vs = varsigma(model.law);
  const bool atom = model.sigma == 0.0 && model.lambda > 0.0;

  for (const auto& pt : grid) {
    OptionTerms base = terms;
    base.spot = pt.spot;
    base.tau = pt.tau;
    const double l0 = l_parameter(base, model);
    if (pt.tau < 0.05 || (model.sigma == 0.0 && std::abs(l0) < 0.05)) {
      report.rejected.push_back(describe("S=%.17g tau=%.17g", pt.spot, pt.tau));
      continue;
    }
    const double x0 = std::log(pt.spot / k);
    const auto value = [&](double x, double tau) {
      OptionTerms t = terms;
      t.spot = k * std::exp(x);
      t.tau = tau;
      return price(t, model, Backend::series, quad).value;
    };
    // Point-mass part of the value in the pure jump model; its Gaussian average is exact.
    const auto atom_part = [&](double x, double tau) {
      if (!atom) return 0.0;
      const double l = x + (r - q - model.lambda * vs) * tau;
      const double sign = terms.kind == OptionKind::call ? 1.0 : -1.0;
      return k * std::exp(-(r + model.lambda) * tau) * std::max(sign * std::expm1(l), 0.0);
    };
    const auto atom_average = [&](double x, double tau) {
      if (!atom) return 0.0;
      const double l = x + (r - q - model.lambda * vs) * tau;
      const double call = gaussian_call_on_exp(l, model.law.nu, model.law.delta);
      // put part: E[max(1 - e^{l+eta}, 0)] = call - E[e^{l+eta} - 1]
      const double avg = terms.kind == OptionKind::call
                             ? call
                             : call - std::expm1(l + model.law.nu +
                                                 0.5 * model.law.delta * model.law.delta);
      return k * std::exp(-(r + model.lambda) * tau) * avg;
    };

    const double c = value(x0, pt.tau);
    const double c_tau =
        (value(x0, pt.tau + settings.dt) - value(x0, pt.tau - settings.dt)) / (2.0 * settings.dt);
    const double up = value(x0 + settings.dx, pt.tau);
    const double dn = value(x0 - settings.dx, pt.tau);
    const double c_x = (up - dn) / (2.0 * settings.dx);
    const double c_xx = (up - 2.0 * c + dn) / (settings.dx * settings.dx);

    double jump = 0.0;
    if (model.lambda > 0.0) {
      const auto smooth = [&](double eta) {
        return value(x0 + eta, pt.tau) - atom_part(x0 + eta, pt.tau);
      };
      const double avg_smooth = numerics::gaussian_expectation(
          smooth, model.law.nu, model.law.delta, static_cast<std::size_t>(settings.hermite_nodes));
      const double avg = avg_smooth + atom_average(x0, pt.tau);
      jump = model.lambda * (avg - c - vs * c_x);
    }
    const double residual =
        -c_tau + (r - q - 0.5 * sig2) * c_x + 0.5 * sig2 * c_xx + jump - r * c;
    const double scale = std::max(std::abs(r * c), 1e-3);
    report.max_residual = std::max(report.max_residual, std::abs(residual) / scale);
    ++report.grid_points;
  }
  return report;
}

ResidualReport bond_pide_residual(const RateModel& model, RateVariant variant, double maturity,
                                  const std::vector<BondGridPoint>& grid,
                                  const QuadratureSpec& quad, const PideSettings& settings) {
  model.validate();
  ResidualReport report;
  report.dt = settings.dt;
  report.dx_or_dr = settings.dx;
  report.quad_nodes = settings.hermite_nodes;
  const bool wiener = variant != RateVariant::shot;
  const bool jumps = variant != RateVariant::vasicek;
  const double b = wiener ? model.b : 0.0;
  const double s2 = wiener ? model.sigma_r * model.sigma_r : 0.0;
  const double lambda = jumps ? model.lambda_r : 0.0;

  for (const auto& pt : grid) {
    if (!(pt.t - settings.dt >= 0.0 && pt.t + settings.dt < maturity)) {
      report.rejected.push_back(describe("t=%.17g r=%.17g", pt.t, pt.r));
      continue;
    }
    const auto p = [&](double t, double r) {
      return bond_price(model, BondTerms{t, maturity, r}, variant, quad);
    };
    const double v = p(pt.t, pt.r);
    const double p_t = (p(pt.t + settings.dt, pt.r) - p(pt.t - settings.dt, pt.r)) /
                       (2.0 * settings.dt);
    const double up = p(pt.t, pt.r + settings.dx);
    const double dn = p(pt.t, pt.r - settings.dx);
    const double p_r = (up - dn) / (2.0 * settings.dx);
    const double p_rr = (up - 2.0 * v + dn) / (settings.dx * settings.dx);
    double jump = 0.0;
    if (lambda > 0.0) {
      const double avg = numerics::gaussian_expectation(
          [&](double eta) { return p(pt.t, pt.r + eta); }, model.law.nu, model.law.delta,
          static_cast<std::size_t>(settings.hermite_nodes));
      jump = lambda * (avg - v);
    }
    const double residual =
        p_t + model.a * (b - pt.r) * p_r + 0.5 * s2 * p_rr + jump - pt.r * v;
    const double scale = std::max(std::abs(pt.r * v), 1e-3);
    report.max_residual = std::max(report.max_residual, std::abs(residual) / scale);
    ++report.grid_points;
  }
  return report;
}

std::vector<ConvergenceRow> diffusion_convergence(const ScalingStudy& study,
                                                  const QuadratureSpec& quad) {
  std::vector<ConvergenceRow> rows;
  rows.reserve(study.scales.size());
  for (const int n : study.scales) {
    if (n < 1) throw DomainError("diffusion_convergence: scales must be >= 1");
    const double lam = study.lambda0 * n;
    AssetModel model;
    model.lambda = lam;
    model.law = {study.m / lam, std::sqrt(study.s2 / lam)};
    const double bs_vol = std::sqrt(lam * second_moment(model.law));

    const double shot = price(study.terms, model, Backend::series, quad).value;
    const double bs = bs_price(study.terms, bs_vol).value;
    const double theta = common_greeks(study.terms, model, Backend::series, quad).theta;
    const double bs_theta = bs_greeks(study.terms, bs_vol).theta;

    RateModel rm = study.rate;
    rm.b = 0.0;
    rm.sigma_r = 0.0;
    const double rlam = study.rate.lambda_r * n;
    rm.lambda_r = rlam;
    rm.law = {study.rate_m / rlam, std::sqrt(study.rate_s2 / rlam)};
    const double a_jump = a_shot(rm, study.t, study.T, quad);
    const double a_diff = a_vasicek(diffusion_limit(rm), study.t, study.T);

    rows.push_back({n, std::abs(shot - bs) / std::abs(bs),
                    std::abs(theta - bs_theta) / std::abs(bs_theta),
                    std::abs(a_jump - a_diff) / std::abs(a_diff)});
  }
  return rows;
}

bool is_monotone(const std::vector<ConvergenceRow>& rows) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].price_error > rows[i - 1].price_error) return false;
    if (rows[i].theta_error > rows[i - 1].theta_error) return false;
    if (rows[i].bond_error > rows[i - 1].bond_error) return false;
  }
  return true;
}

ResidualReport backend_agreement(const BackendGrid& grid, const QuadratureSpec& quad) {
  ResidualReport report;
  report.quad_nodes = quad.k_nodes;
  for (const double mass : grid.lambda_tau) {
    for (const double nu : grid.nu) {
      for (const double delta : grid.delta) {
        for (const double sigma : grid.sigma) {
          const CharSpec spec{grid.tau, mass / grid.tau, sigma, GaussianJumpLaw{nu, delta}};
          for (const double l : grid.l) {
            if (sigma == 0.0 && l == 0.0) {
              char buf[128];
              std::snprintf(buf, sizeof buf, "lambda_tau=%.17g nu=%.17g delta=%.17g l=0", mass,
                            nu, delta);
              report.rejected.emplace_back(buf);
              continue;
            }
            const CdfValue ps = eval_plain(spec, l, Backend::series, quad);
            const CdfValue pf = eval_plain(spec, l, Backend::fourier, quad);
            const CdfValue ts = eval_tilted(spec, l, Backend::series, quad);
            const CdfValue tf = eval_tilted(spec, l, Backend::fourier, quad);
            const double diff = std::max({std::abs(ps.lower - pf.lower),
                                          std::abs(ps.upper - pf.upper),
                                          std::abs(ts.lower - tf.lower),
                                          std::abs(ts.upper - tf.upper)});
            report.max_residual = std::max(report.max_residual, diff);
            ++report.grid_points;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace shotnoise
