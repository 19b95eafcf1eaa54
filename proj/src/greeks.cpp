#include "shotnoise/greeks.hpp"

#include <algorithm>
#include <cmath>

#include "shotnoise/error.hpp"

namespace shotnoise {

namespace {

struct Ingredients {
  double l = 0.0;
  double fwd_spot = 0.0;     // S e^{-q tau}
  double disc_strike = 0.0;  // K e^{-r tau}
  double l1 = 0.0;
  double l2 = 0.0;
  SeriesSensitivities tilted;
  SeriesSensitivities plain;
};

void reject_kink(const AssetModel& model, double l) {
  if (model.sigma > 0.0) return;
  const double tol = 1e-12 * std::max(1.0, std::abs(l));
  bool at_atom = std::abs(l) < tol;
  if (!at_atom && model.law.delta == 0.0 && model.law.nu != 0.0 && model.lambda > 0.0) {
    const double n = std::round(-l / model.law.nu);
    at_atom = n >= 0.0 && std::abs(l + n * model.law.nu) < tol;
  }
  if (at_atom) {
    throw KinkError(
        "Greeks requested on a point mass of the transition law (sigma = 0); evaluate at "
        "l +/- eps instead");
  }
}

Ingredients gather(const OptionTerms& terms, const AssetModel& model, Backend backend,
                   const QuadratureSpec& quad) {
  terms.validate();
  model.validate();
  if (terms.tau == 0.0) throw DegenerateMaturityError("Greeks need tau > 0");
  Ingredients in;
  in.l = l_parameter(terms, model);
  reject_kink(model, in.l);
  const CharSpec spec = model.char_spec(terms.tau);
  in.tilted = tilted_sensitivities(spec, in.l, quad);
  in.plain = plain_sensitivities(spec, in.l, quad);
  const bool series = backend == Backend::series || (model.lambda == 0.0 && model.sigma == 0.0);
  in.l1 = series ? in.tilted.value : cdf_tilted(spec, in.l, backend, quad);
  in.l2 = series ? in.plain.value : cdf_plain(spec, in.l, backend, quad);
  in.fwd_spot = terms.spot * std::exp(-terms.dividend * terms.tau);
  in.disc_strike = terms.strike * std::exp(-terms.rate * terms.tau);
  return in;
}

// Total derivative of the call value in a model parameter. The l-dependence of the two
// transforms cancels because S e^{-q tau} dL1/dl = K e^{-r tau} dL2/dl.
double call_param_derivative(const Ingredients& in, double d_tilted, double d_plain) {
  return in.fwd_spot * d_tilted - in.disc_strike * d_plain;
}

}  // namespace

GreekSet common_greeks(const OptionTerms& terms, const AssetModel& model, Backend backend,
                       const QuadratureSpec& quad) {
  const Ingredients in = gather(terms, model, backend, quad);
  const double eq = std::exp(-terms.dividend * terms.tau);
  const double tau = terms.tau;

  GreekSet g;
  g.delta = eq * in.l1;
  g.gamma = eq * in.tilted.d_l / terms.spot;
  g.rho = tau * in.disc_strike * in.l2;
  g.psi = -tau * in.fwd_spot * in.l1;
  const double dc_dtau = -terms.dividend * in.fwd_spot * in.l1 +
                         terms.rate * in.disc_strike * in.l2 +
                         call_param_derivative(in, in.tilted.d_tau, in.plain.d_tau);
  g.theta = -dc_dtau;
  if (model.sigma > 0.0) {
    g.vega = call_param_derivative(in, in.tilted.d_sigma, in.plain.d_sigma);
  } else {
    g.delta_jump = eq * in.tilted.atom_weight;
  }

  if (terms.kind == OptionKind::put) {
    g.delta -= eq;
    g.rho -= tau * in.disc_strike;
    g.psi += tau * in.fwd_spot;
    g.theta += -terms.dividend * in.fwd_spot + terms.rate * in.disc_strike;
  }
  return g;
}

NewGreekSet new_greeks(const OptionTerms& terms, const AssetModel& model, Backend backend,
                       const QuadratureSpec& quad) {
  const Ingredients in = gather(terms, model, backend, quad);
  NewGreekSet n;
  n.kappa = call_param_derivative(in, in.tilted.d_lambda, in.plain.d_lambda);
  n.mu = call_param_derivative(in, in.tilted.d_nu, in.plain.d_nu);
  n.epsilon = call_param_derivative(in, in.tilted.d_delta, in.plain.d_delta);
  n.extension = model.sigma > 0.0;
  return n;
}

GreekSet bs_greeks(const OptionTerms& terms, double sigma) {
  terms.validate();
  if (!(sigma > 0.0)) throw DomainError("bs_greeks: sigma must be > 0");
  if (terms.tau == 0.0) throw DegenerateMaturityError("bs_greeks: tau must be > 0");
  const double tau = terms.tau;
  const double sd = sigma * std::sqrt(tau);
  const double d2 = (std::log(terms.spot / terms.strike) +
                     (terms.rate - terms.dividend - 0.5 * sigma * sigma) * tau) /
                    sd;
  const double d1 = d2 + sd;
  const double fwd_spot = terms.spot * std::exp(-terms.dividend * tau);
  const double disc_strike = terms.strike * std::exp(-terms.rate * tau);
  const double nd1 = numerics::normal_cdf(d1);
  const double nd2 = numerics::normal_cdf(d2);
  const double pdf1 = numerics::normal_pdf(d1);

  GreekSet g;
  g.delta = std::exp(-terms.dividend * tau) * nd1;
  g.gamma = std::exp(-terms.dividend * tau) * pdf1 / (terms.spot * sd);
  g.rho = tau * disc_strike * nd2;
  g.psi = -tau * fwd_spot * nd1;
  g.theta = -fwd_spot * pdf1 * sigma / (2.0 * std::sqrt(tau)) +
            terms.dividend * fwd_spot * nd1 - terms.rate * disc_strike * nd2;
  g.vega = fwd_spot * pdf1 * std::sqrt(tau);
  if (terms.kind == OptionKind::put) {
    g.delta -= std::exp(-terms.dividend * tau);
    g.rho -= tau * disc_strike;
    g.psi += tau * fwd_spot;
    g.theta += -terms.dividend * fwd_spot + terms.rate * disc_strike;
  }
  return g;
}

numerics::Derivative fd_sensitivity(const std::function<double(double)>& f, double at,
                                    double step) {
  return numerics::central_difference(f, at, step);
}

std::vector<IdentityResidual> identity_report(const OptionTerms& terms, const AssetModel& model,
                                              Backend backend, const QuadratureSpec& quad) {
  if (!(model.lambda > 0.0)) throw DomainError("identity_report: lambda must be > 0");
  if (model.sigma != 0.0) throw DomainError("identity_report: requires sigma = 0");
  OptionTerms call = terms;
  call.kind = OptionKind::call;
  OptionTerms put = terms;
  put.kind = OptionKind::put;

  const Ingredients in = gather(call, model, backend, quad);
  const GreekSet gc = common_greeks(call, model, backend, quad);
  const GreekSet gp = common_greeks(put, model, backend, quad);
  const NewGreekSet ng = new_greeks(call, model, backend, quad);
  const double tau = terms.tau;
  const double s = terms.spot;
  const double lambda = model.lambda;
  const double delta = model.law.delta;
  const double vs = varsigma(model.law);

  const auto with_lambda = [&](double v) {
    AssetModel m = model;
    m.lambda = v;
    return common_greeks(call, m, backend, quad);
  };
  const auto with_delta = [&](double v) {
    AssetModel m = model;
    m.law.delta = v;
    return common_greeks(call, m, backend, quad);
  };
  const double h_lambda = 1e-4 * std::max(1.0, lambda);
  const double d_delta_d_lambda =
      fd_sensitivity([&](double v) { return with_lambda(v).delta; }, lambda, h_lambda).value;
  const double d_rho_d_lambda =
      fd_sensitivity([&](double v) { return with_lambda(v).rho; }, lambda, h_lambda).value;

  const double floor = 1e-6 * std::max(terms.spot, terms.strike);
  std::vector<IdentityResidual> out;
  const auto add = [&](std::string name, double lhs, double rhs) {
    const double scale = std::max({std::abs(lhs), std::abs(rhs), floor});
    out.push_back({std::move(name), lhs, rhs, std::abs(lhs - rhs) / scale});
  };

  const double l1c = 1.0 - in.l1;
  const double l2c = 1.0 - in.l2;
  add("theta_kappa_call", gc.theta,
      terms.dividend * in.fwd_spot * in.l1 - terms.rate * in.disc_strike * in.l2 -
          lambda * ng.kappa / tau);
  add("theta_kappa_put", gp.theta,
      -terms.dividend * in.fwd_spot * l1c + terms.rate * in.disc_strike * l2c -
          lambda * ng.kappa / tau);
  add("kappa_delta_rho", ng.kappa, s * d_delta_d_lambda - d_rho_d_lambda / tau);
  add("mu_delta_gamma", ng.mu / lambda, s * d_delta_d_lambda + vs * tau * s * s * gc.gamma);
  add("kappa_mu", ng.kappa,
      ng.mu / lambda - d_rho_d_lambda / tau - vs * tau * s * s * gc.gamma);
  if (delta > 0.0) {
    add("epsilon_mu_gamma", ng.epsilon / (lambda * tau * delta),
        ng.mu / (lambda * tau) + s * s * gc.gamma + in.disc_strike * in.plain.d_l_mass);
    const double h_delta = 1e-4 * std::max(1.0, delta);
    const double d_delta_d_delta =
        fd_sensitivity([&](double v) { return with_delta(v).delta; }, delta, h_delta).value;
    const double d_rho_d_delta =
        fd_sensitivity([&](double v) { return with_delta(v).rho; }, delta, h_delta).value;
    add("epsilon_delta_rho", ng.epsilon, s * d_delta_d_delta - d_rho_d_delta / tau);
  }
  return out;
}

}  // namespace shotnoise
