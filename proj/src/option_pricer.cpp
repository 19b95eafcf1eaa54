#include "shotnoise/option_pricer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

std::string_view to_string(OptionKind kind) { return kind == OptionKind::call ? "call" : "put"; }

OptionKind parse_option_kind(std::string_view name) {
  if (name == "call") return OptionKind::call;
  if (name == "put") return OptionKind::put;
  throw DomainError("unknown option kind '" + std::string(name) + "' (expected call|put)");
}

void OptionTerms::validate() const {
  if (!std::isfinite(spot) || spot <= 0.0) throw DomainError("OptionTerms: spot must be > 0");
  if (!std::isfinite(strike) || strike <= 0.0) throw DomainError("OptionTerms: strike must be > 0");
  if (!std::isfinite(tau) || tau < 0.0) throw DomainError("OptionTerms: tau must be >= 0");
  if (!std::isfinite(rate) || !std::isfinite(dividend)) {
    throw DomainError("OptionTerms: rate and dividend must be finite");
  }
}

void AssetModel::validate() const {
  if (!std::isfinite(lambda) || lambda < 0.0) throw DomainError("AssetModel: lambda must be >= 0");
  if (!std::isfinite(sigma) || sigma < 0.0) throw DomainError("AssetModel: sigma must be >= 0");
  law.validate();
}

double log_moneyness(const OptionTerms& terms) {
  terms.validate();
  return std::log(terms.spot / terms.strike);
}

double l_parameter(const OptionTerms& terms, const AssetModel& model) {
  terms.validate();
  model.validate();
  if (terms.tau == 0.0) throw DegenerateMaturityError("l_parameter: tau must be > 0");
  const double drift = terms.rate - terms.dividend - 0.5 * model.sigma * model.sigma -
                       model.lambda * varsigma(model.law);
  return std::log(terms.spot / terms.strike) + drift * terms.tau;
}

double payoff(const OptionTerms& terms) {
  terms.validate();
  return terms.kind == OptionKind::call ? std::max(terms.spot - terms.strike, 0.0)
                                        : std::max(terms.strike - terms.spot, 0.0);
}

PriceResult price(const OptionTerms& terms, const AssetModel& model, Backend backend,
                  const QuadratureSpec& quad) {
  terms.validate();
  model.validate();
  if (terms.tau == 0.0) return {payoff(terms), 0.0, backend, 0.0};

  const double l = l_parameter(terms, model);
  const CharSpec spec = model.char_spec(terms.tau);
  const Backend used = (model.lambda == 0.0 && model.sigma == 0.0) ? Backend::series : backend;
  const CdfValue tilted = eval_tilted(spec, l, used, quad);
  const CdfValue plain = eval_plain(spec, l, used, quad);
  const double fwd_spot = terms.spot * std::exp(-terms.dividend * terms.tau);
  const double disc_strike = terms.strike * std::exp(-terms.rate * terms.tau);

  double value = 0.0;
  if (terms.kind == OptionKind::call) {
    value = fwd_spot * tilted.lower - disc_strike * plain.lower;
  } else {
    value = disc_strike * plain.upper - fwd_spot * tilted.upper;
  }
  const double err = fwd_spot * tilted.error + disc_strike * plain.error;
  // Rounding can leave a tiny negative value deep out of the money.
  if (value < 0.0 && value > -std::max(err, 1e-12 * std::max(fwd_spot, disc_strike))) value = 0.0;
  return {value, l, used, err};
}

PriceResult shot_noise_price(const OptionTerms& terms, const ArrivalRate& rate,
                             const GaussianJumpLaw& law, Backend backend,
                             const QuadratureSpec& quad) {
  terms.validate();
  rate.validate();
  law.validate();
  if (terms.tau == 0.0) return {payoff(terms), 0.0, backend, 0.0};
  const double l = std::log(terms.spot / terms.strike) +
                   (terms.rate - terms.dividend - rate.lambda * varsigma(law)) * terms.tau;
  const CharSpec spec{terms.tau, rate.lambda, 0.0, law};
  const Backend used = rate.lambda == 0.0 ? Backend::series : backend;
  const double fwd_spot = terms.spot * std::exp(-terms.dividend * terms.tau);
  const double disc_strike = terms.strike * std::exp(-terms.rate * terms.tau);
  const CdfValue l1 = eval_tilted(spec, l, used, quad);
  const CdfValue l2 = eval_plain(spec, l, used, quad);
  double value = terms.kind == OptionKind::call ? fwd_spot * l1.lower - disc_strike * l2.lower
                                                : disc_strike * l2.upper - fwd_spot * l1.upper;
  const double err = fwd_spot * l1.error + disc_strike * l2.error;
  if (value < 0.0 && value > -std::max(err, 1e-12 * std::max(fwd_spot, disc_strike))) value = 0.0;
  return {value, l, used, err};
}

PriceResult bs_price(const OptionTerms& terms, double sigma) {
  terms.validate();
  if (!(sigma > 0.0)) throw DomainError("bs_price: sigma must be > 0");
  if (terms.tau == 0.0) throw DegenerateMaturityError("bs_price: tau must be > 0");
  const double sd = sigma * std::sqrt(terms.tau);
  const double d2 = (std::log(terms.spot / terms.strike) +
                     (terms.rate - terms.dividend - 0.5 * sigma * sigma) * terms.tau) /
                    sd;
  const double d1 = d2 + sd;
  const double fwd_spot = terms.spot * std::exp(-terms.dividend * terms.tau);
  const double disc_strike = terms.strike * std::exp(-terms.rate * terms.tau);
  using numerics::normal_cdf;
  const double value =
      terms.kind == OptionKind::call
          ? fwd_spot * normal_cdf(d1) - disc_strike * normal_cdf(d2)
          : disc_strike * normal_cdf(-d2) - fwd_spot * normal_cdf(-d1);
  return {value, d2 * sd, Backend::series, 0.0};
}

double parity_residual(const OptionTerms& terms, const AssetModel& model, Backend backend,
                       const QuadratureSpec& quad) {
  OptionTerms call = terms;
  call.kind = OptionKind::call;
  OptionTerms put = terms;
  put.kind = OptionKind::put;
  const double c = price(call, model, backend, quad).value;
  const double p = price(put, model, backend, quad).value;
  const double forward = terms.spot * std::exp(-terms.dividend * terms.tau) -
                         terms.strike * std::exp(-terms.rate * terms.tau);
  return c - p - forward;
}

}  // namespace shotnoise
