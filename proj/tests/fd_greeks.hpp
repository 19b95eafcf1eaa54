#pragma once

// Finite-difference Greeks built only from price(), for comparison with the analytic ones.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "shotnoise/greeks.hpp"
#include "shotnoise/option_pricer.hpp"

namespace testing_support {

using namespace shotnoise;

struct GreekComparison {
  std::string name;
  double analytic = 0.0;
  double numeric = 0.0;
  double rel = 0.0;
};

inline double rel_diff(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

/// Every common and new Greek against central differences of price. The comparison is
/// relative with an absolute floor of 1e-6 max(S, K).
inline std::vector<GreekComparison> compare_greeks(const OptionTerms& terms, const AssetModel& model,
                                                   const QuadratureSpec& quad = {1e-14}) {
  const auto px = [&](OptionTerms t, AssetModel m) {
    return price(t, m, Backend::series, quad).value;
  };
  const auto d = [](const std::function<double(double)>& f, double at) {
    return fd_sensitivity(f, at, 1e-4 * std::max(1.0, std::abs(at))).value;
  };
  const GreekSet g = common_greeks(terms, model, Backend::series, quad);
  const NewGreekSet n = new_greeks(terms, model, Backend::series, quad);
  const double floor = 1e-6 * std::max(terms.spot, terms.strike);

  std::vector<GreekComparison> out;
  const auto add = [&](std::string name, double a, double b) {
    out.push_back({std::move(name), a, b, rel_diff(a, b, floor)});
  };
  add("delta", g.delta, d([&](double s) { auto t = terms; t.spot = s; return px(t, model); }, terms.spot));
  const double hs = 1e-3 * terms.spot;
  add("gamma", g.gamma,
      numerics::second_difference([&](double s) { auto t = terms; t.spot = s; return px(t, model); },
                                  terms.spot, hs));
  add("rho", g.rho, d([&](double r) { auto t = terms; t.rate = r; return px(t, model); }, terms.rate));
  add("psi", g.psi,
      d([&](double q) { auto t = terms; t.dividend = q; return px(t, model); }, terms.dividend));
  add("theta", g.theta,
      -d([&](double tau) { auto t = terms; t.tau = tau; return px(t, model); }, terms.tau));
  if (g.vega) {
    add("vega", *g.vega,
        d([&](double s) { auto m = model; m.sigma = s; return px(terms, m); }, model.sigma));
  }
  add("kappa", n.kappa,
      d([&](double v) { auto m = model; m.lambda = v; return px(terms, m); }, model.lambda));
  add("mu", n.mu, d([&](double v) { auto m = model; m.law.nu = v; return px(terms, m); }, model.law.nu));
  if (model.law.delta > 0.0) {
    add("epsilon", n.epsilon,
        d([&](double v) { auto m = model; m.law.delta = v; return px(terms, m); }, model.law.delta));
  }
  return out;
}

}  // namespace testing_support
