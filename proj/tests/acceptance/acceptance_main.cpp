// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "../fd_greeks.hpp"
#include "../oracles.hpp"
#include "shotnoise/greeks.hpp"
#include "shotnoise/montecarlo.hpp"
#include "shotnoise/option_pricer.hpp"
#include "shotnoise/shortrate.hpp"
#include "shotnoise/validation.hpp"

#ifndef SHOTNOISE_CLI_PATH
#define SHOTNOISE_CLI_PATH "shotnoise"
#endif

using namespace shotnoise;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Tracker {
 public:
  void fail(const std::string& why) {
    if (out_.pass) out_.detail = why;
    out_.pass = false;
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  void note(const std::string& s) {
    if (out_.pass) out_.detail = s;
  }
  Outcome result() const { return out_; }

 private:
  Outcome out_;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// The 81-point model grid: lambda tau, nu, delta, sigma at tau = 1.
template <typename Fn>
void for_model_grid(Fn fn) {
  for (double mass : {0.25, 1.0, 4.0}) {
    for (double nu : {-0.1, 0.0, 0.1}) {
      for (double delta : {0.05, 0.2, 0.4}) {
        for (double sigma : {0.0, 0.1, 0.2}) fn(AssetModel{mass, {nu, delta}, sigma});
      }
    }
  }
}

Outcome check_parity() {
  Tracker t;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int points = 0;
  for_model_grid([&](const AssetModel& m) {
    for (double k : {90.0, 100.0, 110.0}) {
      const OptionTerms terms{100.0, k, 1.0, 0.02, 0.01};
      for (auto b : {Backend::series, Backend::fourier}) {
        worst = std::max(worst, std::abs(parity_residual(terms, m, b)) / std::max(100.0, k));
        ++points;
      }
    }
  });
  const double secs = seconds_since(t0);
  t.check(worst <= 1e-8, fmt("max relative residual %.3g > 1e-8", worst));
  t.check(secs < 10.0, fmt("runtime %.1f s >= 10 s", secs));
  t.note(fmt("max |C-P-F|/max(S,K) = %.3g over %.0f evaluations, %.2f s", worst, points, secs));
  return t.result();
}

Outcome check_black_scholes_reduction() {
  Tracker t;
  double worst = 0.0;
  for (double s : {70.0, 100.0, 130.0}) {
    for (double sigma : {0.1, 0.2, 0.5}) {
      for (double tau : {0.25, 1.0, 3.0}) {
        for (auto kind : {OptionKind::call, OptionKind::put}) {
          const OptionTerms terms{s, 100.0, tau, 0.03, 0.01, kind};
          const AssetModel m{0.0, {0.1, 0.3}, sigma};
          for (auto b : {Backend::series, Backend::fourier}) {
            worst = std::max(worst, std::abs(price(terms, m, b).value - bs_price(terms, sigma).value));
          }
        }
      }
    }
  }
  // frozen from a 30-digit evaluation of 100 (2 Phi(0.1) - 1)
  const double atm = bs_price({100.0, 100.0, 1.0, 0.0, 0.0}, 0.2).value;
  const double atm_err = std::abs(atm - 7.96556745540579629);
  t.check(worst <= 1e-9, fmt("lambda = 0 price vs closed form %.3g > 1e-9", worst));
  t.check(atm_err <= 1e-6, fmt("ATM call %.12f differs from reference by %.3g", atm, atm_err));
  t.note(fmt("max |price - bs| = %.3g, ATM call = %.10f (ref 7.9655674554)", worst, atm));
  return t.result();
}

Outcome check_shot_noise_reduction() {
  Tracker t;
  double worst = 0.0;
  for_model_grid([&](const AssetModel& grid_model) {
    if (grid_model.sigma != 0.0) return;
    for (double k : {90.0, 100.0, 110.0}) {
      for (auto kind : {OptionKind::call, OptionKind::put}) {
        const OptionTerms terms{100.0, k, 1.0, 0.02, 0.01, kind};
        const double shot = shot_noise_price(terms, {grid_model.lambda}, grid_model.law).value;
        for (double sigma : {0.0, 1e-10}) {
          AssetModel m = grid_model;
          m.sigma = sigma;
          worst = std::max(worst, std::abs(price(terms, m).value - shot));
        }
      }
    }
  });
  t.check(worst <= 1e-9, fmt("generalized vs pure shot-noise %.3g > 1e-9", worst));
  t.note(fmt("max |generalized(sigma in {0, 1e-10}) - shot noise| = %.3g", worst));
  return t.result();
}

Outcome check_backend_cross_validation() {
  Tracker t;
  const auto t0 = std::chrono::steady_clock::now();
  const ResidualReport rep = backend_agreement();
  const double secs = seconds_since(t0);
  t.check(rep.max_residual <= 1e-7, fmt("max |series - fourier| %.3g > 1e-7", rep.max_residual));
  t.check(secs < 60.0, fmt("runtime %.1f s >= 60 s", secs));
  t.note(fmt("max |series - fourier| = %.3g over %.0f points (%.0f atom points excluded), ",
             rep.max_residual, rep.grid_points, static_cast<double>(rep.rejected.size())) +
         fmt("%.2f s", secs));
  return t.result();
}

Outcome check_monte_carlo() {
  Tracker t;
  const auto t0 = std::chrono::steady_clock::now();
  const SimConfig sim{1000000, 20240601};
  double worst = 0.0;
  int targets = 0;
  const auto record = [&](const McEstimate& e, double analytic, const std::string& what) {
    const double z = std::abs(e.mean - analytic) / e.std_error;
    worst = std::max(worst, z);
    ++targets;
    t.check(z <= 3.0, what + fmt(": |z| = %.2f > 3", z));
  };
  for (double sigma : {0.0, 0.2}) {
    const AssetModel m{1.0, {-0.05, 0.15}, sigma};
    for (double k : {90.0, 100.0, 110.0}) {
      for (auto kind : {OptionKind::call, OptionKind::put}) {
        const OptionTerms terms{100.0, k, 1.0, 0.02, 0.0, kind};
        record(mc_option_price(terms, m, sim), price(terms, m).value,
               std::string(to_string(kind)) + fmt(" K=%.0f sigma=%.1f", k, sigma));
      }
    }
    const OptionTerms fwd{100.0, 100.0, 1.0, 0.02, 0.01};
    record(mc_discounted_forward(fwd, m, sim), 100.0 * std::exp(-0.01), fmt("martingale sigma=%.1f", sigma));
  }
  const RateModel shot{0.5, 0.0, 0.0, 2.0, {0.01, 0.02}};
  const RateModel general{0.5, 0.03, 0.01, 2.0, {0.01, 0.02}};
  for (double T : {1.0, 5.0}) {
    const BondTerms bt{0.0, T, 0.03};
    record(mc_bond_price(shot, bt, sim), bond_price(shot, bt, RateVariant::shot), fmt("shot bond T=%.0f", T));
    record(mc_bond_price(general, bt, sim), bond_price(general, bt), fmt("general bond T=%.0f", T));
  }
  const double secs = seconds_since(t0);
  t.check(secs < 300.0, fmt("runtime %.1f s >= 300 s", secs));
  t.note(fmt("%.0f targets at 1e6 paths, max |z| = %.2f, %.1f s", targets, worst, secs));
  return t.result();
}

Outcome check_greeks_vs_fd() {
  Tracker t;
  double worst = 0.0;
  std::string worst_name;
  int compared = 0;
  for (double sigma : {0.0, 0.2}) {
    for (double lambda : {0.5, 2.0}) {
      for (double nu : {-0.1, 0.05}) {
        for (double k : {85.0, 100.0, 120.0}) {
          for (auto kind : {OptionKind::call, OptionKind::put}) {
            const OptionTerms terms{100.0, k, 1.0, 0.03, 0.01, kind};
            const AssetModel m{lambda, {nu, 0.2}, sigma};
            if (sigma == 0.0 && std::abs(l_parameter(terms, m)) < 0.05) continue;
            for (const auto& c : testing_support::compare_greeks(terms, m)) {
              ++compared;
              if (c.rel > worst) {
                worst = c.rel;
                worst_name = c.name;
              }
            }
          }
        }
      }
    }
  }
  t.check(worst <= 1e-4, fmt("worst relative difference %.3g > 1e-4 (", worst) + worst_name + ")");
  t.note(fmt("%.0f Greek comparisons, worst relative difference %.3g (", compared, worst) +
         worst_name + ")");
  return t.result();
}

Outcome check_identities() {
  Tracker t;
  double worst = 0.0, theta_kappa = 0.0;
  std::string worst_name;
  int count = 0;
  for_model_grid([&](const AssetModel& m) {
    if (m.sigma != 0.0) return;
    for (double k : {85.0, 115.0}) {
      const OptionTerms terms{100.0, k, 1.0, 0.03, 0.01};
      if (std::abs(l_parameter(terms, m)) < 0.05) continue;
      for (const auto& r : identity_report(terms, m, Backend::series, {1e-14})) {
        ++count;
        if (r.name.rfind("theta_kappa", 0) == 0) theta_kappa = std::max(theta_kappa, r.residual);
        if (r.residual > worst) {
          worst = r.residual;
          worst_name = r.name;
        }
      }
    }
  });
  t.check(worst <= 1e-4, fmt("worst identity residual %.3g > 1e-4 (", worst) + worst_name + ")");
  t.check(theta_kappa <= 1e-8, fmt("theta-kappa residual %.3g > 1e-8", theta_kappa));
  t.note(fmt("%.0f identity evaluations, worst residual %.3g (", count, worst) + worst_name +
         fmt("), theta-kappa %.3g", theta_kappa));
  return t.result();
}

Outcome check_diffusion_limit() {
  Tracker t;
  ScalingStudy study;
  study.terms = {100.0, 100.0, 1.0, 0.02, 0.0};
  const auto rows = diffusion_convergence(study);
  const auto& last = rows.back();
  t.check(is_monotone(rows), "errors are not monotone in n");
  t.check(last.price_error <= 1e-2, fmt("price error %.3g > 1%%", last.price_error));
  t.check(last.theta_error <= 1e-2, fmt("theta error %.3g > 1%%", last.theta_error));
  t.check(last.bond_error <= 5e-3, fmt("bond A error %.3g > 0.5%%", last.bond_error));
  t.note(fmt("n=1000: price %.3g, theta %.3g, ", last.price_error, last.theta_error) +
         fmt("bond A %.3g (monotone over n = 1, 10, 100, 1000)", last.bond_error));
  return t.result();
}

Outcome check_term_structure() {
  Tracker t;
  const RateModel general{0.5, 0.03, 0.01, 2.0, {0.01, 0.02}};
  std::vector<BondGridPoint> grid;
  for (double s : {0.5, 1.5, 2.5}) {
    for (double r : {-0.01, 0.03, 0.08}) grid.push_back({s, r});
  }
  double pide = 0.0, ode_b = 0.0, ode_a_closed = 0.0, ode_a_quad = 0.0;
  bool terminal_exact = true;
  for (auto v : {RateVariant::shot, RateVariant::vasicek, RateVariant::general}) {
    pide = std::max(pide, bond_pide_residual(general, v, 3.0, grid, {1e-14}).max_residual);
    for (double T : {1.0, 5.0, 10.0}) {
      const OdeResidual o = ode_residual(general, 0.0, T, v);
      ode_b = std::max(ode_b, o.res_b);
      (v == RateVariant::vasicek ? ode_a_closed : ode_a_quad) =
          std::max(v == RateVariant::vasicek ? ode_a_closed : ode_a_quad, o.res_a);
      terminal_exact = terminal_exact && a_variant(general, T, T, v) == 0.0 &&
                       b_factor(general, T, T) == 0.0 &&
                       bond_price(general, {T, T, 0.05}, v) == 1.0;
    }
  }
  t.check(pide <= 1e-4, fmt("bond PIDE residual %.3g > 1e-4", pide));
  t.check(ode_b <= 1e-6, fmt("B ODE residual %.3g > 1e-6", ode_b));
  t.check(ode_a_closed <= 1e-6, fmt("closed-form A ODE residual %.3g > 1e-6", ode_a_closed));
  t.check(ode_a_quad <= 1e-4, fmt("quadrature A ODE residual %.3g > 1e-4", ode_a_quad));
  t.check(terminal_exact, "A(T,T), B(T,T), P(T,T) not exact");
  t.note(fmt("PIDE %.3g, ODE B %.3g, ", pide, ode_b) +
         fmt("ODE A closed %.3g / quadrature %.3g, terminal values exact", ode_a_closed, ode_a_quad));
  return t.result();
}

Outcome check_moments() {
  Tracker t;
  double algebra = 0.0;
  const RateModel shot{0.5, 0.0, 0.0, 2.0, {0.01, 0.02}};
  for (double h : {0.1, 1.0, 5.0}) {
    for (double r0 : {-0.01, 0.03}) {
      const RateMoments a = conditional_moments(shot, r0, h, RateVariant::shot);
      const RateMoments b = vasicek_moments(shot.a, shot.lambda_r * shot.law.nu / shot.a,
                                            std::sqrt(shot.lambda_r * second_moment(shot.law)), r0, h);
      algebra = std::max({algebra, std::abs(a.mean - b.mean) / std::abs(b.mean),
                          std::abs(a.variance - b.variance) / b.variance});
    }
  }
  t.check(algebra <= 4 * 2.22e-16, fmt("shot vs Vasicek moment formulas differ by %.3g", algebra));
  double worst = 0.0;
  const RateModel general{0.5, 0.03, 0.01, 2.0, {0.01, 0.02}};
  for (const RateModel* m : {&shot, &general}) {
    const auto est = mc_rate_moments(*m, 0.03, 1.0, {1000000, 77});
    const auto exact = conditional_moments(*m, 0.03, 1.0);
    worst = std::max({worst, std::abs(est.mean.mean - exact.mean) / est.mean.std_error,
                      std::abs(est.variance.mean - exact.variance) / est.variance.std_error});
  }
  t.check(worst <= 3.0, fmt("Monte Carlo moments |z| = %.2f > 3", worst));
  t.note(fmt("formula mismatch %.3g (relative), Monte Carlo max |z| = %.2f at 1e6 paths", algebra, worst));
  return t.result();
}

Outcome check_option_pide() {
  Tracker t;
  std::vector<OptionGridPoint> grid;
  for (double s : {80.0, 95.0, 110.0, 130.0}) {
    for (double tau : {0.25, 1.0, 2.0}) grid.push_back({s, tau});
  }
  double worst = 0.0;
  int points = 0;
  for (const AssetModel& m : {AssetModel{1.0, {0.05, 0.1}, 0.0}, AssetModel{0.5, {-0.05, 0.2}, 0.15},
                              AssetModel{1.0, {-0.05, 0.15}, 0.0}}) {
    for (auto kind : {OptionKind::call, OptionKind::put}) {
      const OptionTerms base{100.0, 100.0, 1.0, 0.05, 0.01, kind};
      const ResidualReport r = option_pide_residual(base, grid, m, {1e-14});
      worst = std::max(worst, r.max_residual);
      points += r.grid_points;
    }
  }
  t.check(worst <= 1e-4, fmt("normalized residual %.3g > 1e-4", worst));
  t.note(fmt("max normalized residual %.3g over %.0f interior points", worst, points));
  return t.result();
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) {
    status = -1;
    return out;
  }
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  status = pclose(pipe);
  return out;
}

std::string strip_header(const std::string& csv) {
  std::size_t pos = 0;
  while (pos < csv.size() && csv[pos] == '#') {
    const std::size_t end = csv.find("\r\n", pos);
    if (end == std::string::npos) return {};
    pos = end + 2;
  }
  return csv.substr(pos);
}

Outcome check_reproducibility() {
  Tracker t;
  int runs = 0;
  for (const char* args : {"price", "greeks", "bond", "curve", "limits", "mc --seed 11 --paths 50000",
                           "price --backend fourier"}) {
    const std::string cmd = std::string("\"") + SHOTNOISE_CLI_PATH + "\" " + args;
    int s1 = 0, s2 = 0;
    const std::string a = capture(cmd, s1);
    const std::string b = capture(cmd, s2);
    ++runs;
    t.check(s1 == 0 && s2 == 0, std::string("command failed: ") + args);
    const std::string ba = strip_header(a), bb = strip_header(b);
    t.check(!ba.empty() && ba == bb, std::string("bodies differ: ") + args);
  }
  t.note(fmt("%.0f commands run twice, report bodies byte-identical", runs));
  return t.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"put-call parity on the 81-point grid", check_parity},
      {"Black-Scholes reduction", check_black_scholes_reduction},
      {"shot-noise reduction", check_shot_noise_reduction},
      {"series vs Fourier backends", check_backend_cross_validation},
      {"Monte Carlo concordance", check_monte_carlo},
      {"Greeks vs finite differences", check_greeks_vs_fd},
      {"theta-kappa relation and jump-Greek identities", check_identities},
      {"diffusion limit", check_diffusion_limit},
      {"term-structure identities", check_term_structure},
      {"short-rate moment coincidence", check_moments},
      {"option PIDE residual", check_option_pide},
      {"CLI reproducibility", check_reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("%s %2zu. %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
