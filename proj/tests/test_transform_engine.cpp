#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"
#include "shotnoise/transform_engine.hpp"

namespace shotnoise {
namespace {

const QuadratureSpec kQuad{};

TEST(CharFunction, Examples) {
  const CharSpec spec{1.0, 2.0, 0.2, {0.1, 0.3}};
  EXPECT_EQ(char_function(spec, 0.0), std::complex<double>(1.0, 0.0));
  const CharSpec flat{1.0, 0.0, 0.0, {0.1, 0.3}};
  for (double k : {-5.0, 0.3, 12.0}) EXPECT_EQ(char_function(flat, k), std::complex<double>(1.0, 0.0));
  for (double k = -30.0; k <= 30.0; k += 0.5) EXPECT_LE(std::abs(char_function(spec, k)), 1.0);
}

TEST(PoissonWeights, Examples) {
  EXPECT_EQ(poisson_weights(0.0, kQuad), std::vector<double>{1.0});
  const auto w = poisson_weights(1.0, kQuad);
  EXPECT_NEAR(w[0], 0.367879441171442322, 1e-16);
  for (double mean : {0.01, 0.25, 1.0, 4.0, 37.5, 400.0, 5000.0}) {
    const auto v = poisson_weights(mean, kQuad);
    const double total = std::accumulate(v.begin(), v.end(), 0.0);
    EXPECT_GE(total, 1.0 - kQuad.rel_tol / 10) << mean;
    EXPECT_LE(total, 1.0 + 1e-12) << mean;
  }
}

TEST(PoissonWeights, TruncationReported) {
  QuadratureSpec q;
  q.n_max = 5;
  EXPECT_THROW(poisson_weights(10.0, q), TruncationError);
  try {
    poisson_weights(3.0, q);
    FAIL();
  } catch (const TruncationError& e) {
    EXPECT_GT(e.achieved_tail(), q.rel_tol / 10);
  }
}

TEST(Cdf, DiffusionOnlyReducesToNormal) {
  const double sigma = 0.25, tau = 0.8;
  const double sd = sigma * std::sqrt(tau);
  const CharSpec spec{tau, 0.0, sigma, {}};
  for (double l : {-0.7, -0.1, 0.0, 0.05, 0.4}) {
    for (auto b : {Backend::series, Backend::fourier}) {
      EXPECT_NEAR(cdf_plain(spec, l, b, kQuad), oracle::phi(l / sd), 1e-10);
      EXPECT_NEAR(cdf_tilted(spec, l, b, kQuad), oracle::phi(l / sd + sd), 1e-10);
    }
  }
}

TEST(Cdf, FarRightIsOne) {
  for (double sigma : {0.0, 0.2}) {
    const CharSpec spec{1.0, 1.5, sigma, {0.05, 0.2}};
    for (auto b : {Backend::series, Backend::fourier}) {
      EXPECT_NEAR(cdf_plain(spec, 40.0, b, kQuad), 1.0, 1e-10);
      EXPECT_NEAR(cdf_tilted(spec, 40.0, b, kQuad), 1.0, 1e-10);
      EXPECT_NEAR(ccdf_plain(spec, 40.0, b, kQuad), 0.0, 1e-10);
    }
  }
}

TEST(Cdf, MatchesIndependentInversion) {
  // plain transform is P(-X <= l); tilted is the same under the exponentially tilted law
  for (double sigma : {0.1, 0.3}) {
    const double lambda = 1.3, nu = -0.08, delta = 0.15, tau = 0.7;
    const CharSpec spec{tau, lambda, sigma, {nu, delta}};
    const double vs = std::expm1(nu + 0.5 * delta * delta);
    for (double l : {-0.6, -0.05, 0.2}) {
      const double plain = 1.0 - oracle::cdf_gil_pelaez(-l, tau, lambda, nu, delta, sigma);
      const double tilted = 1.0 - oracle::cdf_gil_pelaez(-l - sigma * sigma * tau, tau,
                                                         lambda * (1 + vs), nu + delta * delta,
                                                         delta, sigma);
      for (auto b : {Backend::series, Backend::fourier}) {
        EXPECT_NEAR(cdf_plain(spec, l, b, kQuad), plain, 1e-8);
        EXPECT_NEAR(cdf_tilted(spec, l, b, kQuad), tilted, 1e-8);
      }
    }
  }
}

TEST(Cdf, SpecExampleBackendsAgree) {
  const CharSpec spec{1.0, 1.0, 0.0, {0.0, 0.1}};
  EXPECT_NEAR(cdf_plain(spec, 0.05, Backend::series, kQuad),
              cdf_plain(spec, 0.05, Backend::fourier, kQuad), 1e-7);
}

TEST(Cdf, TiltedAtomStep) {
  const CharSpec spec{1.0, 1.0, 0.0, {0.05, 0.1}};
  const double above = cdf_tilted(spec, 0.0, Backend::series, kQuad);
  const double below = cdf_tilted(spec, -1e-300, Backend::series, kQuad);
  const double vs = std::expm1(0.05 + 0.005);
  EXPECT_NEAR(above - below, std::exp(-vs) * std::exp(-1.0), 1e-14);
}

TEST(Cdf, PlainAtomStep) {
  for (double mass : {0.25, 1.0, 4.0}) {
    const CharSpec spec{1.0, mass, 0.0, {-0.1, 0.2}};
    const double jump = cdf_plain(spec, 0.0, Backend::series, kQuad) -
                        cdf_plain(spec, -1e-300, Backend::series, kQuad);
    EXPECT_NEAR(jump, std::exp(-mass), 1e-14);
    const auto s = plain_sensitivities(spec, 0.3, kQuad);
    EXPECT_NEAR(s.atom_weight, std::exp(-mass), 1e-16);
  }
}

TEST(Cdf, Monotone) {
  for (double sigma : {0.0, 0.2}) {
    const CharSpec spec{1.0, 4.0, sigma, {0.1, 0.05}};
    for (auto b : {Backend::series, Backend::fourier}) {
      double prev_p = -1, prev_t = -1;
      for (double l = -1.5; l <= 1.5; l += 0.0625) {
        if (sigma == 0.0 && l == 0.0) continue;
        const double p = cdf_plain(spec, l, b, kQuad);
        const double t = cdf_tilted(spec, l, b, kQuad);
        EXPECT_GE(p, prev_p - 1e-10);
        EXPECT_GE(t, prev_t - 1e-10);
        prev_p = p;
        prev_t = t;
      }
    }
  }
}

TEST(Cdf, ComplementsSumToOne) {
  for (double sigma : {0.0, 0.15}) {
    const CharSpec spec{1.0, 1.0, sigma, {-0.1, 0.3}};
    for (double l : {-1.0, -0.2, 0.3, 1.0}) {
      for (auto b : {Backend::series, Backend::fourier}) {
        const auto p = eval_plain(spec, l, b, kQuad);
        const auto t = eval_tilted(spec, l, b, kQuad);
        EXPECT_NEAR(p.lower + p.upper, 1.0, 1e-9);
        EXPECT_NEAR(t.lower + t.upper, 1.0, 1e-9);
      }
    }
  }
}

TEST(Cdf, FarTailComplementKeepsRelativeAccuracy) {
  const CharSpec spec{1.0, 0.0, 0.2, {}};
  const double v = ccdf_plain(spec, 3.0, Backend::series, kQuad);
  EXPECT_NEAR(v / oracle::phi(-15.0), 1.0, 1e-12);
}

TEST(Cdf, FourierRejectsLattice) {
  const CharSpec spec{1.0, 1.0, 0.0, {0.1, 0.0}};
  EXPECT_THROW(eval_plain(spec, 0.3, Backend::fourier, kQuad), ConvergenceError);
  EXPECT_NO_THROW(eval_plain(spec, 0.3, Backend::series, kQuad));
}

TEST(Cdf, RejectsBadInputs) {
  EXPECT_THROW(eval_plain({0.0, 1.0, 0.1, {}}, 0.0, Backend::series, kQuad), DomainError);
  EXPECT_THROW(eval_plain({1.0, -1.0, 0.1, {}}, 0.0, Backend::series, kQuad), DomainError);
  QuadratureSpec q;
  q.k_nodes = 8;
  EXPECT_THROW(eval_plain({1.0, 1.0, 0.1, {}}, 0.0, Backend::series, q), DomainError);
  q = {};
  q.rel_tol = 0.5;
  EXPECT_THROW(q.validate(), DomainError);
  EXPECT_THROW(parse_backend("spline"), DomainError);
  EXPECT_EQ(parse_backend(to_string(Backend::fourier)), Backend::fourier);
}

TEST(Sensitivities, MatchFiniteDifferences) {
  const QuadratureSpec q{1e-14};
  for (double sigma : {0.0, 0.2}) {
    const CharSpec base{0.9, 1.7, sigma, {-0.06, 0.21}};
    const double l = 0.17;
    for (bool tilted : {false, true}) {
      const auto value = [&](CharSpec s, double at) {
        return tilted ? cdf_tilted(s, at, Backend::series, q) : cdf_plain(s, at, Backend::series, q);
      };
      const auto sens = tilted ? tilted_sensitivities(base, l, q) : plain_sensitivities(base, l, q);
      const double h = 1e-5;
      auto fd = [&](auto set) {
        CharSpec up = base, dn = base;
        set(up, h);
        set(dn, -h);
        return (value(up, l) - value(dn, l)) / (2 * h);
      };
      EXPECT_NEAR(sens.d_lambda, fd([](CharSpec& s, double e) { s.lambda += e; }), 1e-7);
      EXPECT_NEAR(sens.d_nu, fd([](CharSpec& s, double e) { s.law.nu += e; }), 1e-7);
      EXPECT_NEAR(sens.d_delta, fd([](CharSpec& s, double e) { s.law.delta += e; }), 1e-7);
      EXPECT_NEAR(sens.d_tau, fd([](CharSpec& s, double e) { s.tau += e; }), 1e-7);
      if (sigma > 0) {
        EXPECT_NEAR(sens.d_sigma, fd([](CharSpec& s, double e) { s.sigma += e; }), 1e-7);
      }
      EXPECT_NEAR(sens.d_l, (value(base, l + h) - value(base, l - h)) / (2 * h), 1e-7);
    }
  }
}

TEST(Sensitivities, DensityMassDerivative) {
  const QuadratureSpec q{1e-14};
  const CharSpec base{1.0, 2.0, 0.0, {0.02, 0.3}};
  const double l = -0.4, h = 1e-5;
  const auto s = plain_sensitivities(base, l, q);
  CharSpec up = base, dn = base;
  up.lambda += h;
  dn.lambda -= h;
  const double fd = (plain_sensitivities(up, l, q).d_l - plain_sensitivities(dn, l, q).d_l) / (2 * h);
  EXPECT_NEAR(s.d_l_mass, fd / base.tau, 1e-7);
}

TEST(Green, IntegratesToDiscountFactor) {
  const double r = 0.03;
  for (double sigma : {0.0, 0.2}) {
    const CharSpec spec{1.0, 1.5, sigma, {-0.05, 0.2}};
    const auto g = [&](double u) { return green_density(spec, u, r, kQuad); };
    const double cont = numerics::integrate_adaptive(g, -6.0, 6.0, 1e-12, 1e-15).value;
    EXPECT_NEAR(cont + green_atom(spec, r), std::exp(-r), 1e-9);
    for (double u = -2.0; u <= 2.0; u += 0.1) EXPECT_GE(g(u), -1e-12);
  }
}

TEST(Green, ConcentratesAsTauShrinks) {
  double prev = 1e300;
  for (double tau : {1.0, 0.1, 0.01, 0.001}) {
    const double spread = green_spread({tau, 2.0, 0.2, {0.0, 0.1}});
    EXPECT_LT(spread, prev);
    prev = spread;
  }
  EXPECT_LT(prev, 0.01);
}

TEST(Green, RejectsPointMassLaw) {
  EXPECT_THROW(green_density({1.0, 0.0, 0.0, {}}, 0.1, 0.0, kQuad), DomainError);
}

TEST(Green, RawArgumentAppliesDrift) {
  const CharSpec spec{1.0, 1.0, 0.2, {0.0, 0.1}};
  const double r = 0.04, q = 0.01;
  const double shift = (r - q - std::expm1(0.005) - 0.02);
  EXPECT_NEAR(green_density(spec, 0.1, r, kQuad, GreenArgument::raw, q),
              green_density(spec, 0.1 + shift, r, kQuad), 1e-14);
}

}  // namespace
}  // namespace shotnoise
