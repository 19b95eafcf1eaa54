#include "shotnoise/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "shotnoise/error.hpp"
#include "shotnoise/numerics.hpp"

namespace shotnoise {

void SimConfig::validate() const {
  if (paths < 1) throw DomainError("SimConfig: paths must be >= 1");
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace

PathStream::PathStream(std::uint64_t seed, std::uint64_t path_index) {
  std::uint64_t mix = seed;
  const std::uint64_t base = splitmix64(mix);
  std::uint64_t state = base ^ (path_index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
  for (auto& word : s_) word = splitmix64(state);
}

std::uint64_t PathStream::next() noexcept {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double PathStream::uniform() noexcept {
  return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
}

double PathStream::normal() { return numerics::normal_quantile(uniform()); }

std::uint64_t PathStream::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) throw DomainError("poisson: mean must be >= 0");
  if (mean == 0.0) return 0;
  if (mean <= 64.0) {
    const double u = uniform();
    double p = std::exp(-mean);
    double cdf = p;
    std::uint64_t k = 0;
    while (u > cdf && k < 10000) {
      ++k;
      p *= mean / static_cast<double>(k);
      cdf += p;
      if (p == 0.0 && cdf < u) break;
    }
    return k;
  }
  const double slam = std::sqrt(mean);
  const double loglam = std::log(mean);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double invalpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = uniform() - 0.5;
    const double v = uniform();
    const double us = 0.5 - std::abs(u);
    const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(invalpha) - std::log(a / (us * us) + b) <=
        -mean + k * loglam - std::lgamma(k + 1.0)) {
      return static_cast<std::uint64_t>(k);
    }
  }
}

namespace {

constexpr std::uint64_t kBlock = 8192;

struct PowerSums {
  numerics::CompensatedSum s1, s2, s3, s4;
  std::uint64_t n = 0;
};

// Runs `samples` independent samples in fixed blocks; each block is reduced on its own and
// blocks are combined in index order, so the result is independent of the thread count.
// Samples are accumulated as powers of (x - shift).
template <typename Sampler>
PowerSums simulate(const SimConfig& sim, std::uint64_t samples, double shift, Sampler sampler) {
  const std::uint64_t blocks = (samples + kBlock - 1) / kBlock;
  std::vector<PowerSums> partial(blocks);
  std::atomic<std::uint64_t> next_block{0};
  const auto worker = [&] {
    for (;;) {
      const std::uint64_t blk = next_block.fetch_add(1);
      if (blk >= blocks) return;
      PowerSums& acc = partial[blk];
      const std::uint64_t lo = blk * kBlock;
      const std::uint64_t hi = std::min(samples, lo + kBlock);
      for (std::uint64_t i = lo; i < hi; ++i) {
        PathStream rng(sim.seed, i);
        const double d = sampler(rng) - shift;
        const double d2 = d * d;
        acc.s1 += d;
        acc.s2 += d2;
        acc.s3 += d2 * d;
        acc.s4 += d2 * d2;
        ++acc.n;
      }
    }
  };
  unsigned threads = sim.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : sim.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(blocks, 1)));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  PowerSums total;
  for (const auto& p : partial) {
    total.s1 += p.s1.value();
    total.s2 += p.s2.value();
    total.s3 += p.s3.value();
    total.s4 += p.s4.value();
    total.n += p.n;
  }
  return total;
}

McEstimate mean_estimate(const PowerSums& ps, double shift, std::uint64_t paths_used) {
  const auto n = static_cast<double>(ps.n);
  const double m1 = ps.s1.value() / n;
  const double var = ps.n > 1 ? std::max(0.0, (ps.s2.value() - n * m1 * m1) / (n - 1.0)) : 0.0;
  return {shift + m1, std::sqrt(var / n), paths_used};
}

std::uint64_t sample_count(const SimConfig& sim) {
  return sim.antithetic ? (sim.paths + 1) / 2 : sim.paths;
}

std::uint64_t paths_used(const SimConfig& sim) {
  return sim.antithetic ? 2 * sample_count(sim) : sim.paths;
}

struct AssetDraw {
  double jumps_mean = 0.0;  // N nu
  double jumps_sd = 0.0;    // sqrt(N) delta
  double z_diff = 0.0;
  double z_jump = 0.0;
};

AssetDraw draw_asset(const AssetModel& model, double tau, PathStream& rng) {
  AssetDraw d;
  const std::uint64_t n = rng.poisson(model.lambda * tau);
  d.jumps_mean = static_cast<double>(n) * model.law.nu;
  d.jumps_sd = std::sqrt(static_cast<double>(n)) * model.law.delta;
  d.z_diff = rng.normal();
  d.z_jump = rng.normal();
  return d;
}

template <typename Payoff>
McEstimate asset_mc(const OptionTerms& terms, const AssetModel& model, const SimConfig& sim,
                    Payoff pay) {
  terms.validate();
  model.validate();
  sim.validate();
  if (terms.tau <= 0.0) throw DegenerateMaturityError("Monte Carlo needs tau > 0");
  const double tau = terms.tau;
  const double x0 = std::log(terms.spot) +
                    (terms.rate - terms.dividend - 0.5 * model.sigma * model.sigma -
                     model.lambda * varsigma(model.law)) *
                        tau;
  const double diff_sd = model.sigma * std::sqrt(tau);
  const double disc = std::exp(-terms.rate * tau);
  const auto terminal = [&](const AssetDraw& d, double sign) {
    return std::exp(x0 + sign * diff_sd * d.z_diff + d.jumps_mean + sign * d.jumps_sd * d.z_jump);
  };
  const auto sampler = [&](PathStream& rng) {
    const AssetDraw d = draw_asset(model, tau, rng);
    if (!sim.antithetic) return disc * pay(terminal(d, 1.0));
    return 0.5 * disc * (pay(terminal(d, 1.0)) + pay(terminal(d, -1.0)));
  };
  const PowerSums ps = simulate(sim, sample_count(sim), 0.0, sampler);
  return mean_estimate(ps, 0.0, paths_used(sim));
}

}  // namespace

McEstimate mc_option_price(const OptionTerms& terms, const AssetModel& model,
                           const SimConfig& sim) {
  const double k = terms.strike;
  if (terms.kind == OptionKind::call) {
    return asset_mc(terms, model, sim, [k](double s) { return std::max(s - k, 0.0); });
  }
  return asset_mc(terms, model, sim, [k](double s) { return std::max(k - s, 0.0); });
}

McEstimate mc_discounted_forward(const OptionTerms& terms, const AssetModel& model,
                                 const SimConfig& sim) {
  return asset_mc(terms, model, sim, [](double s) { return s; });
}

RatePathSample sample_rate_jumps(const RateModel& model, double t, double T, PathStream& rng) {
  RatePathSample out;
  const std::uint64_t n = rng.poisson(model.lambda_r * (T - t));
  out.count = static_cast<std::size_t>(n);
  out.jump_times.resize(out.count);
  out.jump_sizes.resize(out.count);
  for (std::size_t k = 0; k < out.count; ++k) {
    out.jump_times[k] = t + (T - t) * rng.uniform();
    out.jump_sizes[k] = model.law.nu + model.law.delta * rng.normal();
  }
  // Uniform order statistics; sizes are i.i.d. so pairing after the sort is harmless.
  std::sort(out.jump_times.begin(), out.jump_times.end());
  return out;
}

McEstimate mc_bond_price(const RateModel& model, const BondTerms& terms, const SimConfig& sim) {
  model.validate();
  terms.validate();
  sim.validate();
  if (!(terms.t < terms.T)) throw DomainError("mc_bond_price: need t < T");
  const double tau = terms.tenor();
  const double a = model.a;
  const double bb = b_factor(model, terms.t, terms.T);
  const double drift_part = terms.r_t * bb + model.b * (tau - bb);
  const double var_gauss = model.sigma_r * model.sigma_r / (a * a) *
                           (tau - 2.0 * bb - std::expm1(-2.0 * a * tau) / (2.0 * a));
  const double sd_gauss = std::sqrt(std::max(0.0, var_gauss));
  const auto sampler = [&](PathStream& rng) {
    const RatePathSample jumps = sample_rate_jumps(model, terms.t, terms.T, rng);
    numerics::CompensatedSum jump_part;
    for (std::size_t k = 0; k < jumps.count; ++k) {
      jump_part += jumps.jump_sizes[k] * -std::expm1(-a * (terms.T - jumps.jump_times[k])) / a;
    }
    const double z = rng.normal();
    const double base = drift_part + jump_part.value();
    if (!sim.antithetic) return std::exp(-(base + sd_gauss * z));
    return 0.5 * (std::exp(-(base + sd_gauss * z)) + std::exp(-(base - sd_gauss * z)));
  };
  const PowerSums ps = simulate(sim, sample_count(sim), 0.0, sampler);
  return mean_estimate(ps, 0.0, paths_used(sim));
}

RateMomentEstimate mc_rate_moments(const RateModel& model, double r_t, double horizon,
                                   const SimConfig& sim) {
  model.validate();
  sim.validate();
  if (!(horizon > 0.0)) throw DomainError("mc_rate_moments: horizon must be > 0");
  if (sim.antithetic) {
    throw DomainError("mc_rate_moments: antithetic pairs would bias the variance estimate");
  }
  const double a = model.a;
  const double decay = std::exp(-a * horizon);
  const double deterministic = decay * r_t - model.b * std::expm1(-a * horizon);
  const double sd_gauss = model.sigma_r * std::sqrt(-std::expm1(-2.0 * a * horizon) / (2.0 * a));
  const double end = horizon;
  const auto sampler = [&](PathStream& rng) {
    const RatePathSample jumps = sample_rate_jumps(model, 0.0, end, rng);
    numerics::CompensatedSum acc;
    for (std::size_t k = 0; k < jumps.count; ++k) {
      acc += jumps.jump_sizes[k] * std::exp(-a * (end - jumps.jump_times[k]));
    }
    return deterministic + sd_gauss * rng.normal() + acc.value();
  };
  const PowerSums ps = simulate(sim, sim.paths, deterministic, sampler);

  RateMomentEstimate out;
  out.mean = mean_estimate(ps, deterministic, sim.paths);
  const auto n = static_cast<double>(ps.n);
  const double m1 = ps.s1.value() / n;
  const double raw2 = ps.s2.value() / n;
  const double raw3 = ps.s3.value() / n;
  const double raw4 = ps.s4.value() / n;
  const double c2 = std::max(0.0, raw2 - m1 * m1);
  const double c4 = raw4 - 4.0 * m1 * raw3 + 6.0 * m1 * m1 * raw2 - 3.0 * m1 * m1 * m1 * m1;
  const double sample_var = ps.n > 1 ? c2 * n / (n - 1.0) : 0.0;
  out.variance = {sample_var, std::sqrt(std::max(0.0, c4 - c2 * c2) / n), sim.paths};
  return out;
}

}  // namespace shotnoise
