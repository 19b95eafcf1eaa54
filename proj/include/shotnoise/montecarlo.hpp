#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "shotnoise/option_pricer.hpp"
#include "shotnoise/shortrate.hpp"

namespace shotnoise {

struct SimConfig {
  std::uint64_t paths = 100000;
  std::uint64_t seed = 20240601;
  bool antithetic = false;
  unsigned threads = 1;  ///< 0 = hardware concurrency; results do not depend on it

  void validate() const;
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t paths_used = 0;
};

/// Jumps of the short rate over one path: times sorted in [t, T].
struct RatePathSample {
  std::vector<double> jump_times;
  std::vector<double> jump_sizes;
  std::size_t count = 0;
};

/// Random stream for one path: xoshiro256++ seeded from SplitMix64 applied to
/// (seed, path index), so every path owns an independent, reproducible stream.
class PathStream {
 public:
  PathStream(std::uint64_t seed, std::uint64_t path_index);

  std::uint64_t next() noexcept;
  /// Uniform on (0, 1); never returns 0 or 1.
  double uniform() noexcept;
  double normal();
  /// Inversion for small means, PTRS transformed rejection otherwise.
  std::uint64_t poisson(double mean);

 private:
  std::array<std::uint64_t, 4> s_{};
};

/// Discounted payoff under the risk-neutral jump (+ diffusion) law.
McEstimate mc_option_price(const OptionTerms& terms, const AssetModel& model, const SimConfig& sim);

/// Mean of e^{-r tau} S_T; equals S e^{-q tau} for a martingale construction.
McEstimate mc_discounted_forward(const OptionTerms& terms, const AssetModel& model,
                                 const SimConfig& sim);

/// E[exp(-int_t^T r ds)] under the general rate model, sampled exactly: jump times and
/// sizes explicitly, the Brownian and drift part as one Gaussian.
McEstimate mc_bond_price(const RateModel& model, const BondTerms& terms, const SimConfig& sim);

RatePathSample sample_rate_jumps(const RateModel& model, double t, double T, PathStream& rng);

struct RateMomentEstimate {
  McEstimate mean;
  McEstimate variance;
};

/// Empirical mean and variance of r(t + horizon) from the exact representation.
RateMomentEstimate mc_rate_moments(const RateModel& model, double r_t, double horizon,
                                   const SimConfig& sim);

}  // namespace shotnoise
