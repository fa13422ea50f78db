#pragma once

// Stochastic validation: Metropolis flip dynamics on double-diamond tilings
// under the a-weight, exact domino shuffling for single diamonds, and
// batch-means statistics.

#include <cstdint>
#include <random>

#include "aztac/geometry.hpp"

namespace aztac {

struct ChainConfig {
  std::uint64_t master_seed = 1;
  long burnin_sweeps = 0;   // 0 means the 20 n^3 default
  long samples = 1000;
  long thinning = 0;        // proposals between samples; 0 means one sweep
  int chains = 1;

  void validate() const;
};

// Portable uniform in [0,1): identical across platforms for a given engine
// state (std::uniform_real_distribution is implementation-defined).
inline double uniform01(std::mt19937_64& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}

struct FlipMove {
  int cell_idx;      // lower-left cell of the 2x2 block
  bool to_vertical;  // horizontal pair -> vertical pair when true
};

// All 2x2 blocks currently covered by two parallel dominoes.
std::vector<FlipMove> list_flips(const Tiling& t);

// Apply a flip in place on the partner vector (undoing it restores the
// tiling exactly).
Tiling apply_flip(const Tiling& t, const FlipMove& mv);

// One Metropolis proposal: uniform random flip, accepted with probability
// min(1, a^{delta vertical}); returns the (possibly unchanged) state.
Tiling mcmc_step(const Tiling& t, double a, std::mt19937_64& rng);

// Exact sample of the a-weighted measure on the order-n Aztec diamond by
// domino shuffling (creation bias: vertical pair with probability
// a^2/(1+a^2)).
Tiling shuffle_single_aztec(const Region& region, double a,
                            std::mt19937_64& rng);

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  long samples = 0;
};

// Batch-means standard error (16 batches); deterministic given the input.
Estimate estimate(const std::vector<double>& values);

// Convenience driver: run `cfg.chains` independent flip chains on a double
// diamond and average a per-sample observable.
Estimate run_mcmc(const Region& region, double a, const ChainConfig& cfg,
                  const std::function<double(const Tiling&)>& observable);

}  // namespace aztac
