#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cyclecover/rng.hpp"

namespace cyclecover {

/// H_n = 1 + 1/2 + ... + 1/n with compensated summation. Throws
/// std::invalid_argument for n = 0.
double harmonic(std::uint64_t n);

/// Number of disjoint cycles of a 0-based permutation, fixed points included.
std::size_t count_cycles(std::span<const std::uint32_t> perm);

/// Uniform permutation of 0..n-1 (Fisher-Yates).
std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng);

/// Cycle count of one uniform random permutation of n points.
std::size_t perm_cycle_count(std::size_t n, Rng& rng);

struct PermCycleStats {
  std::size_t n = 0;
  std::uint64_t trials = 0;
  double mean = 0;
  double variance = 0;  ///< sample variance (divisor trials - 1)
  std::vector<std::uint64_t> histogram;  ///< histogram[k] = trials with k cycles
  double beta = 0;
  double window_low = 0;
  double window_high = 0;
  double window_fraction = 0;

  /// Fraction of trials whose count lies in [ln n - b sqrt(ln n), ln n + b sqrt(ln n)].
  double fraction_within(double b) const;
};

/// Samples `trials` uniform permutations. Trial i draws from its own stream
/// derive_seed(seed, i), so results do not depend on `workers` (0 = hardware).
PermCycleStats perm_cycle_stats(std::size_t n, std::uint64_t trials, double beta,
                                std::uint64_t seed, unsigned workers = 0);

/// Fraction of sampled permutations whose cycle count is within
/// ln(ln n) * sqrt(ln n) of ln n. Requires n >= 100.
double window_fraction_clt(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                           unsigned workers = 0);

/// Monte Carlo probability that t uniform draws over n cells hit every cell.
double occupancy_success_estimate(std::size_t n, std::uint64_t t, std::uint64_t trials,
                                  std::uint64_t seed, unsigned workers = 0);

/// Poisson approximation exp(-n e^{-t/n}) of the same probability.
double occupancy_poisson(std::size_t n, double t);

}  // namespace cyclecover
