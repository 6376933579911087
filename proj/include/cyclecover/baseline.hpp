#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyclecover/contraction.hpp"
#include "cyclecover/cover.hpp"
#include "cyclecover/digraph.hpp"
#include "cyclecover/engine.hpp"

namespace cyclecover {

/// Maximum matching between out-copies and in-copies of the vertices
/// (Hopcroft-Karp). match[v] is the head matched to tail v, or kNoVertex.
std::vector<VertexId> max_bipartite_matching(const Digraph& g);

/// A cycle cover read off a perfect matching, or nullopt (no cover exists).
std::optional<CycleCover> matching_cover(const Digraph& g);

struct ComparisonRow {
  std::size_t n = 0;  ///< original vertex count of the instance
  std::uint64_t seed = 0;
  std::string method;  ///< "engine" or "matching"
  bool success = false;
  std::size_t cycles = 0;
  double micros = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  std::size_t skipped = 0;  ///< instances whose contraction failed

  std::string to_csv() const;
};

/// Runs the engine with each seed and the matcher on the same contracted
/// instance. Throws std::logic_error if either method returns an invalid cover.
ComparisonReport compare_phase1(const ContractedDigraph& c, std::span<const std::uint64_t> seeds,
                                const EngineConfig& config = {});

struct SweepConfig {
  std::size_t n_min = 1024;
  std::size_t n_max = 1u << 17;
  std::size_t steps = 8;  ///< geometrically spaced sizes from n_min to n_max
  std::size_t trials = 5;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  EngineConfig engine;
};

/// The sizes a sweep visits, rounded to integers and deduplicated.
std::vector<std::size_t> sweep_sizes(std::size_t n_min, std::size_t n_max, std::size_t steps);

/// For every size and trial: sample D_{m*}, contract, compare. Instance
/// (n, k) uses seed derive_seed(config.seed, n * 2^20 + k).
ComparisonReport bench_sweep(const SweepConfig& config);

struct MedianRow {
  std::size_t n = 0;
  std::string method;
  double median_micros = 0;
  std::size_t successes = 0;
  std::size_t runs = 0;
};

/// Median wall time per (n, method), successful runs only, sorted by n then method.
std::vector<MedianRow> median_times(const ComparisonReport& report);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

}  // namespace cyclecover
