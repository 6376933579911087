#include "cyclecover/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace cyclecover {

double harmonic(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("harmonic number needs n >= 1");
  // Neumaier summation, smallest terms first.
  double sum = 0.0;
  double compensation = 0.0;
  for (std::uint64_t k = n; k >= 1; --k) {
    const double term = 1.0 / static_cast<double>(k);
    const double t = sum + term;
    if (std::abs(sum) >= std::abs(term)) {
      compensation += (sum - t) + term;
    } else {
      compensation += (term - t) + sum;
    }
    sum = t;
  }
  return sum + compensation;
}

std::size_t count_cycles(std::span<const std::uint32_t> perm) {
  std::vector<bool> seen(perm.size(), false);
  std::size_t cycles = 0;
  for (std::size_t start = 0; start < perm.size(); ++start) {
    if (seen[start]) continue;
    ++cycles;
    for (std::size_t v = start; !seen[v]; v = perm[v]) seen[v] = true;
  }
  return cycles;
}

std::vector<std::uint32_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::uint32_t{0});
  for (std::size_t i = n; i > 1; --i) {
    std::swap(perm[i - 1], perm[rng.below(i)]);
  }
  return perm;
}

std::size_t perm_cycle_count(std::size_t n, Rng& rng) {
  return count_cycles(random_permutation(n, rng));
}

namespace {

// Runs body(first, last, out) over contiguous trial ranges and concatenates
// per-range results in trial order.
template <class T>
std::vector<T> parallel_trials(std::uint64_t trials, unsigned workers,
                               const std::function<void(std::uint64_t, std::uint64_t,
                                                        std::vector<T>&)>& body) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(trials, 1)));
  std::vector<std::vector<T>> parts(workers);
  std::vector<std::thread> threads;
  const std::uint64_t chunk = (trials + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t first = std::min(trials, w * chunk);
    const std::uint64_t last = std::min(trials, first + chunk);
    if (workers == 1) {
      body(first, last, parts[w]);
    } else {
      threads.emplace_back([&, w, first, last] { body(first, last, parts[w]); });
    }
  }
  for (auto& t : threads) t.join();
  std::vector<T> all;
  all.reserve(trials);
  for (auto& part : parts) all.insert(all.end(), part.begin(), part.end());
  return all;
}

}  // namespace

double PermCycleStats::fraction_within(double b) const {
  if (trials == 0 || n < 2) return 0.0;
  const double center = std::log(static_cast<double>(n));
  const double half = b * std::sqrt(center);
  std::uint64_t inside = 0;
  for (std::size_t k = 0; k < histogram.size(); ++k) {
    const double value = static_cast<double>(k);
    if (value >= center - half && value <= center + half) inside += histogram[k];
  }
  return static_cast<double>(inside) / static_cast<double>(trials);
}

PermCycleStats perm_cycle_stats(std::size_t n, std::uint64_t trials, double beta,
                                std::uint64_t seed, unsigned workers) {
  if (n < 1) throw std::invalid_argument("permutation size must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto counts = parallel_trials<std::uint32_t>(
      trials, workers, [&](std::uint64_t first, std::uint64_t last, std::vector<std::uint32_t>& out) {
        std::vector<std::uint32_t> perm(n);
        for (std::uint64_t i = first; i < last; ++i) {
          Rng rng(derive_seed(seed, i));
          std::iota(perm.begin(), perm.end(), std::uint32_t{0});
          for (std::size_t j = n; j > 1; --j) std::swap(perm[j - 1], perm[rng.below(j)]);
          out.push_back(static_cast<std::uint32_t>(count_cycles(perm)));
        }
      });

  PermCycleStats stats;
  stats.n = n;
  stats.trials = trials;
  stats.beta = beta;
  std::uint64_t sum = 0;
  for (auto c : counts) {
    sum += c;
    if (c >= stats.histogram.size()) stats.histogram.resize(c + 1, 0);
    ++stats.histogram[c];
  }
  stats.mean = static_cast<double>(sum) / static_cast<double>(trials);
  double squares = 0.0;
  for (auto c : counts) squares += (c - stats.mean) * (c - stats.mean);
  stats.variance = trials > 1 ? squares / static_cast<double>(trials - 1) : 0.0;
  const double center = std::log(static_cast<double>(n));
  stats.window_low = center - beta * std::sqrt(center);
  stats.window_high = center + beta * std::sqrt(center);
  stats.window_fraction = stats.fraction_within(beta);
  return stats;
}

double window_fraction_clt(std::size_t n, std::uint64_t trials, std::uint64_t seed,
                           unsigned workers) {
  if (n < 100) throw std::invalid_argument("window_fraction_clt needs n >= 100");
  const double beta = std::log(std::log(static_cast<double>(n)));
  return perm_cycle_stats(n, trials, beta, seed, workers).window_fraction;
}

double occupancy_success_estimate(std::size_t n, std::uint64_t t, std::uint64_t trials,
                                  std::uint64_t seed, unsigned workers) {
  if (n < 1) throw std::invalid_argument("occupancy needs n >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  const auto hits = parallel_trials<std::uint8_t>(
      trials, workers, [&](std::uint64_t first, std::uint64_t last, std::vector<std::uint8_t>& out) {
        // Stamps avoid clearing the cell array between trials.
        std::vector<std::uint64_t> stamp(n, 0);
        for (std::uint64_t i = first; i < last; ++i) {
          Rng rng(derive_seed(seed, i));
          std::size_t remaining = n;
          for (std::uint64_t d = 0; d < t && remaining > 0; ++d) {
            auto& cell = stamp[rng.below(n)];
            if (cell != i + 1) {
              cell = i + 1;
              --remaining;
            }
          }
          out.push_back(remaining == 0 ? 1 : 0);
        }
      });
  const auto success = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
  return static_cast<double>(success) / static_cast<double>(trials);
}

double occupancy_poisson(std::size_t n, double t) {
  const double nd = static_cast<double>(n);
  return std::exp(-nd * std::exp(-t / nd));
}

}  // namespace cyclecover
