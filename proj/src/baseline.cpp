#include "cyclecover/baseline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <utility>

#include "cyclecover/rng.hpp"
#include "cyclecover/verify.hpp"

namespace cyclecover {

std::vector<VertexId> max_bipartite_matching(const Digraph& g) {
  const std::size_t n = g.vertex_count();
  constexpr std::uint32_t kInf = std::numeric_limits<std::uint32_t>::max();
  std::vector<VertexId> match_out(n, kNoVertex);  // tail -> head
  std::vector<VertexId> match_in(n, kNoVertex);   // head -> tail
  std::vector<std::uint32_t> dist(n);
  std::vector<std::size_t> it(n);
  std::vector<VertexId> queue;
  std::vector<VertexId> stack;
  queue.reserve(n);

  // Cheap greedy start; Hopcroft-Karp phases finish the job.
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v : g.out(u)) {
      if (match_in[v] == kNoVertex) {
        match_out[u] = v;
        match_in[v] = u;
        break;
      }
    }
  }

  while (true) {
    queue.clear();
    for (VertexId u = 0; u < n; ++u) {
      if (match_out[u] == kNoVertex) {
        dist[u] = 0;
        queue.push_back(u);
      } else {
        dist[u] = kInf;
      }
    }
    bool found = false;
    for (std::size_t q = 0; q < queue.size(); ++q) {
      const VertexId u = queue[q];
      for (VertexId v : g.out(u)) {
        const VertexId w = match_in[v];
        if (w == kNoVertex) {
          found = true;
        } else if (dist[w] == kInf) {
          dist[w] = dist[u] + 1;
          queue.push_back(w);
        }
      }
    }
    if (!found) break;

    std::fill(it.begin(), it.end(), 0);
    for (VertexId root = 0; root < n; ++root) {
      if (match_out[root] != kNoVertex || dist[root] != 0) continue;
      stack.assign(1, root);
      while (!stack.empty()) {
        const VertexId x = stack.back();
        const auto out = g.out(x);
        if (it[x] == out.size()) {
          dist[x] = kInf;
          stack.pop_back();
          continue;
        }
        const VertexId v = out[it[x]];
        const VertexId w = match_in[v];
        if (w == kNoVertex) {
          for (VertexId y : stack) {
            const VertexId h = g.out(y)[it[y]];
            match_out[y] = h;
            match_in[h] = y;
          }
          break;
        }
        if (dist[w] != kInf && dist[w] == dist[x] + 1) {
          stack.push_back(w);
        } else {
          ++it[x];
        }
      }
    }
  }
  return match_out;
}

std::optional<CycleCover> matching_cover(const Digraph& g) {
  if (g.vertex_count() == 0) return std::nullopt;
  auto match = max_bipartite_matching(g);
  if (std::find(match.begin(), match.end(), kNoVertex) != match.end()) return std::nullopt;
  return CycleCover::from_successors(std::move(match));
}

std::string ComparisonReport::to_csv() const {
  std::ostringstream out;
  out << "n,seed,method,success,cycles,micros\n";
  for (const auto& r : rows) {
    out << r.n << ',' << r.seed << ',' << r.method << ',' << (r.success ? 1 : 0) << ','
        << r.cycles << ',' << static_cast<std::uint64_t>(std::llround(r.micros)) << '\n';
  }
  return out.str();
}

namespace {

double micros_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start)
      .count();
}

}  // namespace

ComparisonReport compare_phase1(const ContractedDigraph& c, std::span<const std::uint64_t> seeds,
                                const EngineConfig& config) {
  ComparisonReport report;
  const Digraph& g = c.graph();
  const std::size_t n = c.original_count();
  for (std::uint64_t seed : seeds) {
    ComparisonRow engine_row{n, seed, "engine", false, 0, 0};
    if (c.trivially_covered()) {
      engine_row.success = true;
      engine_row.cycles = 1;
    } else {
      const auto result = run(c, seed, config);
      engine_row.success = result.ok();
      engine_row.cycles = result.stats.cycles;
      engine_row.micros = result.stats.elapsed_micros;
    }

    ComparisonRow matching_row{n, seed, "matching", false, 0, 0};
    const auto started = std::chrono::steady_clock::now();
    const auto cover = matching_cover(g);
    matching_row.micros = micros_since(started);
    if (cover) {
      if (!validate_cover(g, *cover).valid) {
        throw std::logic_error("matching produced an invalid cover");
      }
      matching_row.success = true;
      matching_row.cycles = cover->cycle_count();
    }
    report.rows.push_back(std::move(engine_row));
    report.rows.push_back(std::move(matching_row));
  }
  return report;
}

std::vector<std::size_t> sweep_sizes(std::size_t n_min, std::size_t n_max, std::size_t steps) {
  if (n_min < 2 || n_max < n_min) throw std::invalid_argument("sweep needs 2 <= n-min <= n-max");
  if (steps == 0) throw std::invalid_argument("sweep needs at least one step");
  std::vector<std::size_t> sizes;
  if (steps == 1 || n_min == n_max) {
    sizes.push_back(n_min);
    return sizes;
  }
  const double ratio = std::log(static_cast<double>(n_max) / static_cast<double>(n_min));
  for (std::size_t i = 0; i < steps; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(steps - 1);
    const auto n = static_cast<std::size_t>(std::llround(static_cast<double>(n_min) * std::exp(ratio * t)));
    if (sizes.empty() || sizes.back() != n) sizes.push_back(n);
  }
  return sizes;
}

ComparisonReport bench_sweep(const SweepConfig& config) {
  struct Job {
    std::size_t n;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t n : sweep_sizes(config.n_min, config.n_max, config.steps)) {
    for (std::size_t k = 0; k < config.trials; ++k) {
      jobs.push_back({n, derive_seed(config.seed, (static_cast<std::uint64_t>(n) << 20) + k)});
    }
  }

  std::vector<ComparisonReport> parts(jobs.size());
  std::vector<char> skipped(jobs.size(), 0);  // not vector<bool>: written from several threads
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t j = first; j < jobs.size(); j += stride) {
      auto stream = gen_arc_stream(jobs[j].n, jobs[j].seed);
      const Digraph g = compute_m_star(stream);
      auto contracted = contract(g);
      if (auto* c = std::get_if<ContractedDigraph>(&contracted)) {
        const std::uint64_t engine_seed = derive_seed(jobs[j].seed, 1);
        parts[j] = compare_phase1(*c, std::span(&engine_seed, 1), config.engine);
        for (auto& row : parts[j].rows) row.seed = jobs[j].seed;
      } else {
        skipped[j] = 1;
      }
    }
  };

  const unsigned workers = std::max(1u, config.workers);
  if (workers == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w, workers);
    for (auto& t : threads) t.join();
  }

  ComparisonReport report;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    if (skipped[j]) ++report.skipped;
    for (auto& row : parts[j].rows) report.rows.push_back(std::move(row));
  }
  return report;
}

std::vector<MedianRow> median_times(const ComparisonReport& report) {
  std::map<std::pair<std::size_t, std::string>, std::pair<std::vector<double>, std::size_t>> groups;
  for (const auto& row : report.rows) {
    auto& [times, runs] = groups[{row.n, row.method}];
    ++runs;
    if (row.success) times.push_back(row.micros);
  }
  std::vector<MedianRow> out;
  for (auto& [key, value] : groups) {
    auto& [times, runs] = value;
    MedianRow m{key.first, key.second, 0, times.size(), runs};
    if (!times.empty()) {
      std::sort(times.begin(), times.end());
      const std::size_t mid = times.size() / 2;
      m.median_micros = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    }
    out.push_back(std::move(m));
  }
  return out;
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("slope needs at least two paired points");
  }
  double mx = 0, my = 0;
  const auto k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0 || y[i] <= 0) throw std::invalid_argument("log-log slope needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw std::invalid_argument("log-log slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace cyclecover
