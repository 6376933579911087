#include "cyclecover/verify.hpp"

#include <algorithm>

namespace cyclecover {

std::string_view to_string(CoverClause clause) {
  switch (clause) {
    case CoverClause::Total:
      return "total";
    case CoverClause::Bijective:
      return "bijective";
    case CoverClause::FixedPointFree:
      return "fixed-point-free";
    case CoverClause::ArcsInGraph:
      return "arcs-in-graph";
    case CoverClause::Partition:
      return "partition";
  }
  return "unknown";
}

bool ValidityReport::violates(CoverClause clause) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const CoverViolation& v) { return v.clause == clause; });
}

ValidityReport validate_cover(const Digraph& g, std::span<const VertexId> succ) {
  ValidityReport report;
  const std::size_t n = g.vertex_count();
  auto flag = [&](CoverClause clause, VertexId v, VertexId t, std::string detail) {
    report.valid = false;
    report.violations.push_back({clause, v, t, std::move(detail)});
  };

  if (succ.size() != n) {
    flag(CoverClause::Total, kNoVertex, kNoVertex,
         "successor map has " + std::to_string(succ.size()) + " entries for " +
             std::to_string(n) + " vertices");
  }
  const std::size_t checked = std::min(n, succ.size());
  std::vector<VertexId> first_source(n, kNoVertex);
  for (VertexId v = 0; v < checked; ++v) {
    const VertexId t = succ[v];
    if (t >= n) {
      flag(CoverClause::Total, v, t, g.label(v) + " has no successor in the vertex set");
      continue;
    }
    if (first_source[t] != kNoVertex) {
      flag(CoverClause::Bijective, v, t,
           g.label(t) + " follows both " + g.label(first_source[t]) + " and " + g.label(v));
    } else {
      first_source[t] = v;
    }
    if (t == v) {
      flag(CoverClause::FixedPointFree, v, t, g.label(v) + " is fixed");
    } else if (!g.has_arc(v, t)) {
      flag(CoverClause::ArcsInGraph, v, t,
           "(" + g.label(v) + ", " + g.label(t) + ") is not an arc");
    }
  }

  if (succ.size() == n && is_permutation(succ)) {
    std::size_t covered = 0;
    for (const auto& cycle : cycle_decomposition(succ)) {
      report.cycle_lengths.push_back(cycle.size());
      covered += cycle.size();
    }
    if (covered != n) {
      flag(CoverClause::Partition, kNoVertex, kNoVertex, "cycles do not cover every vertex");
    }
  } else {
    for (VertexId t = 0; t < n; ++t) {
      if (first_source[t] == kNoVertex) {
        flag(CoverClause::Partition, t, kNoVertex, g.label(t) + " lies on no cycle");
      }
    }
  }
  return report;
}

ValidityReport validate_cover(const Digraph& g, const CycleCover& cover) {
  return validate_cover(g, cover.succ);
}

std::vector<std::vector<VertexId>> brute_force_cover(const Digraph& g) {
  const std::size_t n = g.vertex_count();
  if (n > kBruteForceLimit) {
    throw GraphError("brute-force enumeration is limited to " + std::to_string(kBruteForceLimit) +
                     " vertices, got " + std::to_string(n));
  }
  std::vector<std::vector<VertexId>> out_sorted(n);
  for (VertexId v = 0; v < n; ++v) {
    out_sorted[v].assign(g.out(v).begin(), g.out(v).end());
    std::sort(out_sorted[v].begin(), out_sorted[v].end());
  }
  std::vector<std::vector<VertexId>> covers;
  std::vector<VertexId> succ(n, kNoVertex);
  std::vector<bool> used(n, false);

  auto extend = [&](auto&& self, VertexId v) -> void {
    if (v == n) {
      covers.push_back(succ);
      return;
    }
    for (VertexId w : out_sorted[v]) {
      if (used[w]) continue;
      used[w] = true;
      succ[v] = w;
      self(self, v + 1);
      used[w] = false;
    }
  };
  if (n > 0) extend(extend, 0);
  return covers;
}

bool contains_cover(const std::vector<std::vector<VertexId>>& covers,
                    std::span<const VertexId> succ) {
  const std::vector<VertexId> key(succ.begin(), succ.end());
  return std::binary_search(covers.begin(), covers.end(), key);
}

}  // namespace cyclecover
