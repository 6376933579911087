#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cyclecover/cover.hpp"
#include "cyclecover/digraph.hpp"

namespace cyclecover {

enum class CoverClause {
  Total,           ///< every vertex has a successor inside the vertex set
  Bijective,       ///< no vertex is the successor of two vertices
  FixedPointFree,  ///< no vertex is its own successor
  ArcsInGraph,     ///< every (v, succ(v)) is an arc
  Partition,       ///< the cycles cover every vertex exactly once
};

std::string_view to_string(CoverClause clause);

struct CoverViolation {
  CoverClause clause;
  VertexId vertex = kNoVertex;
  VertexId target = kNoVertex;
  std::string detail;
};

struct ValidityReport {
  bool valid = true;
  std::vector<CoverViolation> violations;
  /// Lengths of the cycles in canonical order; empty unless succ is a permutation.
  std::vector<std::size_t> cycle_lengths;

  bool violates(CoverClause clause) const;
};

ValidityReport validate_cover(const Digraph& g, std::span<const VertexId> succ);
ValidityReport validate_cover(const Digraph& g, const CycleCover& cover);

/// Largest graph brute_force_cover accepts.
inline constexpr std::size_t kBruteForceLimit = 10;

/// Every cycle cover of g as a successor map, in lexicographic order.
/// Throws GraphError when g has more than kBruteForceLimit vertices.
std::vector<std::vector<VertexId>> brute_force_cover(const Digraph& g);

/// Membership test against a brute_force_cover result.
bool contains_cover(const std::vector<std::vector<VertexId>>& covers,
                    std::span<const VertexId> succ);

}  // namespace cyclecover
