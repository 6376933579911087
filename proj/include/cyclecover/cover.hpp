#pragma once

#include <span>
#include <string>
#include <vector>

#include "cyclecover/digraph.hpp"

namespace cyclecover {

/// A permutation given as a successor map together with its disjoint cycles.
///
/// Cycles are canonical: each starts at its smallest vertex id and the list
/// is sorted by that first vertex.
struct CycleCover {
  std::vector<VertexId> succ;
  std::vector<std::vector<VertexId>> cycles;

  /// Throws GraphError unless `succ` is a permutation of 0..n-1.
  static CycleCover from_successors(std::vector<VertexId> succ);

  std::size_t size() const { return succ.size(); }
  std::size_t cycle_count() const { return cycles.size(); }
  bool has_fixed_point() const;

  friend bool operator==(const CycleCover& a, const CycleCover& b) { return a.succ == b.succ; }
};

bool is_permutation(std::span<const VertexId> succ);

/// Canonical cycle decomposition. Throws GraphError unless `succ` is a permutation.
std::vector<std::vector<VertexId>> cycle_decomposition(std::span<const VertexId> succ);

/// "(1 15 30 ...)(4 18 13 6)" using the graph's labels.
std::string format_cycles(const CycleCover& cover, const Digraph& g);

}  // namespace cyclecover
