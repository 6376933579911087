#include "cyclecover/cover.hpp"

namespace cyclecover {

bool is_permutation(std::span<const VertexId> succ) {
  std::vector<bool> hit(succ.size(), false);
  for (VertexId w : succ) {
    if (w >= succ.size() || hit[w]) return false;
    hit[w] = true;
  }
  return true;
}

std::vector<std::vector<VertexId>> cycle_decomposition(std::span<const VertexId> succ) {
  if (!is_permutation(succ)) throw GraphError("successor map is not a permutation");
  std::vector<std::vector<VertexId>> cycles;
  std::vector<bool> seen(succ.size(), false);
  for (VertexId start = 0; start < succ.size(); ++start) {
    if (seen[start]) continue;
    auto& cycle = cycles.emplace_back();
    for (VertexId v = start; !seen[v]; v = succ[v]) {
      seen[v] = true;
      cycle.push_back(v);
    }
  }
  return cycles;
}

CycleCover CycleCover::from_successors(std::vector<VertexId> succ) {
  CycleCover cover;
  cover.cycles = cycle_decomposition(succ);
  cover.succ = std::move(succ);
  return cover;
}

bool CycleCover::has_fixed_point() const {
  for (VertexId v = 0; v < succ.size(); ++v) {
    if (succ[v] == v) return true;
  }
  return false;
}

std::string format_cycles(const CycleCover& cover, const Digraph& g) {
  std::string out;
  for (const auto& cycle : cover.cycles) {
    out += '(';
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (i > 0) out += ' ';
      out += g.label(cycle[i]);
    }
    out += ')';
  }
  return out;
}

}  // namespace cyclecover
