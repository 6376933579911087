#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cyclecover/cover.hpp"
#include "cyclecover/digraph.hpp"

namespace cyclecover {

/// A chain of original vertices joined by forced arcs ("r-vertex").
struct SuperVertex {
  std::vector<VertexId> chain;
  std::string label;

  VertexId head() const { return chain.front(); }
  VertexId tail() const { return chain.back(); }
};

/// Raised when a cover handed to expand_cover is not valid on the contracted graph.
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The digraph obtained by merging forced chains into super-vertices.
///
/// `graph()` is a labeled Digraph whose vertex ids index `vertices()`; each arc
/// (S, T) stands for the original arc (S.tail, T.head).
class ContractedDigraph {
 public:
  ContractedDigraph(Digraph graph, std::vector<SuperVertex> vertices, std::size_t original_count,
                    bool trivially_covered = false);

  /// Reads hyphenated labels as chains of original vertices 1..N.
  static ContractedDigraph from_labeled(const Digraph& g);

  const Digraph& graph() const { return graph_; }
  std::span<const SuperVertex> vertices() const { return vertices_; }
  const SuperVertex& vertex(VertexId s) const { return vertices_.at(s); }
  std::size_t n_prime() const { return vertices_.size(); }
  std::size_t original_count() const { return original_count_; }
  VertexId super_of(VertexId original) const { return orig_to_super_.at(original); }

  /// The forced arcs close one cycle through all original vertices; n' = 1.
  bool trivially_covered() const { return trivially_covered_; }

  /// Original arcs forced into chains, and arcs removed by the fixpoint.
  std::vector<Arc> forced_arcs;
  std::vector<Arc> deleted_arcs;

 private:
  Digraph graph_;
  std::vector<SuperVertex> vertices_;
  std::vector<VertexId> orig_to_super_;
  std::size_t original_count_;
  bool trivially_covered_;
};

enum class ContractionFailureKind {
  ForcedCycle,  ///< forced arcs close a cycle shorter than n
  Infeasible,   ///< a vertex lost every in- or out-arc, or two forced arcs collide
};

struct ContractionFailure {
  ContractionFailureKind kind;
  std::vector<VertexId> cycle;  ///< original vertices of the offending cycle (ForcedCycle)
  VertexId vertex = kNoVertex;  ///< offending vertex (Infeasible)
  std::string message;
};

enum class WorklistOrder { Fifo, Lifo };

using ContractionResult = std::variant<ContractedDigraph, ContractionFailure>;

/// Forces every arc that must lie on any Hamilton cycle, deletes arcs that can
/// lie on none, and merges forced chains. Requires min in/out-degree >= 1.
ContractionResult contract(const Digraph& g, WorklistOrder order = WorklistOrder::Fifo);

/// Replaces each super-vertex of a cover on `c` by its chain. Throws
/// ContractViolation if `cover` is not a fixed-point-free cover of c.graph().
CycleCover expand_cover(const ContractedDigraph& c, const CycleCover& cover);

/// The single forced cycle of a trivially covered contraction.
CycleCover trivial_cover(const ContractedDigraph& c);

}  // namespace cyclecover
