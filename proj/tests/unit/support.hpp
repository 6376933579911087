#pragma once

#include <string>
#include <vector>

#include "cyclecover/contraction.hpp"
#include "cyclecover/digraph.hpp"
#include "cyclecover/rng.hpp"

namespace testing {

using namespace cyclecover;

inline std::string fixture(const std::string& name) { return std::string(FIXTURE_DIR) + "/" + name; }

inline const Digraph& example_contracted() {
  static const Digraph g = load_digraph(fixture("example21_contracted.txt"));
  return g;
}

inline VertexId id(const Digraph& g, const std::string& label) {
  auto v = g.find(label);
  if (!v) throw std::runtime_error("no vertex " + label);
  return *v;
}

inline Arc arc(const Digraph& g, const std::string& t, const std::string& h) {
  return {id(g, t), id(g, h)};
}

inline std::vector<Arc> arcs(const Digraph& g,
                             const std::vector<std::pair<std::string, std::string>>& pairs) {
  std::vector<Arc> out;
  for (const auto& [t, h] : pairs) out.push_back(arc(g, t, h));
  return out;
}

inline Digraph complete(std::size_t n) {
  Digraph g(n);
  for (VertexId u = 0; u < n; ++u) {
    for (VertexId v = 0; v < n; ++v) {
      if (u != v) g.add_arc(u, v);
    }
  }
  return g;
}

inline Digraph from_pairs(std::size_t n, const std::vector<std::pair<int, int>>& pairs) {
  Digraph g(n);
  for (auto [t, h] : pairs) g.add_arc(static_cast<VertexId>(t - 1), static_cast<VertexId>(h - 1));
  return g;
}

/// Random digraph with every arc present independently with probability p,
/// redrawn until every in- and out-degree is at least one.
inline Digraph random_min_degree_one(std::size_t n, double p, Rng& rng) {
  while (true) {
    Digraph g(n);
    for (VertexId u = 0; u < n; ++u) {
      for (VertexId v = 0; v < n; ++v) {
        if (u != v && rng.unit() < p) g.add_arc(u, v);
      }
    }
    if (g.min_out_degree() >= 1 && g.min_in_degree() >= 1) return g;
  }
}

/// Random digraph with exactly m arcs, redrawn until min degree >= 1.
inline Digraph random_with_arcs(std::size_t n, std::size_t m, Rng& rng) {
  while (true) {
    auto stream = gen_arc_stream(n, rng());
    Digraph g = take_prefix(stream, m);
    if (g.min_out_degree() >= 1 && g.min_in_degree() >= 1) return g;
  }
}

}  // namespace testing

namespace testing {

/// Parses "(a b c)(d e)" into a successor map on g's labels.
inline std::vector<cyclecover::VertexId> cycles_to_succ(const cyclecover::Digraph& g,
                                                        const std::string& text) {
  std::vector<cyclecover::VertexId> succ(g.vertex_count(), cyclecover::kNoVertex);
  std::size_t pos = 0;
  while ((pos = text.find('(', pos)) != std::string::npos) {
    const auto close = text.find(')', pos);
    std::vector<cyclecover::VertexId> cycle;
    std::string token;
    for (std::size_t i = pos + 1; i <= close; ++i) {
      if (text[i] == ' ' || text[i] == ')') {
        if (!token.empty()) cycle.push_back(id(g, token));
        token.clear();
      } else {
        token += text[i];
      }
    }
    for (std::size_t i = 0; i < cycle.size(); ++i) succ[cycle[i]] = cycle[(i + 1) % cycle.size()];
    pos = close;
  }
  return succ;
}

inline const std::string kPaperCover =
    "(1 15 30 22 5-19 23 28 7-25 3 2 9 17-29 26 24 14 8 12 11 10 16 21 20 27)(4 18 13 6)";

}  // namespace testing
