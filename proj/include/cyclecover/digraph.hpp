#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cyclecover/rng.hpp"

namespace cyclecover {

/// Dense 0-based vertex index. Printed labels are 1-based (see Digraph::label).
using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct Arc {
  VertexId tail = kNoVertex;
  VertexId head = kNoVertex;

  friend auto operator<=>(const Arc&, const Arc&) = default;
};

/// Raised for out-of-range parameters and violated graph invariants.
class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Loop-free simple digraph.
///
/// Vertices are indexed 0..n-1. A plain digraph labels vertex v as "v+1"; a
/// labeled digraph (e.g. a contracted one) carries explicit labels such as
/// "5-19". In both cases vertex ids are sorted by `order_key`, the leading
/// integer of the label, so id order is the ascending label order.
class Digraph {
 public:
  Digraph() = default;
  explicit Digraph(std::size_t n);
  explicit Digraph(std::vector<std::string> labels);

  std::size_t vertex_count() const { return out_.size(); }
  std::size_t arc_count() const { return arcs_.size(); }

  /// Appends an arc. Throws GraphError on a loop, a duplicate or a bad id.
  void add_arc(VertexId tail, VertexId head);
  bool has_arc(VertexId tail, VertexId head) const;

  /// Arcs in insertion order.
  const std::vector<Arc>& arcs() const { return arcs_; }
  /// Out-neighbours of v in insertion order.
  std::span<const VertexId> out(VertexId v) const { return out_.at(v); }
  std::size_t out_degree(VertexId v) const { return out_.at(v).size(); }
  std::size_t in_degree(VertexId v) const { return in_deg_.at(v); }
  std::size_t min_out_degree() const;
  std::size_t min_in_degree() const;

  bool labeled() const { return !labels_.empty(); }
  std::string label(VertexId v) const;
  std::uint64_t order_key(VertexId v) const;
  std::optional<VertexId> find(std::string_view label) const;

  /// Same vertex labels and the same arc set; arc order is ignored.
  bool same_graph(const Digraph& other) const;

 private:
  void check_vertex(VertexId v) const;

  std::vector<std::vector<VertexId>> out_;
  std::vector<std::size_t> in_deg_;
  std::vector<Arc> arcs_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, VertexId> by_label_;
};

/// Lazily enumerates the arcs of the complete loop-free digraph on n vertices
/// in uniformly random order. Reproducible from (n, seed).
class ArcStream {
 public:
  ArcStream(std::size_t n, std::uint64_t seed);

  std::optional<Arc> next();

  std::size_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t emitted() const { return emitted_; }
  std::uint64_t universe() const { return universe_; }

  /// Universes up to this size use a lazy Fisher-Yates shuffle over an
  /// explicit index table; larger ones use rejection against a seen-set.
  static constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 20;

 private:
  Arc decode(std::uint64_t index) const;

  std::size_t n_;
  std::uint64_t seed_;
  std::uint64_t universe_;
  std::uint64_t emitted_ = 0;
  Rng rng_;
  std::vector<std::uint32_t> table_;
  std::unordered_set<std::uint64_t> seen_;
};

/// Throws GraphError when n < 2.
ArcStream gen_arc_stream(std::size_t n, std::uint64_t seed);

/// Shortest prefix of `stream` with every in- and out-degree at least one.
Digraph compute_m_star(ArcStream& stream);
/// Same rule applied to an explicit arc sequence (0-based ids).
Digraph compute_m_star(std::size_t n, std::span<const Arc> arcs);

/// First m arcs of the stream.
Digraph take_prefix(ArcStream& stream, std::size_t m);

/// Parses the `<label>: <t1>, <t2>, ...` adjacency format.
Digraph parse_digraph(std::string_view text);
std::string serialize_digraph(const Digraph& g);

/// Reads a file and parses it. Throws std::runtime_error if unreadable.
Digraph load_digraph(const std::string& path);
std::string read_text_file(const std::string& path);

}  // namespace cyclecover
