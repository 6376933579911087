#include "cyclecover/digraph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <sstream>

namespace cyclecover {

namespace {

std::uint64_t leading_number(std::string_view label) {
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (ec != std::errc{} || ptr == label.data()) {
    throw GraphError("vertex label '" + std::string(label) + "' does not start with a number");
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// digits ('-' digits)*
bool well_formed_label(std::string_view s) {
  if (s.empty()) return false;
  bool need_digit = true;
  for (char ch : s) {
    if (ch >= '0' && ch <= '9') {
      need_digit = false;
    } else if (ch == '-' && !need_digit) {
      need_digit = true;
    } else {
      return false;
    }
  }
  return !need_digit;
}

std::vector<std::uint64_t> chain_members(std::string_view label) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= label.size()) {
    const auto dash = label.find('-', start);
    const auto part = label.substr(start, dash == std::string_view::npos ? label.size() - start
                                                                         : dash - start);
    out.push_back(leading_number(part));
    if (dash == std::string_view::npos) break;
    start = dash + 1;
  }
  return out;
}

struct RawLine {
  std::size_t line_no;
  std::string head;
  std::vector<std::string> targets;
};

}  // namespace

// ---------------------------------------------------------------- Digraph

Digraph::Digraph(std::size_t n) : out_(n), in_deg_(n, 0) {}

Digraph::Digraph(std::vector<std::string> labels)
    : out_(labels.size()), in_deg_(labels.size(), 0), labels_(std::move(labels)) {
  std::uint64_t previous = 0;
  for (VertexId v = 0; v < labels_.size(); ++v) {
    const auto key = leading_number(labels_[v]);
    if (v > 0 && key <= previous) {
      throw GraphError("vertex labels must be in strictly ascending order");
    }
    previous = key;
    if (!by_label_.emplace(labels_[v], v).second) {
      throw GraphError("duplicate vertex label '" + labels_[v] + "'");
    }
  }
}

void Digraph::check_vertex(VertexId v) const {
  if (v >= out_.size()) {
    throw GraphError("vertex id " + std::to_string(v) + " out of range");
  }
}

void Digraph::add_arc(VertexId tail, VertexId head) {
  check_vertex(tail);
  check_vertex(head);
  if (tail == head) throw GraphError("self-loop at " + label(tail));
  if (has_arc(tail, head)) {
    throw GraphError("duplicate arc (" + label(tail) + ", " + label(head) + ")");
  }
  out_[tail].push_back(head);
  ++in_deg_[head];
  arcs_.push_back({tail, head});
}

bool Digraph::has_arc(VertexId tail, VertexId head) const {
  if (tail >= out_.size()) return false;
  const auto& row = out_[tail];
  return std::find(row.begin(), row.end(), head) != row.end();
}

std::size_t Digraph::min_out_degree() const {
  std::size_t best = out_.empty() ? 0 : out_[0].size();
  for (const auto& row : out_) best = std::min(best, row.size());
  return best;
}

std::size_t Digraph::min_in_degree() const {
  return in_deg_.empty() ? 0 : *std::min_element(in_deg_.begin(), in_deg_.end());
}

std::string Digraph::label(VertexId v) const {
  if (!labels_.empty()) return labels_.at(v);
  return std::to_string(std::uint64_t{v} + 1);
}

std::uint64_t Digraph::order_key(VertexId v) const {
  if (!labels_.empty()) return leading_number(labels_.at(v));
  return std::uint64_t{v} + 1;
}

std::optional<VertexId> Digraph::find(std::string_view label) const {
  if (!labels_.empty()) {
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
  }
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(label.data(), label.data() + label.size(), value);
  if (ec != std::errc{} || ptr != label.data() + label.size()) return std::nullopt;
  if (value < 1 || value > out_.size()) return std::nullopt;
  return static_cast<VertexId>(value - 1);
}

bool Digraph::same_graph(const Digraph& other) const {
  if (vertex_count() != other.vertex_count() || arc_count() != other.arc_count()) return false;
  for (VertexId v = 0; v < vertex_count(); ++v) {
    if (label(v) != other.label(v)) return false;
  }
  auto mine = arcs_;
  auto theirs = other.arcs_;
  std::sort(mine.begin(), mine.end());
  std::sort(theirs.begin(), theirs.end());
  return mine == theirs;
}

// ---------------------------------------------------------------- ArcStream

ArcStream::ArcStream(std::size_t n, std::uint64_t seed)
    : n_(n), seed_(seed), universe_(0), rng_(seed) {
  if (n < 2) throw GraphError("arc stream needs n >= 2, got " + std::to_string(n));
  universe_ = static_cast<std::uint64_t>(n) * (n - 1);
  if (universe_ <= kDenseLimit) {
    table_.resize(universe_);
    std::iota(table_.begin(), table_.end(), std::uint32_t{0});
  } else {
    seen_.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(universe_, 4 * n_ * 16)));
  }
}

Arc ArcStream::decode(std::uint64_t index) const {
  const auto tail = static_cast<VertexId>(index / (n_ - 1));
  const auto r = static_cast<VertexId>(index % (n_ - 1));
  return {tail, r < tail ? r : r + 1};
}

std::optional<Arc> ArcStream::next() {
  if (emitted_ == universe_) return std::nullopt;
  std::uint64_t index = 0;
  if (!table_.empty()) {
    const auto pick = emitted_ + rng_.below(universe_ - emitted_);
    std::swap(table_[emitted_], table_[pick]);
    index = table_[emitted_];
  } else {
    do {
      index = rng_.below(universe_);
    } while (!seen_.insert(index).second);
  }
  ++emitted_;
  return decode(index);
}

ArcStream gen_arc_stream(std::size_t n, std::uint64_t seed) { return ArcStream(n, seed); }

// ---------------------------------------------------------------- m*

namespace {

template <class Next>
Digraph m_star_prefix(std::size_t n, Next&& next) {
  if (n < 2) throw GraphError("m* needs n >= 2");
  Digraph g(n);
  std::vector<std::uint32_t> outd(n, 0);
  std::vector<std::uint32_t> ind(n, 0);
  std::size_t missing_out = n;
  std::size_t missing_in = n;
  while (missing_out > 0 || missing_in > 0) {
    std::optional<Arc> arc = next();
    if (!arc) throw std::logic_error("arc stream exhausted before every degree reached 1");
    g.add_arc(arc->tail, arc->head);
    if (outd[arc->tail]++ == 0) --missing_out;
    if (ind[arc->head]++ == 0) --missing_in;
  }
  return g;
}

}  // namespace

Digraph compute_m_star(ArcStream& stream) {
  return m_star_prefix(stream.n(), [&] { return stream.next(); });
}

Digraph compute_m_star(std::size_t n, std::span<const Arc> arcs) {
  std::size_t i = 0;
  return m_star_prefix(n, [&]() -> std::optional<Arc> {
    if (i == arcs.size()) return std::nullopt;
    return arcs[i++];
  });
}

Digraph take_prefix(ArcStream& stream, std::size_t m) {
  if (m > stream.universe()) {
    throw GraphError("requested " + std::to_string(m) + " arcs but only " +
                     std::to_string(stream.universe()) + " exist");
  }
  Digraph g(stream.n());
  for (std::size_t i = 0; i < m; ++i) {
    const auto arc = stream.next();
    g.add_arc(arc->tail, arc->head);
  }
  return g;
}

// ---------------------------------------------------------------- text format

Digraph parse_digraph(std::string_view text) {
  std::vector<RawLine> lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const auto line = trim(text.substr(pos, end - pos));
    ++line_no;
    pos = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(line_no, "missing ':'");
    RawLine raw{line_no, std::string(trim(line.substr(0, colon))), {}};
    if (!well_formed_label(raw.head)) {
      throw ParseError(line_no, "malformed vertex label '" + raw.head + "'");
    }
    auto rest = trim(line.substr(colon + 1));
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto token = trim(rest.substr(0, comma));
      if (!well_formed_label(token)) {
        throw ParseError(line_no, "malformed target label '" + std::string(token) + "'");
      }
      raw.targets.emplace_back(token);
      if (comma == std::string_view::npos) break;
      rest = trim(rest.substr(comma + 1));
      if (rest.empty()) throw ParseError(line_no, "trailing ','");
    }
    lines.push_back(std::move(raw));
    if (end == text.size()) break;
  }

  // A plain digraph names exactly the vertices 1..n.
  bool plain = true;
  std::vector<bool> present(lines.size(), false);
  for (const auto& raw : lines) {
    if (raw.head.find('-') != std::string::npos) {
      plain = false;
      break;
    }
    std::uint64_t value = 0;
    std::from_chars(raw.head.data(), raw.head.data() + raw.head.size(), value);
    if (value < 1 || value > lines.size() || present[value - 1]) {
      plain = false;
      break;
    }
    present[value - 1] = true;
  }

  Digraph g;
  if (plain) {
    g = Digraph(lines.size());
  } else {
    std::vector<std::pair<std::uint64_t, std::size_t>> order;
    std::unordered_map<std::uint64_t, std::size_t> owner;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (auto member : chain_members(lines[i].head)) {
        auto [it, fresh] = owner.emplace(member, i);
        if (!fresh) {
          throw ParseError(lines[i].line_no, "vertex " + std::to_string(member) +
                                                 " already appears on line " +
                                                 std::to_string(lines[it->second].line_no));
        }
      }
      order.emplace_back(leading_number(lines[i].head), i);
    }
    std::sort(order.begin(), order.end());
    std::vector<std::string> labels;
    labels.reserve(order.size());
    for (const auto& entry : order) labels.push_back(lines[entry.second].head);
    g = Digraph(std::move(labels));
  }

  for (const auto& raw : lines) {
    const auto tail = g.find(raw.head);
    for (const auto& target : raw.targets) {
      const auto head = g.find(target);
      if (!head) throw ParseError(raw.line_no, "unknown vertex label '" + target + "'");
      if (*head == *tail) throw ParseError(raw.line_no, "self-loop at '" + target + "'");
      if (g.has_arc(*tail, *head)) {
        throw ParseError(raw.line_no, "duplicate arc (" + raw.head + ", " + target + ")");
      }
      g.add_arc(*tail, *head);
    }
  }
  return g;
}

std::string serialize_digraph(const Digraph& g) {
  std::string out;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    out += g.label(v);
    out += ':';
    bool first = true;
    for (VertexId w : g.out(v)) {
      out += first ? " " : ", ";
      out += g.label(w);
      first = false;
    }
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Digraph load_digraph(const std::string& path) { return parse_digraph(read_text_file(path)); }

}  // namespace cyclecover
