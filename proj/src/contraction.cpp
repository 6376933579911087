#include "cyclecover/contraction.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <unordered_map>

namespace cyclecover {

ContractedDigraph::ContractedDigraph(Digraph graph, std::vector<SuperVertex> vertices,
                                     std::size_t original_count, bool trivially_covered)
    : graph_(std::move(graph)),
      vertices_(std::move(vertices)),
      orig_to_super_(original_count, kNoVertex),
      original_count_(original_count),
      trivially_covered_(trivially_covered) {
  if (graph_.vertex_count() != vertices_.size()) {
    throw GraphError("contracted graph and super-vertex list disagree in size");
  }
  std::size_t total = 0;
  for (VertexId s = 0; s < vertices_.size(); ++s) {
    for (VertexId v : vertices_[s].chain) {
      if (v >= original_count || orig_to_super_[v] != kNoVertex) {
        throw GraphError("original vertex " + std::to_string(v + 1) +
                         " is missing from or repeated in the super-vertex chains");
      }
      orig_to_super_[v] = s;
      ++total;
    }
  }
  if (total != original_count) throw GraphError("super-vertex chains do not cover every vertex");
}

ContractedDigraph ContractedDigraph::from_labeled(const Digraph& g) {
  std::vector<SuperVertex> vertices;
  std::size_t total = 0;
  for (VertexId s = 0; s < g.vertex_count(); ++s) {
    SuperVertex sv;
    sv.label = g.label(s);
    std::string_view rest = sv.label;
    while (true) {
      const auto dash = rest.find('-');
      const auto part = rest.substr(0, dash);
      std::uint64_t value = 0;
      std::from_chars(part.data(), part.data() + part.size(), value);
      if (value == 0) throw GraphError("vertex label '" + sv.label + "' names vertex 0");
      sv.chain.push_back(static_cast<VertexId>(value - 1));
      if (dash == std::string_view::npos) break;
      rest = rest.substr(dash + 1);
    }
    total += sv.chain.size();
    vertices.push_back(std::move(sv));
  }
  // The constructor rejects members outside 1..total or repeated members.
  return ContractedDigraph(g, std::move(vertices), total);
}

namespace {

enum class Rule { Out, In };

class Contractor {
 public:
  Contractor(const Digraph& g, WorklistOrder order)
      : g_(g),
        order_(order),
        n_(g.vertex_count()),
        alive_(g.arc_count(), true),
        forced_(g.arc_count(), false),
        out_arcs_(n_),
        in_arcs_(n_),
        live_out_(n_, 0),
        live_in_(n_, 0),
        next_(n_, kNoVertex),
        prev_(n_, kNoVertex),
        other_end_(n_),
        chain_len_(n_, 1) {
    const auto& arcs = g.arcs();
    for (std::uint32_t id = 0; id < arcs.size(); ++id) {
      out_arcs_[arcs[id].tail].push_back(id);
      in_arcs_[arcs[id].head].push_back(id);
      ++live_out_[arcs[id].tail];
      ++live_in_[arcs[id].head];
      index_.emplace(key(arcs[id].tail, arcs[id].head), id);
    }
    for (VertexId v = 0; v < n_; ++v) other_end_[v] = v;
  }

  ContractionResult run() {
    for (VertexId v = 0; v < n_; ++v) {
      if (live_out_[v] == 0 || live_in_[v] == 0) {
        throw GraphError("contraction needs every in- and out-degree >= 1; vertex " + g_.label(v) +
                         " violates it");
      }
      if (live_out_[v] == 1) work_.emplace_back(v, Rule::Out);
      if (live_in_[v] == 1) work_.emplace_back(v, Rule::In);
    }
    while (!work_.empty() && !failure_) {
      std::pair<VertexId, Rule> item;
      if (order_ == WorklistOrder::Fifo) {
        item = work_.front();
        work_.pop_front();
      } else {
        item = work_.back();
        work_.pop_back();
      }
      process(item.first, item.second);
    }
    if (failure_) return *failure_;
    return assemble();
  }

 private:
  static std::uint64_t key(VertexId u, VertexId v) { return (std::uint64_t{u} << 32) | v; }

  void fail(VertexId v, std::string message) {
    if (!failure_) {
      failure_ = ContractionFailure{ContractionFailureKind::Infeasible, {}, v, std::move(message)};
    }
  }

  std::uint32_t unique_live(const std::vector<std::uint32_t>& ids) const {
    for (auto id : ids) {
      if (alive_[id]) return id;
    }
    return static_cast<std::uint32_t>(-1);
  }

  void process(VertexId v, Rule rule) {
    if (rule == Rule::Out) {
      if (next_[v] != kNoVertex) return;
      if (live_out_[v] == 0) return fail(v, "vertex " + g_.label(v) + " has no out-arc left");
      if (live_out_[v] == 1) force(unique_live(out_arcs_[v]));
    } else {
      if (prev_[v] != kNoVertex) return;
      if (live_in_[v] == 0) return fail(v, "vertex " + g_.label(v) + " has no in-arc left");
      if (live_in_[v] == 1) force(unique_live(in_arcs_[v]));
    }
  }

  void force(std::uint32_t id) {
    const Arc arc = g_.arcs()[id];
    const VertexId x = arc.tail;
    const VertexId y = arc.head;
    if (next_[x] != kNoVertex || prev_[y] != kNoVertex) {
      return fail(x, "forced arcs collide at (" + g_.label(x) + ", " + g_.label(y) + ")");
    }
    forced_[id] = true;
    next_[x] = y;
    prev_[y] = x;
    for (auto other : in_arcs_[y]) {
      if (other != id && alive_[other]) kill(other);
    }
    for (auto other : out_arcs_[x]) {
      if (other != id && alive_[other]) kill(other);
    }
    if (failure_) return;

    // x is the tail of its chain, y the head of its chain.
    const VertexId head = other_end_[x];
    const VertexId tail = other_end_[y];
    if (head == y) return;  // closes a forced cycle; classified in assemble()
    const std::size_t len = chain_len_[head] + chain_len_[tail];
    other_end_[head] = tail;
    other_end_[tail] = head;
    chain_len_[head] = chain_len_[tail] = len;
    if (len < n_) {
      // An arc from the chain's tail back to its head closes a cycle shorter
      // than n. If the degree rules would force it, that cycle is the failure.
      if (auto it = index_.find(key(tail, head)); it != index_.end() && alive_[it->second]) {
        if (live_out_[tail] == 1 || live_in_[head] == 1) return fail_cycle(head);
        kill(it->second);
      }
    }
  }

  void fail_cycle(VertexId head) {
    std::vector<VertexId> cycle;
    for (VertexId u = head; u != kNoVertex; u = next_[u]) cycle.push_back(u);
    std::rotate(cycle.begin(), std::min_element(cycle.begin(), cycle.end()), cycle.end());
    failure_ = ContractionFailure{ContractionFailureKind::ForcedCycle, cycle, cycle.front(),
                                  cycle_message(cycle)};
  }

  std::string cycle_message(const std::vector<VertexId>& cycle) const {
    std::string text = "forced arcs close the cycle (";
    for (std::size_t i = 0; i < cycle.size(); ++i) text += (i ? " " : "") + g_.label(cycle[i]);
    return text + ") on " + std::to_string(cycle.size()) + " of " + std::to_string(n_) + " vertices";
  }

  void kill(std::uint32_t id) {
    if (forced_[id]) {
      const Arc arc = g_.arcs()[id];
      return fail(arc.tail, "forced arc (" + g_.label(arc.tail) + ", " + g_.label(arc.head) +
                                ") conflicts with another forced arc");
    }
    alive_[id] = false;
    const Arc arc = g_.arcs()[id];
    if (--live_out_[arc.tail] <= 1) work_.emplace_back(arc.tail, Rule::Out);
    if (--live_in_[arc.head] <= 1) work_.emplace_back(arc.head, Rule::In);
  }

  ContractionResult assemble() {
    std::vector<bool> seen(n_, false);
    std::vector<std::vector<VertexId>> chains;
    for (VertexId v = 0; v < n_; ++v) {
      if (prev_[v] != kNoVertex) continue;
      auto& chain = chains.emplace_back();
      for (VertexId u = v; u != kNoVertex; u = next_[u]) {
        seen[u] = true;
        chain.push_back(u);
      }
    }
    // Whatever is left lies on forced cycles; the first found has the smallest vertex.
    for (VertexId v = 0; v < n_; ++v) {
      if (seen[v]) continue;
      std::vector<VertexId> cycle;
      for (VertexId u = v; !seen[u]; u = next_[u]) {
        seen[u] = true;
        cycle.push_back(u);
      }
      if (cycle.size() == n_) {
        SuperVertex sv{cycle, join_labels(cycle)};
        ContractedDigraph c(Digraph(std::vector<std::string>{sv.label}), {sv}, n_, true);
        record(c);
        return c;
      }
      return ContractionFailure{ContractionFailureKind::ForcedCycle, cycle, cycle.front(),
                                cycle_message(cycle)};
    }

    std::vector<SuperVertex> vertices;
    std::vector<std::string> labels;
    std::vector<VertexId> super(n_, kNoVertex);
    for (auto& chain : chains) {
      for (VertexId v : chain) super[v] = static_cast<VertexId>(vertices.size());
      labels.push_back(join_labels(chain));
      vertices.push_back({std::move(chain), labels.back()});
    }
    Digraph contracted(std::move(labels));
    const auto& arcs = g_.arcs();
    for (std::uint32_t id = 0; id < arcs.size(); ++id) {
      if (!alive_[id] || forced_[id]) continue;
      const VertexId s = super[arcs[id].tail];
      const VertexId t = super[arcs[id].head];
      if (s == t) throw std::logic_error("contraction left an arc inside a chain");
      contracted.add_arc(s, t);
    }
    ContractedDigraph c(std::move(contracted), std::move(vertices), n_);
    record(c);
    return c;
  }

  void record(ContractedDigraph& c) const {
    const auto& arcs = g_.arcs();
    for (std::uint32_t id = 0; id < arcs.size(); ++id) {
      if (forced_[id]) c.forced_arcs.push_back(arcs[id]);
      if (!alive_[id]) c.deleted_arcs.push_back(arcs[id]);
    }
  }

  std::string join_labels(const std::vector<VertexId>& chain) const {
    std::string label;
    for (std::size_t i = 0; i < chain.size(); ++i) {
      if (i > 0) label += '-';
      label += g_.label(chain[i]);
    }
    return label;
  }

  const Digraph& g_;
  WorklistOrder order_;
  std::size_t n_;
  std::vector<bool> alive_;
  std::vector<bool> forced_;
  std::vector<std::vector<std::uint32_t>> out_arcs_;
  std::vector<std::vector<std::uint32_t>> in_arcs_;
  std::vector<std::size_t> live_out_;
  std::vector<std::size_t> live_in_;
  std::vector<VertexId> next_;
  std::vector<VertexId> prev_;
  std::vector<VertexId> other_end_;
  std::vector<std::size_t> chain_len_;
  std::unordered_map<std::uint64_t, std::uint32_t> index_;
  std::deque<std::pair<VertexId, Rule>> work_;
  std::optional<ContractionFailure> failure_;
};

}  // namespace

ContractionResult contract(const Digraph& g, WorklistOrder order) {
  return Contractor(g, order).run();
}

CycleCover expand_cover(const ContractedDigraph& c, const CycleCover& cover) {
  const auto& g = c.graph();
  if (cover.succ.size() != c.n_prime() || !is_permutation(cover.succ)) {
    throw ContractViolation("cover is not a permutation of the contracted vertices");
  }
  for (VertexId s = 0; s < cover.succ.size(); ++s) {
    if (cover.succ[s] == s) {
      throw ContractViolation("cover maps " + g.label(s) + " to itself");
    }
    if (!g.has_arc(s, cover.succ[s])) {
      throw ContractViolation("cover uses (" + g.label(s) + ", " + g.label(cover.succ[s]) +
                              "), which is not an arc of the contracted graph");
    }
  }
  std::vector<VertexId> succ(c.original_count(), kNoVertex);
  for (VertexId s = 0; s < c.n_prime(); ++s) {
    const auto& chain = c.vertex(s).chain;
    for (std::size_t i = 0; i + 1 < chain.size(); ++i) succ[chain[i]] = chain[i + 1];
    succ[chain.back()] = c.vertex(cover.succ[s]).head();
  }
  return CycleCover::from_successors(std::move(succ));
}

CycleCover trivial_cover(const ContractedDigraph& c) {
  if (!c.trivially_covered()) throw ContractViolation("contraction is not trivially covered");
  const auto& chain = c.vertex(0).chain;
  std::vector<VertexId> succ(c.original_count(), kNoVertex);
  for (std::size_t i = 0; i < chain.size(); ++i) succ[chain[i]] = chain[(i + 1) % chain.size()];
  return CycleCover::from_successors(std::move(succ));
}

}  // namespace cyclecover
