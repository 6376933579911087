#include "cyclecover/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iterator>
#include <limits>
#include <optional>
#include <stdexcept>
#include <numeric>

#include "cyclecover/verify.hpp"

namespace cyclecover {

// ---------------------------------------------------------------- OrdIndex

OrdIndex::OrdIndex(const Digraph& g) : ord_(g.vertex_count()), pos_(g.vertex_count()) {
  std::vector<std::uint64_t> keys(g.vertex_count());
  for (VertexId v = 0; v < keys.size(); ++v) keys[v] = g.order_key(v);
  std::iota(ord_.begin(), ord_.end(), VertexId{0});
  if (!std::is_sorted(keys.begin(), keys.end())) {
    std::stable_sort(ord_.begin(), ord_.end(),
                     [&](VertexId a, VertexId b) { return keys[a] < keys[b]; });
  }
  for (std::size_t k = 0; k < ord_.size(); ++k) pos_[ord_[k]] = k + 1;
}

VertexId OrdIndex::successor(VertexId v) const {
  const auto k = position(v);
  return k == ord_.size() ? ord_.front() : ord_[k];
}

VertexId OrdIndex::predecessor(VertexId w) const {
  const auto k = position(w);
  return k == 1 ? ord_.back() : ord_[k - 2];
}

// ---------------------------------------------------------------- helpers

std::uint64_t arc_budget(std::size_t n, double alpha, double c_param) {
  const double nd = static_cast<double>(n);
  const double value = 2.0 * (1.0 + alpha) * nd * std::log(c_param * nd);
  return value <= 0 ? 0 : static_cast<std::uint64_t>(std::ceil(value));
}

namespace {

enum class List { Pool, Deleted };

// The two lists of a vertex share its slot range: the pool grows up from the
// front, DELETE grows down from the back.
std::span<VertexId> window(EngineState& s, VertexId u, List which) {
  auto& x = s.vertices[u];
  VertexId* base = s.arcs.data() + x.first;
  if (which == List::Pool) return {base, x.pool_size};
  return {base + x.capacity - x.deleted_size, x.deleted_size};
}

void insert_sorted(EngineState& s, VertexId u, List which, VertexId w) {
  auto& x = s.vertices[u];
  if (x.pool_size + x.deleted_size >= x.capacity) {
    throw std::logic_error("arc slots of a vertex overflowed");
  }
  const auto list = window(s, u, which);
  auto at = std::lower_bound(list.begin(), list.end(), w);
  if (which == List::Pool) {
    std::move_backward(at, list.end(), list.end() + 1);
    *at = w;
    ++x.pool_size;
  } else {
    std::move(list.begin(), at, list.begin() - 1);
    *(at - 1) = w;
    ++x.deleted_size;
  }
}

VertexId remove_at(EngineState& s, VertexId u, List which, std::size_t index) {
  auto& x = s.vertices[u];
  const auto list = window(s, u, which);
  const VertexId head = list[index];
  if (which == List::Pool) {
    std::move(list.begin() + index + 1, list.end(), list.begin() + index);
    --x.pool_size;
  } else {
    std::move_backward(list.begin(), list.begin() + index, list.begin() + index + 1);
    --x.deleted_size;
  }
  return head;
}

bool erase_sorted(EngineState& s, VertexId u, List which, VertexId w) {
  const auto list = window(s, u, which);
  auto it = std::lower_bound(list.begin(), list.end(), w);
  if (it == list.end() || *it != w) return false;
  remove_at(s, u, which, static_cast<std::size_t>(it - list.begin()));
  return true;
}

bool contains_sorted(std::span<const VertexId> list, VertexId v) {
  return std::binary_search(list.begin(), list.end(), v);
}

void adjust(EngineState& s, VertexId t, int delta) {
  auto& x = s.vertices[t];
  if (x.in_count != 1) --s.unbalanced;
  x.in_count = static_cast<std::uint32_t>(static_cast<int>(x.in_count) + delta);
  if (x.in_count != 1) ++s.unbalanced;
}

void retarget(EngineState& s, VertexId from, VertexId to) {
  adjust(s, from, -1);
  adjust(s, to, +1);
}

// Picks the list to draw from, flipping the vertex mode as the rules require.
std::optional<List> select_branch(EngineState& s, VertexId source) {
  auto& x = s.vertices[source];
  if (!x.from_delete) {
    if (x.pool_size != 0) return List::Pool;
    x.from_delete = 1;
    return x.deleted_size == 0 ? std::nullopt : std::optional(List::Deleted);
  }
  if (x.deleted_size != 0) return List::Deleted;
  x.from_delete = 0;
  return x.pool_size == 0 ? std::nullopt : std::optional(List::Pool);
}

}  // namespace

std::size_t EngineState::add_size() const {
  return static_cast<std::size_t>(std::count_if(
      vertices.begin(), vertices.end(), [](const VertexState& x) { return x.add_i != kNoVertex; }));
}

std::string_view to_string(RunFailureKind kind) {
  switch (kind) {
    case RunFailureKind::None:
      return "none";
    case RunFailureKind::BudgetExhausted:
      return "budget-exhausted";
    case RunFailureKind::StuckVertex:
      return "stuck-vertex";
  }
  return "unknown";
}

// ---------------------------------------------------------------- init

EngineSetup init(const Digraph& g, const EngineConfig& config) {
  const std::size_t n = g.vertex_count();
  if (n < 2) {
    throw EngineError("engine needs at least 2 contracted vertices, got " + std::to_string(n));
  }
  EngineSetup setup{OrdIndex(g), {}};
  const auto& ix = setup.ord;
  auto& s = setup.state;
  s.pseudo = VertexSet(n);
  s.vertices.assign(n, {});
  s.unbalanced = 0;
  s.budget = config.budget ? *config.budget : arc_budget(n, config.alpha, config.c_param);

  std::size_t total = 0;
  for (VertexId v = 0; v < n; ++v) {
    auto& x = s.vertices[v];
    x.d0 = ix.successor(v);
    x.d0_pred = ix.predecessor(v);
    x.d0_real = g.has_arc(v, x.d0);
    x.first = static_cast<std::uint32_t>(total);
    const std::size_t capacity = g.out_degree(v) - (x.d0_real ? 1 : 0);
    if (capacity >= (std::size_t{1} << 28)) throw EngineError("vertex degree too large for the engine");
    x.capacity = static_cast<std::uint32_t>(capacity);
    x.pool_size = x.capacity;
    total += capacity;
    if (total > std::numeric_limits<std::uint32_t>::max()) {
      throw EngineError("graph has too many arcs for the engine");
    }
    if (!x.d0_real) s.pseudo.insert(v);
  }
  s.arcs.resize(total);
  for (VertexId v = 0; v < n; ++v) {
    auto* slot = s.arcs.data() + s.vertices[v].first;
    for (VertexId w : g.out(v)) {
      if (w != s.vertices[v].d0) *slot++ = w;
    }
    std::sort(s.arcs.data() + s.vertices[v].first, slot);
  }
  return setup;
}

EngineSetup init(const ContractedDigraph& c, const EngineConfig& config) {
  return init(c.graph(), config);
}

// ---------------------------------------------------------------- choice

ArcChoice choose_arc(EngineState& s, VertexId source, Rng& rng) {
  if (s.arcs_consumed >= s.budget) return {StepStatus::BudgetExhausted, kNoVertex};
  const auto branch = select_branch(s, source);
  if (!branch) return {StepStatus::StuckVertex, kNoVertex};
  const auto size = window(s, source, *branch).size();
  const VertexId head = remove_at(s, source, *branch, static_cast<std::size_t>(rng.below(size)));
  ++s.arcs_consumed;
  return {StepStatus::Continue, head};
}

ArcChoice take_arc(EngineState& s, VertexId source, VertexId head) {
  if (s.arcs_consumed >= s.budget) return {StepStatus::BudgetExhausted, kNoVertex};
  const auto branch = select_branch(s, source);
  if (!branch) return {StepStatus::StuckVertex, kNoVertex};
  if (!erase_sorted(s, source, *branch, head)) {
    throw ReplayDivergence(0, std::string("arc is not on the ") +
                                  (*branch == List::Pool ? "fresh" : "DELETE") +
                                  " branch of its source");
  }
  ++s.arcs_consumed;
  return {StepStatus::Continue, head};
}

// ---------------------------------------------------------------- placement

StepOutcome place_arc(EngineState& s, const OrdIndex&, VertexId u, VertexId w) {
  auto& vs = s.vertices;
  const VertexId previous = vs[u].add_i;
  const VertexId from = previous != kNoVertex ? previous : vs[u].d0;

  // u's old ADD arc leaves ADD: to DELETE on the fresh branch, back to the
  // pool on the cD branch.
  if (previous != kNoVertex) {
    vs[previous].add_t = kNoVertex;
    vs[u].add_i = kNoVertex;
    insert_sorted(s, u, vs[u].from_delete ? List::Pool : List::Deleted, previous);
  }

  StepOutcome outcome;
  outcome.placed = {u, w};
  const VertexId displaced = vs[w].add_t;
  if (displaced != kNoVertex) {
    // w already had an ADD arc into it; its tail loses that arc and must choose again.
    vs[displaced].add_i = kNoVertex;
    vs[w].add_t = kNoVertex;
    insert_sorted(s, displaced, List::Deleted, w);
    retarget(s, w, vs[displaced].d0);
    if (!vs[displaced].d0_real) s.pseudo.insert(displaced);
    outcome.next = displaced;
  } else {
    // w is taken from its D0 predecessor, which continues the chain.
    outcome.next = vs[w].d0_pred;
  }

  vs[u].add_i = w;
  vs[w].add_t = u;
  retarget(s, from, w);
  s.pseudo.erase(u);

  s.current = outcome.next;
  outcome.status = s.pseudo.empty() ? StepStatus::CandidateDone : StepStatus::Continue;
  return outcome;
}

StepOutcome step(EngineState& s, const OrdIndex& ix, Rng& rng) {
  const VertexId u = s.current;
  const ArcChoice choice = choose_arc(s, u, rng);
  if (choice.status != StepStatus::Continue) {
    StepOutcome outcome;
    outcome.status = choice.status;
    outcome.next = u;
    return outcome;
  }
  return place_arc(s, ix, u, choice.head);
}

// ---------------------------------------------------------------- finalize

std::optional<CycleCover> finalize(const EngineState& s, const OrdIndex&, const Digraph& g) {
  const std::size_t n = g.vertex_count();
  std::vector<VertexId> succ(n);
  for (VertexId v = 0; v < n; ++v) {
    succ[v] = s.candidate(v);
    if (succ[v] == v || !g.has_arc(v, succ[v])) return std::nullopt;
  }
  if (!is_permutation(succ)) return std::nullopt;
  return CycleCover::from_successors(std::move(succ));
}

// ---------------------------------------------------------------- invariants

std::vector<std::string> check_invariants(const EngineState& s, const OrdIndex& ix,
                                          const Digraph& g) {
  std::vector<std::string> bad;
  auto arc_text = [&](VertexId u, VertexId w) {
    return "(" + g.label(u) + ", " + g.label(w) + ")";
  };
  const std::size_t n = g.vertex_count();
  std::size_t add_i_count = 0;
  std::size_t add_t_count = 0;
  std::vector<std::uint32_t> counts(n, 0);

  if (s.size() != n) {
    bad.push_back("state has " + std::to_string(s.size()) + " vertices, graph has " +
                  std::to_string(n));
    return bad;
  }

  for (VertexId u = 0; u < n; ++u) {
    const auto& x = s.vertices[u];
    const VertexId w = x.add_i;
    const VertexId d0 = ix.successor(u);
    if (x.d0 != d0 || x.d0_pred != ix.predecessor(u)) bad.push_back("stale D0 links at " + g.label(u));
    if (x.pool_size + x.deleted_size > x.capacity) {
      bad.push_back("arc lists of " + g.label(u) + " overlap");
      continue;
    }
    ++counts[s.candidate(u)];
    if (x.add_t != kNoVertex) ++add_t_count;
    if (w != kNoVertex) {
      ++add_i_count;
      if (w >= n || s.add_t(w) != u) bad.push_back("ADD(t) lacks " + arc_text(u, w));
      if (!g.has_arc(u, w)) bad.push_back("ADD arc " + arc_text(u, w) + " is not in the graph");
      if (w == d0) bad.push_back("ADD holds the D0 arc " + arc_text(u, w));
      if (contains_sorted(s.deleted(u), w)) {
        bad.push_back("arc " + arc_text(u, w) + " is in both ADD and DELETE");
      }
      if (contains_sorted(s.pool(u), w)) {
        bad.push_back("arc " + arc_text(u, w) + " is in both ADD and the pool");
      }
      if (s.pseudo.count(u) != 0) bad.push_back("PSEUDO holds " + g.label(u) + ", which has an ADD arc");
    } else if (!x.d0_real && s.pseudo.count(u) == 0) {
      bad.push_back("pseudo-arc vertex " + g.label(u) + " without ADD arc is missing from PSEUDO");
    }
    if (x.d0_real && s.pseudo.count(u) != 0) {
      bad.push_back("PSEUDO holds arc vertex " + g.label(u));
    }
    if (x.d0_real != g.has_arc(u, d0)) bad.push_back("D0 flag of " + g.label(u) + " is stale");

    // Every out-arc except the D0 arc sits in exactly one of pool, DELETE, ADD.
    std::size_t placed = (w != kNoVertex ? 1 : 0) + (x.d0_real ? 1 : 0);
    for (const auto list : {s.pool(u), s.deleted(u)}) {
      if (!std::is_sorted(list.begin(), list.end())) {
        bad.push_back("arc list of " + g.label(u) + " is unsorted");
      }
      for (VertexId y : list) {
        if (!g.has_arc(u, y) || y == d0) bad.push_back("stray arc " + arc_text(u, y));
      }
      placed += list.size();
    }
    for (VertexId y : s.pool(u)) {
      if (contains_sorted(s.deleted(u), y)) {
        bad.push_back("arc " + arc_text(u, y) + " is in both the pool and DELETE");
      }
    }
    if (placed != g.out_degree(u)) {
      bad.push_back("out-arcs of " + g.label(u) + " are not conserved");
    }
  }
  if (add_i_count != add_t_count) bad.push_back("ADD(i) and ADD(t) differ in size");
  std::size_t unbalanced = 0;
  for (VertexId v = 0; v < n; ++v) {
    if (counts[v] != s.in_count(v)) bad.push_back("stale preimage count at " + g.label(v));
    if (counts[v] != 1) ++unbalanced;
  }
  if (unbalanced != s.unbalanced) bad.push_back("stale unbalanced counter");
  if (s.arcs_consumed > s.budget) bad.push_back("arc budget exceeded");
  return bad;
}

// ---------------------------------------------------------------- run

RunResult run(const Digraph& g, std::uint64_t seed, const EngineConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  auto [ix, s] = init(g, config);
  Rng rng(seed);
  RunResult result;
  result.stats.budget = s.budget;
  result.stats.n_prime = g.vertex_count();

  auto finish = [&] {
    result.stats.arcs_consumed = s.arcs_consumed;
    result.stats.elapsed_micros =
        std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - started)
            .count();
    return result;
  };
  auto accept = [&] {
    auto cover = finalize(s, ix, g);
    if (!cover) return false;
    const auto report = validate_cover(g, cover->succ);
    if (!report.valid) throw std::logic_error("engine accepted an invalid cover");
    result.stats.cycles = cover->cycle_count();
    result.cover = std::move(cover);
    return true;
  };

  if (s.pseudo.empty() && accept()) return finish();

  auto start = s.pseudo.begin();
  std::advance(start, static_cast<std::ptrdiff_t>(rng.below(s.pseudo.size())));
  s.current = *start;

  while (true) {
    const auto outcome = step(s, ix, rng);
    if (outcome.status == StepStatus::BudgetExhausted) {
      result.failure = RunFailureKind::BudgetExhausted;
      return finish();
    }
    if (outcome.status == StepStatus::StuckVertex) {
      result.failure = RunFailureKind::StuckVertex;
      return finish();
    }
    ++result.stats.steps;
    if (config.check_invariants) {
      const auto bad = check_invariants(s, ix, g);
      if (!bad.empty()) {
        throw std::logic_error("engine invariant violated after step " +
                               std::to_string(result.stats.steps) + ": " + bad.front());
      }
    }
    // With PSEUDO empty every vertex off ADD uses a real D0 arc, so the
    // candidate is a cover exactly when it is a permutation.
    if (outcome.status == StepStatus::CandidateDone && s.unbalanced == 0 && accept()) {
      return finish();
    }
  }
}

RunResult run(const ContractedDigraph& c, std::uint64_t seed, const EngineConfig& config) {
  return run(c.graph(), seed, config);
}

// ---------------------------------------------------------------- replay

Snapshot snapshot(const EngineState& s, std::size_t step_index, Arc chosen) {
  Snapshot snap;
  snap.step = step_index;
  snap.chosen = chosen;
  snap.next = s.current;
  snap.pseudo.assign(s.pseudo.begin(), s.pseudo.end());
  for (VertexId u = 0; u < s.size(); ++u) {
    if (s.add_i(u) != kNoVertex) snap.add_i.push_back({u, s.add_i(u)});
  }
  for (VertexId w = 0; w < s.size(); ++w) {
    if (s.add_t(w) != kNoVertex) snap.add_t.push_back({s.add_t(w), w});
  }
  for (VertexId u = 0; u < s.size(); ++u) {
    for (VertexId w : s.deleted(u)) snap.deleted.push_back({u, w});
  }
  snap.arcs_consumed = s.arcs_consumed;
  return snap;
}

ReplayTrace replay(const Digraph& g, std::span<const Arc> script) {
  EngineConfig config;
  config.budget = script.size();
  auto [ix, s] = init(g, config);
  ReplayTrace trace;

  if (s.pseudo.empty()) {
    trace.cover = finalize(s, ix, g);
    if (trace.cover && !script.empty()) {
      throw ReplayDivergence(1, "the seed cycle is already a cover");
    }
  }

  for (std::size_t i = 0; i < script.size(); ++i) {
    const std::size_t step_no = i + 1;
    const Arc arc = script[i];
    if (arc.tail >= g.vertex_count() || arc.head >= g.vertex_count()) {
      throw ReplayDivergence(step_no, "arc names an unknown vertex");
    }
    const std::string text = "(" + g.label(arc.tail) + ", " + g.label(arc.head) + ")";
    if (i == 0) {
      if (s.pseudo.count(arc.tail) == 0) {
        throw ReplayDivergence(step_no, "start vertex " + g.label(arc.tail) + " is not in PSEUDO");
      }
      s.current = arc.tail;
    } else if (arc.tail != s.current) {
      throw ReplayDivergence(step_no, "script chose " + text + " but the pending source is " +
                                          g.label(s.current));
    }
    ArcChoice choice;
    try {
      choice = take_arc(s, arc.tail, arc.head);
    } catch (const ReplayDivergence&) {
      throw ReplayDivergence(step_no, text + ": arc is not available to its source");
    }
    if (choice.status != StepStatus::Continue) {
      throw ReplayDivergence(step_no, text + ": source has no arcs left");
    }
    const auto outcome = place_arc(s, ix, arc.tail, arc.head);
    trace.snapshots.push_back(snapshot(s, step_no, arc));
    if (outcome.status == StepStatus::CandidateDone && s.unbalanced == 0) {
      trace.cover = finalize(s, ix, g);
      if (trace.cover && i + 1 < script.size()) {
        throw ReplayDivergence(step_no + 1, "script continues after a cover was reached");
      }
    }
  }
  return trace;
}

ReplayTrace replay(const ContractedDigraph& c, std::span<const Arc> script) {
  return replay(c.graph(), script);
}

std::vector<Arc> parse_script(std::string_view text, const Digraph& g) {
  std::vector<Arc> script;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  auto trim = [](std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return std::string_view{};
    return s.substr(first, s.find_last_not_of(" \t\r") - first + 1);
  };
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    auto raw = text.substr(pos, end - pos);
    raw = raw.substr(0, raw.find('#'));
    const auto line = trim(raw);
    pos = end + 1;
    ++line_no;
    if (line.empty()) continue;
    const auto arrow = line.find("->");
    if (arrow == std::string_view::npos) throw ParseError(line_no, "expected 'u -> w'");
    const auto tail_label = trim(line.substr(0, arrow));
    const auto head_label = trim(line.substr(arrow + 2));
    const auto tail = g.find(tail_label);
    const auto head = g.find(head_label);
    if (!tail) throw ParseError(line_no, "unknown vertex label '" + std::string(tail_label) + "'");
    if (!head) throw ParseError(line_no, "unknown vertex label '" + std::string(head_label) + "'");
    script.push_back({*tail, *head});
  }
  return script;
}

}  // namespace cyclecover
