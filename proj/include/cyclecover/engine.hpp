#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cyclecover/contraction.hpp"
#include "cyclecover/cover.hpp"
#include "cyclecover/digraph.hpp"
#include "cyclecover/rng.hpp"

namespace cyclecover {

/// Positions of the contracted vertices on the seed cycle D0.
///
/// Positions are 1-based and follow ascending label order, so D0 maps the
/// vertex at position k to the one at position k+1 and wraps n' to 1.
class OrdIndex {
 public:
  explicit OrdIndex(const Digraph& g);

  std::size_t size() const { return ord_.size(); }
  /// ORD: position (1..n') to vertex.
  VertexId at(std::size_t position) const { return ord_.at(position - 1); }
  /// ORD^-1: vertex to position (1..n').
  std::size_t position(VertexId v) const { return pos_.at(v); }
  /// D0(v).
  VertexId successor(VertexId v) const;
  /// The b with D0(b) = w.
  VertexId predecessor(VertexId w) const;

 private:
  std::vector<VertexId> ord_;
  std::vector<std::size_t> pos_;
};

inline VertexId predecessor(const OrdIndex& ix, VertexId w) { return ix.predecessor(w); }

class EngineError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ReplayDivergence : public EngineError {
 public:
  ReplayDivergence(std::size_t step, const std::string& what)
      : EngineError("replay diverged at step " + std::to_string(step) + ": " + what), step_(step) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_;
};

/// Which branch a vertex draws arcs from: the fresh pool ("c") or DELETE ("cD").
enum class ArcMode : std::uint8_t { Fresh, FromDelete };

struct EngineConfig {
  double alpha = 1.0;
  double c_param = std::numbers::e;
  /// Overrides the arc budget formula when set.
  std::optional<std::uint64_t> budget;
  /// Run check_invariants after every step and throw on a violation.
  bool check_invariants = false;
};

/// ceil(2 (1 + alpha) n ln(c_param n)).
std::uint64_t arc_budget(std::size_t n, double alpha, double c_param);

/// Working sets of the cycle-cover construction.
///
/// Vertex-keyed maps are dense vectors indexed by vertex id; since ids are in
/// ascending label order, iterating them visits keys in order. Arc lists per
/// vertex hold heads sorted by id.
/// Set of vertex ids 0..n-1 kept as a flag array. Membership updates are
/// O(1) and iteration runs in ascending id order.
class VertexSet {
 public:
  class iterator {
   public:
    using iterator_category = std::forward_iterator_tag;
    using value_type = VertexId;
    using difference_type = std::ptrdiff_t;
    using pointer = const VertexId*;
    using reference = VertexId;

    iterator() = default;
    iterator(const std::vector<char>* flags, VertexId v) : flags_(flags), v_(v) { skip(); }
    VertexId operator*() const { return v_; }
    iterator& operator++() {
      ++v_;
      skip();
      return *this;
    }
    iterator operator++(int) {
      auto old = *this;
      ++*this;
      return old;
    }
    friend bool operator==(const iterator& a, const iterator& b) { return a.v_ == b.v_; }

   private:
    void skip() {
      while (v_ < flags_->size() && !(*flags_)[v_]) ++v_;
    }
    const std::vector<char>* flags_ = nullptr;
    VertexId v_ = 0;
  };

  VertexSet() = default;
  explicit VertexSet(std::size_t n) : flags_(n, 0) {}

  bool insert(VertexId v) {
    if (flags_.at(v)) return false;
    flags_[v] = 1;
    ++size_;
    return true;
  }
  std::size_t erase(VertexId v) {
    if (v >= flags_.size() || !flags_[v]) return 0;
    flags_[v] = 0;
    --size_;
    return 1;
  }
  std::size_t count(VertexId v) const { return v < flags_.size() && flags_[v] ? 1 : 0; }
  bool empty() const { return size_ == 0; }
  std::size_t size() const { return size_; }
  iterator begin() const { return {&flags_, 0}; }
  iterator end() const { return {&flags_, static_cast<VertexId>(flags_.size())}; }

 private:
  std::vector<char> flags_;
  std::size_t size_ = 0;
};

/// Everything a step reads or writes about one vertex, packed into 32 bytes.
struct alignas(32) VertexState {
  VertexId add_i = kNoVertex;    ///< head of v's ADD arc
  VertexId add_t = kNoVertex;    ///< tail of the ADD arc into v
  VertexId d0 = kNoVertex;       ///< D0(v)
  VertexId d0_pred = kNoVertex;  ///< the b with D0(b) = v
  std::uint32_t first = 0;       ///< start of v's slots in EngineState::arcs
  std::uint32_t pool_size = 0;
  std::uint32_t deleted_size = 0;
  std::uint32_t capacity : 28 = 0;
  // Only add_t(v) and d0_pred(v) can map to v, so this is 0, 1 or 2.
  std::uint32_t in_count : 2 = 1;  ///< preimages of v under the candidate map
  std::uint32_t from_delete : 1 = 0;  ///< cD mode
  std::uint32_t d0_real : 1 = 0;      ///< (v, D0(v)) is an arc of the graph
};

struct EngineState {
  VertexSet pseudo;
  std::vector<VertexState> vertices;
  /// Arc heads. Each vertex owns `capacity` slots: its pool, sorted, at the
  /// front and its DELETE list, sorted, at the back.
  std::vector<VertexId> arcs;
  VertexId current = kNoVertex;
  std::uint64_t arcs_consumed = 0;
  std::uint64_t budget = 0;
  /// Vertices whose in_count differs from one.
  std::size_t unbalanced = 0;

  std::size_t size() const { return vertices.size(); }
  VertexId add_i(VertexId u) const { return vertices[u].add_i; }
  VertexId add_t(VertexId w) const { return vertices[w].add_t; }
  ArcMode mode(VertexId u) const {
    return vertices[u].from_delete ? ArcMode::FromDelete : ArcMode::Fresh;
  }
  bool d0_real(VertexId u) const { return vertices[u].d0_real; }
  std::uint32_t in_count(VertexId u) const { return vertices[u].in_count; }
  std::span<const VertexId> pool(VertexId u) const {
    const auto& x = vertices[u];
    return {arcs.data() + x.first, x.pool_size};
  }
  std::span<const VertexId> deleted(VertexId u) const {
    const auto& x = vertices[u];
    return {arcs.data() + x.first + x.capacity - x.deleted_size, x.deleted_size};
  }

  std::size_t add_size() const;
  /// The candidate successor of v: its ADD head, else D0(v).
  VertexId candidate(VertexId v) const {
    return vertices[v].add_i != kNoVertex ? vertices[v].add_i : vertices[v].d0;
  }
};

struct EngineSetup {
  OrdIndex ord;
  EngineState state;
};

/// Builds D0 and the initial working sets. Throws EngineError when n' < 2.
EngineSetup init(const ContractedDigraph& c, const EngineConfig& config = {});
EngineSetup init(const Digraph& g, const EngineConfig& config = {});

enum class StepStatus { Continue, CandidateDone, StuckVertex, BudgetExhausted };

struct ArcChoice {
  StepStatus status = StepStatus::Continue;
  VertexId head = kNoVertex;
};

/// Draws an arc out of `source` following the c / cD branch rules and counts it.
ArcChoice choose_arc(EngineState& state, VertexId source, Rng& rng);

/// Like choose_arc, but takes the given arc. Throws ReplayDivergence (step 0)
/// when the arc is not on the branch the rules select.
ArcChoice take_arc(EngineState& state, VertexId source, VertexId head);

struct StepOutcome {
  StepStatus status = StepStatus::Continue;
  Arc placed{};
  VertexId next = kNoVertex;
};

/// Places (u, w) in ADD, displacing conflicting arcs, and advances the source.
StepOutcome place_arc(EngineState& state, const OrdIndex& ix, VertexId u, VertexId w);

/// One random step from state.current.
StepOutcome step(EngineState& state, const OrdIndex& ix, Rng& rng);

/// The candidate successor map if it is a fixed-point-free permutation using
/// only arcs of g, otherwise nullopt.
std::optional<CycleCover> finalize(const EngineState& state, const OrdIndex& ix, const Digraph& g);

/// Human-readable descriptions of every violated state invariant.
std::vector<std::string> check_invariants(const EngineState& state, const OrdIndex& ix,
                                          const Digraph& g);

enum class RunFailureKind { None, BudgetExhausted, StuckVertex };

std::string_view to_string(RunFailureKind kind);

struct RunStats {
  std::uint64_t arcs_consumed = 0;
  std::uint64_t steps = 0;
  std::uint64_t budget = 0;
  std::size_t cycles = 0;
  std::size_t n_prime = 0;
  double elapsed_micros = 0;
};

struct RunResult {
  std::optional<CycleCover> cover;  ///< on contracted vertices
  RunFailureKind failure = RunFailureKind::None;
  RunStats stats;

  bool ok() const { return cover.has_value(); }
};

RunResult run(const ContractedDigraph& c, std::uint64_t seed, const EngineConfig& config = {});
RunResult run(const Digraph& g, std::uint64_t seed, const EngineConfig& config = {});

/// State after one placement.
struct Snapshot {
  std::size_t step = 0;
  Arc chosen{};
  VertexId next = kNoVertex;
  std::vector<VertexId> pseudo;
  std::vector<Arc> add_i;  ///< sorted by tail
  std::vector<Arc> add_t;  ///< sorted by head
  std::vector<Arc> deleted;
  std::uint64_t arcs_consumed = 0;
};

Snapshot snapshot(const EngineState& state, std::size_t step, Arc chosen);

struct ReplayTrace {
  std::vector<Snapshot> snapshots;
  std::optional<CycleCover> cover;
};

/// Runs the construction with choices taken from `script` instead of the RNG.
ReplayTrace replay(const ContractedDigraph& c, std::span<const Arc> script);
ReplayTrace replay(const Digraph& g, std::span<const Arc> script);

/// Parses `u -> w` lines (hyphenated labels allowed, `#` comments).
std::vector<Arc> parse_script(std::string_view text, const Digraph& g);

}  // namespace cyclecover
