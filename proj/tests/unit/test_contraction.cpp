#include <doctest.h>

#include <algorithm>
#include <set>

#include "cyclecover/verify.hpp"
#include "support.hpp"

using namespace cyclecover;
using namespace testing;

namespace {

const ContractedDigraph& as_contracted(const ContractionResult& r) {
  REQUIRE(std::holds_alternative<ContractedDigraph>(r));
  return std::get<ContractedDigraph>(r);
}

const ContractionFailure& as_failure(const ContractionResult& r) {
  REQUIRE(std::holds_alternative<ContractionFailure>(r));
  return std::get<ContractionFailure>(r);
}

std::set<std::string> multi_vertex_labels(const ContractedDigraph& c) {
  std::set<std::string> out;
  for (const auto& s : c.vertices()) {
    if (s.chain.size() > 1) out.insert(s.label);
  }
  return out;
}

// Checks the structural promises of a successful contraction against g.
void check_structure(const Digraph& g, const ContractedDigraph& c) {
  std::set<Arc> forced(c.forced_arcs.begin(), c.forced_arcs.end());
  std::set<Arc> chain_arcs;
  std::set<VertexId> members;
  for (const auto& s : c.vertices()) {
    for (std::size_t i = 0; i < s.chain.size(); ++i) {
      CHECK(members.insert(s.chain[i]).second);
      if (i + 1 < s.chain.size()) chain_arcs.insert({s.chain[i], s.chain[i + 1]});
    }
  }
  if (c.trivially_covered()) chain_arcs.insert({c.vertex(0).tail(), c.vertex(0).head()});
  CHECK(members.size() == g.vertex_count());
  CHECK(forced == chain_arcs);
  for (const Arc& a : forced) CHECK(g.has_arc(a.tail, a.head));

  // A deleted arc shares its head or tail with a forced arc, or would close a
  // chain on itself.
  for (const Arc& d : c.deleted_arcs) {
    CHECK(g.has_arc(d.tail, d.head));
    CHECK_FALSE(forced.count(d));
    const bool shares = std::any_of(forced.begin(), forced.end(), [&](const Arc& f) {
      return f.head == d.head || f.tail == d.tail;
    });
    const auto& s = c.vertex(c.super_of(d.tail));
    const bool closes = c.super_of(d.head) == c.super_of(d.tail) && d.tail == s.tail() && d.head == s.head();
    CHECK((shares || closes));
  }

  // Each contracted arc is a surviving original arc between chain ends.
  const auto& h = c.graph();
  std::size_t surviving = 0;
  for (const Arc& a : h.arcs()) {
    CHECK(g.has_arc(c.vertex(a.tail).tail(), c.vertex(a.head).head()));
    ++surviving;
  }
  CHECK(surviving + forced.size() + c.deleted_arcs.size() == g.arc_count());
}

}  // namespace

TEST_SUITE("contraction") {

TEST_CASE("worked example original contracts to the printed listing") {
  const Digraph g = load_digraph(fixture("example21_original.txt"));
  REQUIRE(g.vertex_count() == 30);
  const auto r = contract(g);
  const auto& c = as_contracted(r);
  CHECK(c.n_prime() == 27);
  CHECK(multi_vertex_labels(c) == std::set<std::string>{"5-19", "7-25", "17-29"});
  CHECK(c.graph().same_graph(example_contracted()));
  CHECK_FALSE(c.trivially_covered());
  check_structure(g, c);

  std::set<Arc> deleted(c.deleted_arcs.begin(), c.deleted_arcs.end());
  CHECK(deleted == std::set<Arc>{{2, 18}, {9, 24}, {16, 11}});  // (3,19) (10,25) (17,12)
}

TEST_CASE("both rules fire: out-degree one and in-degree one") {
  // 1 -> 2 is the only arc into 2, so 1's other arc (1,3) must go.
  const Digraph g = from_pairs(4, {{1, 2}, {1, 3}, {2, 3}, {2, 4}, {3, 1}, {3, 4}, {4, 1}, {4, 3}});
  const auto result_c = contract(g);
  const auto& c = as_contracted(result_c);
  check_structure(g, c);
  CHECK(std::count(c.forced_arcs.begin(), c.forced_arcs.end(), Arc{0, 1}) == 1);
  CHECK(std::count(c.deleted_arcs.begin(), c.deleted_arcs.end(), Arc{0, 2}) == 1);
}

TEST_CASE("forced 2-cycle shorter than n fails") {
  const Digraph g = from_pairs(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}});
  const auto result_f = contract(g);
  const auto& f = as_failure(result_f);
  CHECK(f.kind == ContractionFailureKind::ForcedCycle);
  CHECK(f.cycle == std::vector<VertexId>{0, 1});
}

TEST_CASE("forced chains 2-1 and 4-3 end in a forced cycle") {
  // Hand fixpoint: 2 and 4 have out-degree one, forcing (2,1) and (4,3) and
  // deleting (3,1) and (1,3); then (1,2) and (3,4) are forced too.
  const Digraph g = from_pairs(4, {{1, 2}, {2, 1}, {3, 4}, {4, 3}, {1, 3}, {3, 1}});
  for (auto order : {WorklistOrder::Fifo, WorklistOrder::Lifo}) {
    const auto result_f = contract(g, order);
  const auto& f = as_failure(result_f);
    CHECK(f.kind == ContractionFailureKind::ForcedCycle);
    CHECK(f.cycle.size() == 2);
  }
}

TEST_CASE("a forced Hamilton cycle is trivially covered") {
  const Digraph g = from_pairs(3, {{1, 2}, {2, 3}, {3, 1}});
  const auto result_c = contract(g);
  const auto& c = as_contracted(result_c);
  CHECK(c.trivially_covered());
  CHECK(c.n_prime() == 1);
  const CycleCover cover = trivial_cover(c);
  CHECK(format_cycles(cover, g) == "(1 2 3)");
}

TEST_CASE("collisions of forced arcs are infeasible") {
  // 1 and 2 both have out-degree one into 3.
  const Digraph g = from_pairs(4, {{1, 3}, {2, 3}, {3, 4}, {3, 1}, {4, 2}, {4, 1}});
  const auto result_f = contract(g);
  const auto& f = as_failure(result_f);
  CHECK(f.kind == ContractionFailureKind::Infeasible);
}

TEST_CASE("input with a zero degree is rejected") {
  const Digraph g = parse_digraph("1: 2\n2: 1\n3:\n");
  CHECK_THROWS_AS(contract(g), GraphError);
}

TEST_CASE("FIFO and LIFO worklists reach the same fixpoint") {
  Rng rng(31);
  int successes = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const std::size_t n = 4 + rng.below(40);
    auto stream = gen_arc_stream(n, rng());
    const Digraph g = compute_m_star(stream);
    const auto a = contract(g, WorklistOrder::Fifo);
    const auto b = contract(g, WorklistOrder::Lifo);
    REQUIRE(a.index() == b.index());
    if (const auto* ca = std::get_if<ContractedDigraph>(&a)) {
      const auto& cb = std::get<ContractedDigraph>(b);
      CHECK(ca->graph().same_graph(cb.graph()));
      std::set<Arc> fa(ca->forced_arcs.begin(), ca->forced_arcs.end());
      std::set<Arc> fb(cb.forced_arcs.begin(), cb.forced_arcs.end());
      CHECK(fa == fb);
      check_structure(g, *ca);
      ++successes;
    }
  }
  CHECK(successes > 200);
}

TEST_CASE("from_labeled reads chains") {
  const auto c = ContractedDigraph::from_labeled(example_contracted());
  CHECK(c.original_count() == 30);
  CHECK(c.n_prime() == 27);
  const auto& s = c.vertex(id(c.graph(), "5-19"));
  CHECK(s.chain == std::vector<VertexId>{4, 18});
  CHECK(c.super_of(18) == id(c.graph(), "5-19"));
  CHECK_THROWS_AS(ContractedDigraph::from_labeled(parse_digraph("1-4: 2\n2: 1-4\n")), GraphError);
}

TEST_CASE("expanding the printed cover walks each chain") {
  const auto c = ContractedDigraph::from_labeled(example_contracted());
  const auto cover = CycleCover::from_successors(cycles_to_succ(c.graph(), kPaperCover));
  const CycleCover full = expand_cover(c, cover);
  CHECK(full.size() == 30);
  CHECK(full.succ[4] == 18);   // 5 -> 19
  CHECK(full.succ[18] == 22);  // 19 -> 23
  CHECK(full.succ[16] == 28);  // 17 -> 29
  CHECK(full.cycle_count() == 2);
  const Digraph original = load_digraph(fixture("example21_original.txt"));
  CHECK(validate_cover(original, full).valid);
}

TEST_CASE("expand_cover rejects a super-vertex mapped to itself") {
  Digraph g(std::vector<std::string>{"1-2-3"});
  ContractedDigraph c(g, {SuperVertex{{0, 1, 2}, "1-2-3"}}, 3);
  CHECK_THROWS_AS(expand_cover(c, CycleCover::from_successors({0})), ContractViolation);
}

TEST_CASE("expand_cover rejects a cover using a non-arc") {
  const auto c = ContractedDigraph::from_labeled(example_contracted());
  auto succ = cycles_to_succ(c.graph(), kPaperCover);
  std::swap(succ[id(c.graph(), "1")], succ[id(c.graph(), "4")]);
  CHECK_THROWS_AS(expand_cover(c, CycleCover::from_successors(succ)), ContractViolation);
}

TEST_CASE("expanded covers of small random instances are valid") {
  Rng rng(8);
  int checked = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const Digraph g = random_min_degree_one(8, 0.25, rng);
    const auto r = contract(g);
    const auto* c = std::get_if<ContractedDigraph>(&r);
    if (!c || c->trivially_covered() || c->n_prime() > kBruteForceLimit) continue;
    const auto covers = brute_force_cover(c->graph());
    const auto originals = brute_force_cover(g);
    for (const auto& succ : covers) {
      const CycleCover full = expand_cover(*c, CycleCover::from_successors(succ));
      CHECK(validate_cover(g, full).valid);
      CHECK(contains_cover(originals, full.succ));
      ++checked;
    }
  }
  CHECK(checked > 0);
}

}  // TEST_SUITE
