#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "cyclecover/engine.hpp"
#include "cyclecover/verify.hpp"
#include "support.hpp"

using namespace cyclecover;
using namespace testing;

namespace {

using Pairs = std::vector<std::pair<std::string, std::string>>;

std::vector<Arc> example_script() {
  return parse_script(read_text_file(fixture("example21_script.txt")), example_contracted());
}

std::set<VertexId> labels_to_set(const Digraph& g, const std::vector<std::string>& labels) {
  std::set<VertexId> out;
  for (const auto& l : labels) out.insert(id(g, l));
  return out;
}

std::set<Arc> pairs_to_set(const Digraph& g, const Pairs& pairs) {
  const auto v = arcs(g, pairs);
  return {v.begin(), v.end()};
}

struct Checkpoint {
  std::size_t step;
  std::vector<std::string> pseudo;
  Pairs add_i;
};

// Checkpoints printed in the worked example, with its typos corrected:
// "(9, 17,29)" is (9, 17-29), and the step-27 list drops (13, 4), which was
// placed at step 13 and stays until step 47.
const std::vector<Checkpoint>& checkpoints() {
  static const std::vector<Checkpoint> table = {
      {5,
       {"2", "5-19", "6", "10", "12", "13", "14", "15", "18", "20", "21", "22", "23", "24", "26",
        "27", "28", "30"},
       {{"1", "5-19"}, {"4", "9"}, {"8", "12"}, {"9", "17-29"}, {"11", "10"}}},
      {11,
       {"2", "5-19", "10", "13", "14", "15", "18", "21", "22", "23", "24", "26", "27", "30"},
       {{"1", "5-19"}, {"4", "9"}, {"6", "4"}, {"8", "12"}, {"9", "17-29"}, {"11", "10"},
        {"12", "21"}, {"16", "30"}, {"20", "13"}, {"28", "7-25"}}},
      {16,
       {"2", "4", "5-19", "10", "14", "15", "18", "21", "22", "24", "26", "30"},
       {{"1", "5-19"}, {"3", "14"}, {"6", "24"}, {"8", "12"}, {"9", "17-29"}, {"11", "10"},
        {"12", "21"}, {"13", "4"}, {"16", "30"}, {"20", "13"}, {"23", "28"}, {"27", "9"},
        {"28", "7-25"}}},
      {22,
       {"2", "5-19", "10", "14", "15", "22", "24", "26", "30"},
       {{"1", "5-19"}, {"3", "14"}, {"4", "24"}, {"6", "22"}, {"8", "12"}, {"9", "17-29"},
        {"11", "10"}, {"12", "11"}, {"13", "4"}, {"16", "21"}, {"18", "30"}, {"20", "13"},
        {"21", "20"}, {"23", "28"}, {"27", "9"}, {"28", "7-25"}}},
      {27,
       {"2", "5-19", "14", "22", "24", "26", "30"},
       {{"1", "5-19"}, {"3", "14"}, {"4", "24"}, {"6", "22"}, {"8", "20"}, {"9", "17-29"},
        {"10", "16"}, {"11", "10"}, {"12", "11"}, {"13", "4"}, {"15", "12"}, {"16", "21"},
        {"17-29", "26"}, {"18", "30"}, {"20", "13"}, {"21", "18"}, {"23", "28"}, {"27", "9"},
        {"28", "7-25"}}},
      {33,
       {"14", "26", "30"},
       {{"1", "13"}, {"2", "6"}, {"3", "14"}, {"4", "24"}, {"5-19", "23"}, {"6", "22"},
        {"8", "20"}, {"9", "17-29"}, {"10", "16"}, {"11", "10"}, {"12", "11"}, {"13", "4"},
        {"15", "12"}, {"16", "21"}, {"17-29", "26"}, {"18", "30"}, {"20", "27"}, {"21", "18"},
        {"22", "2"}, {"23", "28"}, {"24", "3"}, {"27", "9"}, {"28", "7-25"}}},
      {39,
       {"14", "15"},
       {{"1", "13"}, {"2", "6"}, {"3", "14"}, {"4", "18"}, {"5-19", "23"}, {"6", "22"},
        {"8", "12"}, {"9", "17-29"}, {"10", "16"}, {"11", "10"}, {"12", "11"}, {"13", "4"},
        {"16", "21"}, {"17-29", "26"}, {"18", "30"}, {"20", "27"}, {"21", "28"}, {"22", "2"},
        {"23", "1"}, {"24", "3"}, {"26", "24"}, {"27", "9"}, {"28", "7-25"}, {"30", "20"}}},
      {44,
       {"14", "30"},
       {{"1", "13"}, {"2", "9"}, {"3", "14"}, {"4", "18"}, {"5-19", "23"}, {"6", "22"},
        {"8", "12"}, {"9", "17-29"}, {"10", "16"}, {"11", "10"}, {"12", "11"}, {"13", "4"},
        {"15", "6"}, {"16", "21"}, {"17-29", "26"}, {"18", "30"}, {"20", "27"}, {"21", "20"},
        {"22", "2"}, {"23", "28"}, {"24", "3"}, {"26", "24"}, {"27", "1"}, {"28", "7-25"}}},
  };
  return table;
}

const Pairs kFinalAdd = {
    {"1", "15"},     {"2", "9"},   {"3", "2"},   {"4", "18"},  {"5-19", "23"}, {"6", "4"},
    {"7-25", "3"},   {"8", "12"},  {"9", "17-29"}, {"10", "16"}, {"11", "10"},  {"12", "11"},
    {"13", "6"},     {"14", "8"},  {"15", "30"}, {"16", "21"}, {"17-29", "26"}, {"18", "13"},
    {"20", "27"},    {"21", "20"}, {"22", "5-19"}, {"23", "28"}, {"24", "14"}, {"26", "24"},
    {"27", "1"},     {"28", "7-25"}, {"30", "22"}};

// Drives the engine through a script prefix with the public step API.
struct Driver {
  const Digraph& g;
  EngineSetup setup;
  VertexId source = kNoVertex;

  explicit Driver(const Digraph& graph) : g(graph), setup(init(graph)) {}

  StepOutcome apply(Arc a) {
    REQUIRE(take_arc(setup.state, a.tail, a.head).status == StepStatus::Continue);
    auto out = place_arc(setup.state, setup.ord, a.tail, a.head);
    source = out.next;
    return out;
  }
};

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("seed cycle and real D0 arcs of the worked example") {
  const Digraph& g = example_contracted();
  const auto setup = init(g);
  const auto& ix = setup.ord;
  CHECK(ix.size() == 27);
  CHECK(ix.at(5) == id(g, "5-19"));
  CHECK(ix.at(27) == id(g, "30"));
  CHECK(ix.position(id(g, "30")) == 27);
  CHECK(ix.successor(id(g, "30")) == id(g, "1"));
  CHECK(ix.successor(id(g, "4")) == id(g, "5-19"));

  std::set<Arc> real;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (setup.state.d0_real(v)) real.insert({v, ix.successor(v)});
  }
  CHECK(real == pairs_to_set(g, {{"3", "4"}, {"7-25", "8"}, {"16", "17-29"}, {"17-29", "18"}}));

  // The printed initial PSEUDO lists 13 twice and drops 12; it is every
  // vertex without a real D0 arc.
  std::set<VertexId> expected;
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    if (!g.has_arc(v, ix.successor(v))) expected.insert(v);
  }
  CHECK(expected.size() == 23);
  CHECK(std::set<VertexId>(setup.state.pseudo.begin(), setup.state.pseudo.end()) == expected);
  CHECK(setup.state.pseudo.count(id(g, "12")) == 1);
}

TEST_CASE("predecessor on the seed cycle") {
  const Digraph& g = example_contracted();
  const OrdIndex ix(g);
  CHECK(predecessor(ix, id(g, "5-19")) == id(g, "4"));
  CHECK(predecessor(ix, id(g, "1")) == id(g, "30"));
  CHECK(predecessor(ix, id(g, "9")) == id(g, "8"));
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    CHECK(predecessor(ix, ix.successor(v)) == v);
    CHECK(ix.successor(predecessor(ix, v)) == v);
  }
}

TEST_CASE("arc budget formula") {
  CHECK(arc_budget(27, 1.0, std::exp(1.0)) ==
        static_cast<std::uint64_t>(std::ceil(4.0 * 27 * (std::log(27.0) + 1.0))));
  CHECK(arc_budget(100, 0.5, 2.0) == static_cast<std::uint64_t>(std::ceil(3.0 * 100 * std::log(200.0))));
}

TEST_CASE("complete digraphs are covered by the seed cycle at once") {
  const Digraph k4 = complete(4);
  const auto setup = init(k4);
  CHECK(setup.state.pseudo.empty());
  const auto result = run(k4, 123);
  REQUIRE(result.ok());
  CHECK(format_cycles(*result.cover, k4) == "(1 2 3 4)");
  CHECK(result.stats.arcs_consumed == 0);

  for (std::size_t n = 2; n <= 12; ++n) {
    const Digraph kn = complete(n);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto r = run(kn, seed);
      REQUIRE(r.ok());
      CHECK(r.cover->cycle_count() == 1);
    }
  }
}

TEST_CASE("engine needs two vertices") {
  Digraph one(std::vector<std::string>{"1-2"});
  CHECK_THROWS_AS(init(one), EngineError);
}

TEST_CASE("golden replay matches every printed checkpoint") {
  const Digraph& g = example_contracted();
  const auto script = example_script();
  REQUIRE(script.size() == 55);
  const auto trace = replay(ContractedDigraph::from_labeled(g), script);
  REQUIRE(trace.snapshots.size() == 55);

  for (const auto& cp : checkpoints()) {
    CAPTURE(cp.step);
    const auto& snap = trace.snapshots.at(cp.step - 1);
    CHECK(snap.step == cp.step);
    CHECK(std::set<VertexId>(snap.pseudo.begin(), snap.pseudo.end()) == labels_to_set(g, cp.pseudo));
    CHECK(std::set<Arc>(snap.add_i.begin(), snap.add_i.end()) == pairs_to_set(g, cp.add_i));
  }
  for (const auto& snap : trace.snapshots) {
    // ADD(t) holds the same arcs as ADD(i), keyed the other way.
    CHECK(std::set<Arc>(snap.add_i.begin(), snap.add_i.end()) ==
          std::set<Arc>(snap.add_t.begin(), snap.add_t.end()));
    for (std::size_t i = 1; i < snap.add_t.size(); ++i) CHECK(snap.add_t[i - 1].head < snap.add_t[i].head);
  }

  const auto& last = trace.snapshots.back();
  CHECK(last.add_i.size() == 27);
  CHECK(std::set<Arc>(last.add_i.begin(), last.add_i.end()) == pairs_to_set(g, kFinalAdd));
  CHECK(last.pseudo.empty());
  REQUIRE(trace.cover.has_value());
  CHECK(format_cycles(*trace.cover, g) == kPaperCover);
}

TEST_CASE("collision steps from the trace") {
  const Digraph& g = example_contracted();
  const auto script = example_script();
  Driver d(g);

  // step 2: (4, 9) with nothing to displace continues at predecessor(9) = 8.
  d.apply(script[0]);
  auto out = d.apply(script[1]);
  CHECK(out.next == id(g, "8"));

  for (std::size_t i = 2; i < 7; ++i) d.apply(script[i]);
  // step 8: (12, 21) displaces (16, 21); 16 continues.
  CHECK(d.setup.state.add_t(id(g, "21")) == id(g, "16"));
  out = d.apply(script[7]);
  CHECK(script[7] == arc(g, "12", "21"));
  CHECK(out.next == id(g, "16"));
  CHECK(d.setup.state.add_t(id(g, "21")) == id(g, "12"));
  const auto del16 = d.setup.state.deleted(id(g, "16"));
  CHECK(std::count(del16.begin(), del16.end(), id(g, "21")) == 1);

  for (std::size_t i = 8; i < 20; ++i) d.apply(script[i]);
  // step 21: 16 has nothing fresh left and draws (16, 21) back from DELETE.
  CHECK(d.setup.state.pool(id(g, "16")).empty());
  out = d.apply(script[20]);
  CHECK(script[20] == arc(g, "16", "21"));
  CHECK(d.setup.state.mode(id(g, "16")) == ArcMode::FromDelete);

  for (std::size_t i = 21; i < 31; ++i) d.apply(script[i]);
  // step 32: (1, 13) displaces both (1, 5-19) and (20, 13); 20 continues.
  CHECK(d.setup.state.add_i(id(g, "1")) == id(g, "5-19"));
  CHECK(d.setup.state.add_t(id(g, "13")) == id(g, "20"));
  out = d.apply(script[31]);
  CHECK(out.next == id(g, "20"));
  const auto del1 = d.setup.state.deleted(id(g, "1"));
  const auto del20 = d.setup.state.deleted(id(g, "20"));
  CHECK(std::count(del1.begin(), del1.end(), id(g, "5-19")) == 1);
  CHECK(std::count(del20.begin(), del20.end(), id(g, "13")) == 1);
}

TEST_CASE("finalize waits for a permutation") {
  const Digraph& g = example_contracted();
  const auto script = example_script();
  Driver d(g);
  for (std::size_t i = 0; i < 53; ++i) {
    d.apply(script[i]);
    if (i + 1 < 55) CHECK_FALSE(finalize(d.setup.state, d.setup.ord, g).has_value());
  }
  // After (24, 14) PSEUDO is empty, yet 2 is hit twice.
  CHECK(d.setup.state.pseudo.empty());
  CHECK(d.setup.state.unbalanced > 0);
  d.apply(script[53]);
  d.apply(script[54]);
  const auto cover = finalize(d.setup.state, d.setup.ord, g);
  REQUIRE(cover.has_value());
  CHECK(format_cycles(*cover, g) == kPaperCover);
}

TEST_CASE("empty script on K4") {
  const Digraph k4 = complete(4);
  const auto trace = replay(k4, std::vector<Arc>{});
  CHECK(trace.snapshots.empty());
  REQUIRE(trace.cover.has_value());
  CHECK(format_cycles(*trace.cover, k4) == "(1 2 3 4)");
}

TEST_CASE("replay reports the step where a script diverges") {
  const Digraph& g = example_contracted();
  const auto c = ContractedDigraph::from_labeled(g);
  auto script = example_script();

  auto diverges_at = [&](const std::vector<Arc>& s) -> std::size_t {
    try {
      replay(c, s);
    } catch (const ReplayDivergence& e) {
      return e.step();
    }
    return 0;
  };

  auto bad = script;
  bad[2] = arc(g, "8", "30");  // not an arc of the graph
  CHECK(diverges_at(bad) == 3);

  bad = script;
  bad[3] = arc(g, "12", "10");  // the pending source is 11
  CHECK(diverges_at(bad) == 4);

  bad = script;
  bad[0] = arc(g, "3", "2");  // 3 has a real D0 arc, so it is not in PSEUDO
  CHECK(diverges_at(bad) == 1);

  bad = script;
  bad.push_back(arc(g, "1", "13"));
  CHECK(diverges_at(bad) == 56);

  bad.assign(script.begin(), script.begin() + 10);
  const auto partial = replay(c, bad);
  CHECK(partial.snapshots.size() == 10);
  CHECK_FALSE(partial.cover.has_value());
}

TEST_CASE("script parsing") {
  const Digraph& g = example_contracted();
  const auto s = parse_script("# header\n1 -> 5-19\n\n  4->9   # trailing\n", g);
  CHECK(s == arcs(g, {{"1", "5-19"}, {"4", "9"}}));
  CHECK_THROWS_AS(parse_script("1 -> 99\n", g), ParseError);
  CHECK_THROWS_AS(parse_script("1 5-19\n", g), ParseError);
}

TEST_CASE("a source with one fresh arc always takes it") {
  const Digraph k3 = complete(3);
  auto setup = init(k3);
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    auto s = setup.state;
    const auto choice = choose_arc(s, 0, rng);
    CHECK(choice.status == StepStatus::Continue);
    CHECK(choice.head == 2);
    CHECK(s.pool(0).empty());
    CHECK(s.arcs_consumed == 1);
  }
}

TEST_CASE("arc choice is uniform over a five-arc pool") {
  const Digraph k7 = complete(7);
  auto setup = init(k7, EngineConfig{.budget = 1u << 30});
  REQUIRE(setup.state.pool(0).size() == 5);
  Rng rng(99);
  std::vector<int> hits(7, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    auto s = setup.state;
    ++hits[choose_arc(s, 0, rng).head];
  }
  const double expected = draws / 5.0;
  double chi2 = 0;
  for (VertexId w = 2; w < 7; ++w) chi2 += (hits[w] - expected) * (hits[w] - expected) / expected;
  CHECK(hits[0] == 0);
  CHECK(hits[1] == 0);
  CHECK(chi2 < 18.467);  // chi-square, 4 degrees of freedom, p = 0.001
}

TEST_CASE("budget exhaustion and reproducibility") {
  Rng rng(4);
  auto stream = gen_arc_stream(200, 17);
  const Digraph g = compute_m_star(stream);
  const auto r = contract(g);
  REQUIRE(std::holds_alternative<ContractedDigraph>(r));
  const auto& c = std::get<ContractedDigraph>(r);

  const auto tiny = run(c, 5, EngineConfig{.budget = 3});
  CHECK_FALSE(tiny.ok());
  CHECK(tiny.failure == RunFailureKind::BudgetExhausted);
  CHECK(tiny.stats.arcs_consumed == 3);

  const auto a = run(c, 8);
  const auto b = run(c, 8);
  CHECK(a.ok() == b.ok());
  CHECK(a.stats.arcs_consumed == b.stats.arcs_consumed);
  if (a.ok()) CHECK(*a.cover == *b.cover);
}

TEST_CASE("random runs keep every state invariant") {
  Rng rng(12);
  int successes = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 6 + rng.below(60);
    auto stream = gen_arc_stream(n, rng());
    const Digraph g = compute_m_star(stream);
    const auto r = contract(g);
    const auto* c = std::get_if<ContractedDigraph>(&r);
    if (!c || c->n_prime() < 2) continue;
    EngineConfig config;
    config.check_invariants = true;
    const auto result = run(*c, rng(), config);  // throws on a violation
    CHECK(result.stats.arcs_consumed <= result.stats.budget);
    if (result.ok()) {
      ++successes;
      CHECK(validate_cover(c->graph(), *result.cover).valid);
      CHECK(validate_cover(g, expand_cover(*c, *result.cover)).valid);
    }
  }
  CHECK(successes > 100);
}

TEST_CASE("check_invariants flags a corrupted state") {
  const Digraph& g = example_contracted();
  const auto script = example_script();
  Driver d(g);
  for (std::size_t i = 0; i < 12; ++i) d.apply(script[i]);
  CHECK(check_invariants(d.setup.state, d.setup.ord, g).empty());

  auto broken = d.setup.state;
  broken.vertices[id(g, "9")].add_t = kNoVertex;  // (4, 9) now only in ADD(i)
  CHECK_FALSE(check_invariants(broken, d.setup.ord, g).empty());

  broken = d.setup.state;
  broken.pseudo.insert(id(g, "3"));
  CHECK_FALSE(check_invariants(broken, d.setup.ord, g).empty());

  broken = d.setup.state;
  // overwrite a pool slot of 1 with its ADD head: ADD and pool overlap
  const VertexId one = id(g, "1");
  REQUIRE_FALSE(broken.pool(one).empty());
  broken.arcs[broken.vertices[one].first] = broken.add_i(one);
  CHECK_FALSE(check_invariants(broken, d.setup.ord, g).empty());
}

}  // TEST_SUITE
