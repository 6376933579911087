#include "cyclecover/report.hpp"

#include <sstream>

namespace cyclecover::report {

json arc_json(const Digraph& g, Arc a) { return json::array({g.label(a.tail), g.label(a.head)}); }

namespace {

json arcs_json(const Digraph& g, const std::vector<Arc>& arcs) {
  json out = json::array();
  for (const Arc& a : arcs) out.push_back(arc_json(g, a));
  return out;
}

json cycles_json(const CycleCover& cover, const Digraph& g) {
  json out = json::array();
  for (const auto& cycle : cover.cycles) {
    json labels = json::array();
    for (VertexId v : cycle) labels.push_back(g.label(v));
    out.push_back(std::move(labels));
  }
  return out;
}

}  // namespace

json snapshot_json(const Snapshot& s, const Digraph& g) {
  json pseudo = json::array();
  for (VertexId v : s.pseudo) pseudo.push_back(g.label(v));
  return {
      {"step", s.step},
      {"chosen", arc_json(g, s.chosen)},
      {"next", s.next == kNoVertex ? json(nullptr) : json(g.label(s.next))},
      {"pseudo", std::move(pseudo)},
      {"add_i", arcs_json(g, s.add_i)},
      {"add_t", arcs_json(g, s.add_t)},
      {"delete", arcs_json(g, s.deleted)},
      {"arcs_consumed", s.arcs_consumed},
  };
}

json validity_json(const ValidityReport& r, const Digraph& g) {
  json violations = json::array();
  for (const auto& v : r.violations) {
    violations.push_back({
        {"clause", std::string(to_string(v.clause))},
        {"vertex", v.vertex < g.vertex_count() ? json(g.label(v.vertex)) : json(nullptr)},
        {"target", v.target < g.vertex_count() ? json(g.label(v.target)) : json(nullptr)},
        {"detail", v.detail},
    });
  }
  return {{"valid", r.valid}, {"violations", std::move(violations)}, {"cycle_lengths", r.cycle_lengths}};
}

json contraction_json(const ContractedDigraph& c) {
  json supers = json::array();
  for (const auto& s : c.vertices()) {
    if (s.chain.size() > 1) supers.push_back(s.label);
  }
  return {
      {"n", c.original_count()},
      {"n_prime", c.n_prime()},
      {"super_vertices", std::move(supers)},
      {"forced_arcs", c.forced_arcs.size()},
      {"deleted_arcs", c.deleted_arcs.size()},
      {"trivially_covered", c.trivially_covered()},
  };
}

json failure_json(const ContractionFailure& f, const Digraph& original) {
  json cycle = json::array();
  for (VertexId v : f.cycle) cycle.push_back(original.label(v));
  return {
      {"failure", f.kind == ContractionFailureKind::ForcedCycle ? "ForcedCycleFailure" : "Infeasible"},
      {"cycle", std::move(cycle)},
      {"vertex", f.vertex < original.vertex_count() ? json(original.label(f.vertex)) : json(nullptr)},
      {"message", f.message},
  };
}

json run_json(const RunResult& r, const Digraph& g, std::uint64_t seed) {
  json out = {
      {"seed", seed},
      {"success", r.ok()},
      {"failure", std::string(to_string(r.failure))},
      {"arcs_consumed", r.stats.arcs_consumed},
      {"budget", r.stats.budget},
      {"steps", r.stats.steps},
      {"n_prime", r.stats.n_prime},
      {"cycle_count", r.stats.cycles},
  };
  out["cycles"] = r.cover ? cycles_json(*r.cover, g) : json::array();
  return out;
}

json perm_stats_json(const PermCycleStats& s) {
  return {
      {"n", s.n},
      {"trials", s.trials},
      {"mean", s.mean},
      {"var", s.variance},
      {"beta", s.beta},
      {"window", {s.window_low, s.window_high}},
      {"window_fraction", s.window_fraction},
      {"histogram", s.histogram},
  };
}

json medians_json(const std::vector<MedianRow>& rows) {
  json out = json::array();
  for (const auto& m : rows) {
    out.push_back({{"n", m.n},
                   {"method", m.method},
                   {"median_micros", m.median_micros},
                   {"successes", m.successes},
                   {"runs", m.runs}});
  }
  return out;
}

std::string perm_stats_csv(const PermCycleStats& s) {
  std::ostringstream out;
  out.precision(10);
  out << "n,trials,mean,var,window_fraction\n"
      << s.n << ',' << s.trials << ',' << s.mean << ',' << s.variance << ',' << s.window_fraction
      << '\n';
  return out.str();
}

}  // namespace cyclecover::report
