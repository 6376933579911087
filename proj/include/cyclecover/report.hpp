#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "cyclecover/analysis.hpp"
#include "cyclecover/baseline.hpp"
#include "cyclecover/contraction.hpp"
#include "cyclecover/engine.hpp"
#include "cyclecover/verify.hpp"

// JSON views of library results. Vertices are written by label; objects use
// nlohmann::json's default ordered map, so keys come out sorted.
namespace cyclecover::report {

using nlohmann::json;

json arc_json(const Digraph& g, Arc a);
json snapshot_json(const Snapshot& s, const Digraph& g);
json validity_json(const ValidityReport& r, const Digraph& g);
json contraction_json(const ContractedDigraph& c);
json failure_json(const ContractionFailure& f, const Digraph& original);
json run_json(const RunResult& r, const Digraph& g, std::uint64_t seed);
json perm_stats_json(const PermCycleStats& s);
json medians_json(const std::vector<MedianRow>& rows);

/// CSV header and row for perm_cycle_stats output.
std::string perm_stats_csv(const PermCycleStats& s);

}  // namespace cyclecover::report
