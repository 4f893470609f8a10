// Benchmark harness: runs heuristics over a case set and aggregates nodes
// explored, time per path, path length and the paired win ratio.
#pragma once

#include "riskpath/riskmap.hpp"
#include "riskpath/search.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace riskpath {

class TransformerModel;

enum class HeuristicKind { Manhattan, Expert, Learned };

std::string to_string(HeuristicKind kind);
HeuristicKind parse_heuristic_kind(const std::string& name);  // manhattan | expert | nn

struct BenchCase {
    const RiskMap* map = nullptr;
    Case query;
};

struct CaseOutcome {
    std::size_t case_index = 0;
    std::string heuristic;
    std::int64_t nodes_explored = 0;
    double elapsed_ms = 0.0;  // heuristic construction + search
    int path_length = -1;
    bool feasible = false;
};

struct HeuristicSummary {
    std::string heuristic;
    std::size_t cases = 0;
    double avg_nodes = 0.0;
    double avg_time_ms = 0.0;
    double avg_len = 0.0;
    double win_ratio = 0.0;

    friend bool operator==(const HeuristicSummary&, const HeuristicSummary&) = default;
};

struct BenchmarkReport {
    std::vector<HeuristicSummary> rows;

    friend bool operator==(const BenchmarkReport&, const BenchmarkReport&) = default;
};

struct BenchRun {
    BenchmarkReport report;
    std::vector<std::vector<CaseOutcome>> outcomes;  // [heuristic][case]
};

// The first heuristic is the baseline; every other one is a challenger paired
// against it. Throws CorrectnessError on an infeasible result or an invalid path.
BenchRun run_bench(std::span<const BenchCase> cases, std::span<const HeuristicKind> heuristics,
                   const TransformerModel* model = nullptr, int jobs = 1);

// Fractions of paired cases won by a and by b. b wins a case iff it is no
// slower and its path is no longer. Throws UsageError when unpaired.
std::pair<double, double> win_ratio(std::span<const CaseOutcome> a, std::span<const CaseOutcome> b);

enum class ReportFormat { Text, Csv };

std::string format_report(const BenchmarkReport& report, ReportFormat format);
BenchmarkReport parse_report_csv(const std::string& text);
// Throws UsageError on an empty report.
void export_report(const BenchmarkReport& report, const std::filesystem::path& path,
                   ReportFormat format);

// Per-cell pop counts from a search trace.
std::vector<std::int64_t> exploration_counts(std::span<const TraceRecord> trace, int m);

// m x m grid of pop counts in the map layout (top row first). Suffixes mark
// the start (S), destination (D) and other path cells (*).
std::string format_exploration_grid(std::span<const TraceRecord> trace, const RiskMap& map,
                                    const Case& c, std::span<const Coord> path);
void export_exploration_grid(std::span<const TraceRecord> trace, const RiskMap& map, const Case& c,
                             std::span<const Coord> path, const std::filesystem::path& file);

}  // namespace riskpath
