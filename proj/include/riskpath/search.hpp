// ASD A*: A* over (cell, accumulated safety) labels with per-cell Pareto
// dominance, plus an exhaustive label oracle and a path validator.
#pragma once

#include "riskpath/riskmap.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace riskpath {

struct Label {
    int cell = 0;           // flat index
    double safety = 1.0;    // product of S over the path, start cell included
    int g = 0;              // steps from start
    double f = 0.0;         // g + h(cell)
    std::int32_t parent = -1;
};

class Heuristic {
public:
    virtual ~Heuristic() = default;

    // Estimated remaining steps from cell to c.dest, >= 0.
    virtual double evaluate(const Case& c, Coord cell) const = 0;
    // Labels on flagged cells are never enqueued.
    virtual bool is_infeasible(const Case&, Coord) const { return false; }
    virtual std::string name() const = 0;
};

class ManhattanHeuristic final : public Heuristic {
public:
    double evaluate(const Case& c, Coord cell) const override {
        return static_cast<double>(manhattan(cell, c.dest));
    }
    std::string name() const override { return "manhattan"; }
};

inline int manhattan_h(Coord c, Coord dest) noexcept { return manhattan(c, dest); }

struct PathResult {
    std::vector<Coord> path;  // start..dest; empty when infeasible
    int length = -1;
    double safety = 0.0;
    std::int64_t nodes_explored = 0;
    double elapsed_ms = 0.0;

    bool feasible() const noexcept { return !path.empty(); }
};

// One frontier pop, as written by `riskpath solve --trace`.
struct TraceRecord {
    int cell = 0;
    int g = 0;
    double safety = 0.0;
    double f = 0.0;
};

struct SearchOptions {
    std::vector<TraceRecord>* trace = nullptr;
    // Re-check per-cell dominance after every insertion; throws CorrectnessError.
    bool audit = false;
};

// Product of S over every cell of the path, start included. All safety
// accounting in the search, oracle and validator goes through this rule.
double path_safety(const RiskMap& map, std::span<const Coord> path);

class AsdAStar {
public:
    // Both arguments are held by reference and must outlive the search.
    AsdAStar(const RiskMap& map, const Heuristic& heuristic);
    AsdAStar(const RiskMap&&, const Heuristic&) = delete;
    AsdAStar(const RiskMap&, const Heuristic&&) = delete;

    PathResult solve(const Case& c, const SearchOptions& options = {});

    // Label arena and surviving per-cell label lists of the last solve().
    const std::vector<Label>& labels() const noexcept { return labels_; }
    const std::vector<std::int32_t>& kept(int cell) const { return kept_[cell]; }

private:
    bool insert(std::int32_t idx, bool audit);

    const RiskMap& map_;
    const Heuristic& heuristic_;
    std::vector<Label> labels_;
    std::vector<std::uint8_t> dead_;
    std::vector<std::vector<std::int32_t>> kept_;
};

// Minimum-length path with product safety >= c.epsilon, or an infeasible result.
PathResult asd_astar(const RiskMap& map, const Case& c, const Heuristic& heuristic,
                     const SearchOptions& options = {});

// Exhaustive layered label-correcting search keeping the full (g, safety)
// Pareto set per cell, no heuristic. Exponential in the worst case.
PathResult pareto_oracle(const RiskMap& map, const Case& c);

// Start/dest match, 4-adjacent steps, no repeated cell, safety >= epsilon.
bool validate_path(const RiskMap& map, const Case& c, std::span<const Coord> path);

// Trace text: one "flat,g,safety,f" line per pop.
std::string format_trace(std::span<const TraceRecord> trace);
std::vector<TraceRecord> parse_trace(const std::string& text);

}  // namespace riskpath
