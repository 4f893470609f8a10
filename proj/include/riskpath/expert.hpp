// Expert heuristic tables: exact cost-to-go along one optimal path, Manhattan
// elsewhere, and a mask of cells no feasible path can pass through.
#pragma once

#include "riskpath/riskmap.hpp"
#include "riskpath/search.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace riskpath {

// Target written for infeasible cells in datasets and learned outputs.
inline double h_inf(int m) noexcept { return 4.0 * m; }

struct HeuristicTable {
    int m = 0;
    std::vector<double> h;
    std::vector<std::uint8_t> infeasible;

    friend bool operator==(const HeuristicTable&, const HeuristicTable&) = default;
};

// Per-case table lookup. The case argument is ignored: one table serves one case.
class TableHeuristic final : public Heuristic {
public:
    TableHeuristic(HeuristicTable table, std::string name);

    double evaluate(const Case&, Coord cell) const override {
        return table_.h[cell.y * table_.m + cell.x];
    }
    bool is_infeasible(const Case&, Coord cell) const override {
        return table_.infeasible[cell.y * table_.m + cell.x] != 0;
    }
    std::string name() const override { return name_; }
    const HeuristicTable& table() const noexcept { return table_; }

private:
    HeuristicTable table_;
    std::string name_;
};

struct SafetyField {
    int m = 0;
    std::vector<double> best;  // best[i]: max product safety anchor -> i, anchor included
    std::vector<int> parent;   // predecessor of i toward the anchor, -1 at anchor / unreachable
};

SafetyField max_safety_field(const RiskMap& map, Coord anchor);

// Marks every cell that lies on no simple start -> cell -> dest path with
// product safety >= epsilon. Blocked cells are always marked.
std::vector<std::uint8_t> infeasible_mask(const RiskMap& map, const Case& c);

// Throws UsageError when the case has no feasible path.
HeuristicTable expert_heuristic(const RiskMap& map, const Case& c);
// Same, reusing an already computed optimal path.
HeuristicTable expert_heuristic(const RiskMap& map, const Case& c, const PathResult& optimal);

struct DatasetRecord {
    std::vector<double> safety;
    int start_flat = 0;
    int dest_flat = 0;
    double epsilon = 0.0;
    std::vector<double> target;  // h, with h_inf(m) on infeasible cells
    std::vector<std::uint8_t> mask;

    friend bool operator==(const DatasetRecord&, const DatasetRecord&) = default;
};

DatasetRecord make_record(const RiskMap& map, const Case& c, const HeuristicTable& table);

// Streams records for a single grid size to a dataset file.
class DatasetWriter {
public:
    DatasetWriter(const std::filesystem::path& path, int m);
    ~DatasetWriter();
    DatasetWriter(const DatasetWriter&) = delete;
    DatasetWriter& operator=(const DatasetWriter&) = delete;

    void write(const DatasetRecord& record);
    std::size_t count() const noexcept { return count_; }

private:
    std::unique_ptr<std::ofstream> out_;
    int m_;
    std::size_t count_ = 0;
};

// cases, maps and tables are parallel: record k uses (*maps[k], cases[k], tables[k]).
void export_dataset(std::span<const Case> cases, std::span<const RiskMap* const> maps,
                    std::span<const HeuristicTable> tables, const std::filesystem::path& path);

struct Dataset {
    int m = 0;
    std::vector<DatasetRecord> records;
};

Dataset load_dataset(const std::filesystem::path& path);

}  // namespace riskpath
