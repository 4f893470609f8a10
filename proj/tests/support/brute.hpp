// Exhaustive simple-path enumeration used as an independent oracle in tests.
// Exponential; keep maps at 4x4 or smaller.
#pragma once

#include "riskpath/riskmap.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace brute {

// Shortest simple path length meeting c.epsilon, -1 when none exists.
int shortest_length(const riskpath::RiskMap& map, const riskpath::Case& c);

// 1 for every cell that lies on no simple start -> dest path meeting c.epsilon.
std::vector<std::uint8_t> infeasible_cells(const riskpath::RiskMap& map, const riskpath::Case& c);

// Max product safety over simple paths from anchor to each cell, anchor included.
std::vector<double> best_safety(const riskpath::RiskMap& map, riskpath::Coord anchor);

// One golden forward record written by tests/fixtures/make_fixtures.py.
struct ForwardFixture {
    riskpath::RiskMap map;
    riskpath::Case query;
    std::vector<double> output;
};

ForwardFixture read_fixture(const std::filesystem::path& file);
std::vector<std::filesystem::path> fixture_files(const std::filesystem::path& dir);

}  // namespace brute
