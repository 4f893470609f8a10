#include "brute.hpp"
#include "riskpath/errors.hpp"
#include "riskpath/search.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace riskpath;

namespace {

// R: g00=0, g01=0.1, g10=0.05, g11=0.05.
RiskMap two_by_two() { return RiskMap(2, {1.0, 0.95, 0.9, 0.95}); }

RiskMap random_small(int m, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> s(static_cast<std::size_t>(m) * m);
    for (double& v : s) {
        const double r = u(rng);
        v = r < 0.2 ? 0.0 : r < 0.4 ? 1.0 : 1.0 - 0.06 * u(rng);
    }
    return RiskMap(m, s);
}

}  // namespace

TEST(AsdAStar, WorkedExample) {
    const RiskMap map = two_by_two();
    const Case c{"", {0, 0}, {1, 1}, 0.9};
    const PathResult r = asd_astar(map, c, ManhattanHeuristic{});
    ASSERT_TRUE(r.feasible());
    EXPECT_EQ(r.path, (std::vector<Coord>{{0, 0}, {1, 0}, {1, 1}}));
    EXPECT_EQ(r.length, 2);
    EXPECT_EQ(r.safety, 0.95 * 0.95);
}

TEST(AsdAStar, WorkedExampleInfeasibleAtHigherEpsilon) {
    const PathResult r = asd_astar(two_by_two(), {"", {0, 0}, {1, 1}, 0.95}, ManhattanHeuristic{});
    EXPECT_FALSE(r.feasible());
    EXPECT_EQ(r.length, -1);
}

TEST(AsdAStar, AllSafeGrid) {
    const PathResult r = asd_astar(RiskMap::uniform(5), {"", {0, 0}, {4, 4}, 0.5}, ManhattanHeuristic{});
    EXPECT_EQ(r.length, 8);
    EXPECT_EQ(r.safety, 1.0);
    EXPECT_EQ(r.nodes_explored, 9);
}

TEST(AsdAStar, EpsilonIsInclusive) {
    const RiskMap map = two_by_two();
    const PathResult r = asd_astar(map, {"", {0, 0}, {1, 1}, 0.95 * 0.95}, ManhattanHeuristic{});
    EXPECT_EQ(r.length, 2);
}

TEST(AsdAStar, UnsafeStartIsPoppedOnceAndRejected) {
    const RiskMap map(2, {0.5, 1, 1, 1});
    const PathResult r = asd_astar(map, {"", {0, 0}, {1, 1}, 0.9}, ManhattanHeuristic{});
    EXPECT_FALSE(r.feasible());
    EXPECT_EQ(r.nodes_explored, 1);
}

TEST(AsdAStar, RejectsDegenerateCase) {
    EXPECT_THROW(asd_astar(two_by_two(), {"", {0, 0}, {0, 0}, 0.9}, ManhattanHeuristic{}), UsageError);
}

TEST(AsdAStar, DetourAroundRiskyCorridor) {
    // The direct corridor is short but too risky; the safe route goes around.
    const RiskMap map = parse_map(
        "3\n"
        "1 1 1\n"
        "1 0 1\n"
        "1 0.5 1\n");
    const PathResult r = asd_astar(map, {"", {0, 0}, {2, 0}, 0.9}, ManhattanHeuristic{});
    EXPECT_EQ(r.length, 6);
    EXPECT_EQ(pareto_oracle(map, {"", {0, 0}, {2, 0}, 0.9}).length, 6);
    EXPECT_EQ(asd_astar(map, {"", {0, 0}, {2, 0}, 0.4}, ManhattanHeuristic{}).length, 2);
}

TEST(AsdAStar, TraceMatchesNodeCount) {
    std::vector<TraceRecord> trace;
    SearchOptions opt;
    opt.trace = &trace;
    const PathResult r = asd_astar(two_by_two(), {"", {0, 0}, {1, 1}, 0.9}, ManhattanHeuristic{}, opt);
    EXPECT_EQ(static_cast<std::int64_t>(trace.size()), r.nodes_explored);
    EXPECT_EQ(trace.front().cell, 0);
    EXPECT_EQ(trace.back().cell, 3);
    const auto parsed = parse_trace(format_trace(trace));
    ASSERT_EQ(parsed.size(), trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        EXPECT_EQ(parsed[i].cell, trace[i].cell);
        EXPECT_EQ(parsed[i].g, trace[i].g);
        EXPECT_EQ(parsed[i].safety, trace[i].safety);
        EXPECT_EQ(parsed[i].f, trace[i].f);
    }
    EXPECT_THROW(parse_trace("1,2,3\n"), ParseError);
}

TEST(Oracle, WorkedExample) {
    const PathResult r = pareto_oracle(two_by_two(), {"", {0, 0}, {1, 1}, 0.9});
    EXPECT_EQ(r.length, 2);
    EXPECT_EQ(r.safety, 0.95 * 0.95);
    EXPECT_FALSE(pareto_oracle(two_by_two(), {"", {0, 0}, {1, 1}, 0.95}).feasible());
}

TEST(Oracle, MatchesBruteForceOnSmallMaps) {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 150; ++trial) {
        const int m = 3 + trial % 2;
        const RiskMap map = random_small(m, rng);
        for (double eps : {0.8, 0.9}) {
            for (int a = 0; a < m * m; ++a) {
                for (int b = 0; b < m * m; ++b) {
                    if (a == b) continue;
                    const Case c{"", map.unflatten(a), map.unflatten(b), eps};
                    const int want = brute::shortest_length(map, c);
                    const PathResult o = pareto_oracle(map, c);
                    const PathResult s = asd_astar(map, c, ManhattanHeuristic{});
                    ASSERT_EQ(o.length, want) << trial << " " << a << "->" << b;
                    ASSERT_EQ(s.length, want) << trial << " " << a << "->" << b;
                    if (want >= 0) {
                        EXPECT_TRUE(validate_path(map, c, o.path));
                        EXPECT_TRUE(validate_path(map, c, s.path));
                        EXPECT_EQ(o.safety, path_safety(map, o.path));
                        EXPECT_EQ(s.safety, path_safety(map, s.path));
                    }
                }
            }
        }
    }
}

TEST(Invariants, AuditedSearchKeepsParetoListsAndMonotoneChains) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 60; ++trial) {
        const int m = 4 + trial % 5;
        const RiskMap map = random_small(m, rng);
        const ManhattanHeuristic manhattan_h;
        AsdAStar search(map, manhattan_h);
        for (int k = 0; k < 5; ++k) {
            std::uniform_int_distribution<int> cell(0, m * m - 1);
            const int a = cell(rng);
            int b = cell(rng);
            if (a == b) b = (b + 1) % (m * m);
            const Case c{"", map.unflatten(a), map.unflatten(b), 0.85};
            SearchOptions opt;
            opt.audit = true;
            const PathResult r = search.solve(c, opt);
            if (r.feasible()) {
                EXPECT_TRUE(validate_path(map, c, r.path));
                EXPECT_EQ(static_cast<int>(r.path.size()) - 1, r.length);
            }
            const auto& labels = search.labels();
            for (const Label& l : labels) {
                if (l.parent < 0) continue;
                const Label& p = labels[l.parent];
                EXPECT_LE(l.safety, p.safety);
                EXPECT_EQ(l.g, p.g + 1);
                EXPECT_EQ(manhattan(map.unflatten(l.cell), map.unflatten(p.cell)), 1);
            }
            for (int cell_i = 0; cell_i < m * m; ++cell_i) {
                const auto& kept = search.kept(cell_i);
                for (auto i : kept)
                    for (auto j : kept)
                        if (i != j) {
                            const Label& x = labels[i];
                            const Label& y = labels[j];
                            EXPECT_FALSE(x.f <= y.f && x.safety >= y.safety);
                        }
            }
        }
    }
}

TEST(ValidatePath, Examples) {
    const RiskMap map = two_by_two();
    const Case c{"", {0, 0}, {1, 1}, 0.9};
    EXPECT_TRUE(validate_path(map, c, std::vector<Coord>{{0, 0}, {1, 0}, {1, 1}}));
    EXPECT_FALSE(validate_path(map, c, std::vector<Coord>{{0, 0}, {0, 1}, {1, 1}}));
    EXPECT_FALSE(validate_path(map, c, std::vector<Coord>{{0, 0}, {1, 0}, {0, 0}, {1, 0}, {1, 1}}));
    EXPECT_FALSE(validate_path(map, c, std::vector<Coord>{{0, 0}, {1, 1}}));
    EXPECT_FALSE(validate_path(map, c, std::vector<Coord>{{0, 0}, {1, 0}}));
    EXPECT_FALSE(validate_path(map, c, std::vector<Coord>{}));
    EXPECT_NEAR(path_safety(map, std::vector<Coord>{{0, 0}, {0, 1}, {1, 1}}), 0.855, 1e-15);
}
