#include "riskpath/search.hpp"

#include <algorithm>
#include <chrono>

namespace riskpath {

namespace {

struct OracleLabel {
    int cell;
    int g;
    double safety;
    std::int32_t parent;
};

}  // namespace

// Breadth-first over path length: layer g holds every label with exactly g
// steps that no other label (g' <= g, safety' >= safety) dominates. With unit
// edge costs the first layer containing a destination label that meets
// epsilon is the optimum. A minimum-length feasible path is simple, so no
// more than m*m - 1 layers are ever needed.
PathResult pareto_oracle(const RiskMap& map, const Case& c) {
    check_case(map, c);
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<OracleLabel> arena;
    std::vector<std::uint8_t> dead;
    std::vector<std::vector<std::int32_t>> pareto(map.cell_count());
    const int start = map.flatten(c.start);
    const int dest = map.flatten(c.dest);

    arena.push_back({start, 0, map.safety(start), -1});
    dead.push_back(0);
    pareto[start].push_back(0);
    std::vector<std::int32_t> layer{0};

    PathResult result;
    const int max_layers = map.cell_count() - 1;
    for (int g = 0; g < max_layers && !layer.empty(); ++g) {
        std::vector<std::int32_t> next;
        for (std::int32_t idx : layer) {
            if (dead[idx]) continue;
            ++result.nodes_explored;
            const OracleLabel cur = arena[idx];
            for (const Coord n : neighbors(map, map.unflatten(cur.cell))) {
                const int v = map.flatten(n);
                const OracleLabel fresh{v, cur.g + 1, cur.safety * map.safety(v), idx};
                auto& front = pareto[v];
                const bool dominated = std::any_of(front.begin(), front.end(), [&](std::int32_t k) {
                    return arena[k].g <= fresh.g && arena[k].safety >= fresh.safety;
                });
                if (dominated) continue;
                std::erase_if(front, [&](std::int32_t k) {
                    if (fresh.g <= arena[k].g && fresh.safety >= arena[k].safety) {
                        dead[k] = 1;
                        return true;
                    }
                    return false;
                });
                arena.push_back(fresh);
                dead.push_back(0);
                const auto fresh_idx = static_cast<std::int32_t>(arena.size() - 1);
                front.push_back(fresh_idx);
                next.push_back(fresh_idx);
            }
        }

        std::int32_t best = -1;
        for (std::int32_t idx : next) {
            if (dead[idx] || arena[idx].cell != dest || arena[idx].safety < c.epsilon) continue;
            if (best < 0 || arena[idx].safety > arena[best].safety) best = idx;
        }
        if (best >= 0) {
            for (std::int32_t k = best; k >= 0; k = arena[k].parent) {
                result.path.push_back(map.unflatten(arena[k].cell));
            }
            std::reverse(result.path.begin(), result.path.end());
            result.length = arena[best].g;
            result.safety = path_safety(map, result.path);
            break;
        }
        layer = std::move(next);
    }
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace riskpath
