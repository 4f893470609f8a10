#include "riskpath/expert.hpp"

#include "riskpath/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <queue>
#include <utility>

namespace riskpath {

TableHeuristic::TableHeuristic(HeuristicTable table, std::string name)
    : table_(std::move(table)), name_(std::move(name)) {
    const auto n = static_cast<std::size_t>(table_.m) * table_.m;
    if (table_.h.size() != n || table_.infeasible.size() != n) {
        throw UsageError("heuristic table size does not match m*m");
    }
}

SafetyField max_safety_field(const RiskMap& map, Coord anchor) {
    if (!map.in_bounds(anchor)) {
        throw UsageError("max_safety_field: anchor off the map");
    }
    const int n = map.cell_count();
    SafetyField field{map.size(), std::vector<double>(n, 0.0), std::vector<int>(n, -1)};
    std::vector<std::uint8_t> done(n, 0);

    // Max-heap on safety, lower flat index first on ties.
    using Entry = std::pair<double, int>;
    auto cmp = [](const Entry& a, const Entry& b) {
        return a.first != b.first ? a.first < b.first : a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    const int a = map.flatten(anchor);
    field.best[a] = map.safety(a);
    heap.push({field.best[a], a});
    while (!heap.empty()) {
        const auto [s, u] = heap.top();
        heap.pop();
        if (done[u]) continue;
        done[u] = 1;
        if (s <= 0.0) continue;
        for (const Coord nb : neighbors(map, map.unflatten(u))) {
            const int v = map.flatten(nb);
            const double cand = s * map.safety(v);
            if (!done[v] && cand > field.best[v]) {
                field.best[v] = cand;
                field.parent[v] = u;
                heap.push({cand, v});
            }
        }
    }
    return field;
}

namespace {

// Two internally vertex-disjoint arms from a pivot cell, one ending at the
// start and one at the destination, with maximum combined safety. Solved as a
// 2-unit min-cost flow over split cell nodes (in -> out carries -log S).
class DisjointArms {
public:
    DisjointArms(const RiskMap& map, int start, int dest) : map_(map), n_(map.cell_count()) {
        adj_.resize(2 * n_ + 1);
        for (int v = 0; v < n_; ++v) {
            const double s = map.safety(v);
            if (s <= 0.0) continue;
            add_arc(in(v), out(v), -std::log(s));
            for (const Coord nb : neighbors(map, map.unflatten(v))) {
                const int w = map.flatten(nb);
                if (map.safety(w) > 0.0) add_arc(out(v), in(w), 0.0);
            }
        }
        add_arc(out(start), sink(), 0.0);
        add_arc(out(dest), sink(), 0.0);
        start_ = start;
    }

    // Product safety of the best simple start -> pivot -> dest path, multiplied
    // in path order; 0 when no such path exists.
    double best_through(int pivot) {
        for (Arc& a : arcs_) a.cap = a.orig_cap;
        std::vector<double> pot(adj_.size(), 0.0);
        for (int unit = 0; unit < 2; ++unit) {
            if (!augment(out(pivot), in(pivot), pot)) return 0.0;
        }
        std::vector<int> arm_a = follow(pivot, 0);
        std::vector<int> arm_b = follow(pivot, 1);
        if (arm_a.empty() || arm_b.empty()) return 0.0;
        if (arm_a.back() != start_) std::swap(arm_a, arm_b);
        // start ... pivot ... dest
        double s = 1.0;
        for (auto it = arm_a.rbegin(); it != arm_a.rend(); ++it) s *= map_.safety(*it);
        s *= map_.safety(pivot);
        for (int v : arm_b) s *= map_.safety(v);
        return s;
    }

private:
    struct Arc {
        int to;
        int cap;
        int orig_cap;
        double cost;
        int rev;
        bool forward;
    };

    int in(int v) const { return 2 * v; }
    int out(int v) const { return 2 * v + 1; }
    int sink() const { return 2 * n_; }

    void add_arc(int from, int to, double cost) {
        adj_[from].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({to, 1, 1, cost, static_cast<int>(arcs_.size()) + 1, true});
        adj_[to].push_back(static_cast<int>(arcs_.size()));
        arcs_.push_back({from, 0, 0, -cost, static_cast<int>(arcs_.size()) - 1, false});
    }

    bool augment(int source, int banned, std::vector<double>& pot) {
        constexpr double kInf = std::numeric_limits<double>::infinity();
        std::vector<double> dist(adj_.size(), kInf);
        std::vector<int> via(adj_.size(), -1);
        using Entry = std::pair<double, int>;
        std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
        dist[source] = 0.0;
        heap.push({0.0, source});
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (d > dist[u]) continue;
            for (int ai : adj_[u]) {
                const Arc& a = arcs_[ai];
                if (a.cap <= 0 || a.to == banned) continue;
                const double nd = d + std::max(0.0, a.cost + pot[u] - pot[a.to]);
                if (nd < dist[a.to]) {
                    dist[a.to] = nd;
                    via[a.to] = ai;
                    heap.push({nd, a.to});
                }
            }
        }
        if (dist[sink()] == kInf) return false;
        for (std::size_t v = 0; v < pot.size(); ++v) {
            if (dist[v] < kInf) pot[v] += dist[v];
        }
        for (int v = sink(); v != source;) {
            Arc& a = arcs_[via[v]];
            a.cap -= 1;
            arcs_[a.rev].cap += 1;
            v = arcs_[a.rev].to;
        }
        return true;
    }

    // Cells along the k-th unit of flow leaving the pivot, pivot excluded.
    std::vector<int> follow(int pivot, int k) const {
        std::vector<int> cells;
        int node = out(pivot);
        int skip = k;
        while (node != sink()) {
            int next = -1;
            for (int ai : adj_[node]) {
                const Arc& a = arcs_[ai];
                if (a.forward && a.cap < a.orig_cap) {
                    if (node == out(pivot) && skip-- > 0) continue;
                    next = a.to;
                    break;
                }
            }
            if (next < 0) return {};
            if (next == sink()) break;
            const int cell = next / 2;
            cells.push_back(cell);
            node = out(cell);
            if (cells.size() > static_cast<std::size_t>(n_)) return {};
        }
        return cells;
    }

    const RiskMap& map_;
    int n_;
    int start_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::vector<int>> adj_;
};

// Cells on the tree path from `cell` back to the field's anchor, cell first.
std::vector<int> tree_path(const SafetyField& field, int cell) {
    std::vector<int> path;
    for (int v = cell; v >= 0; v = field.parent[v]) path.push_back(v);
    return path;
}

}  // namespace

std::vector<std::uint8_t> infeasible_mask(const RiskMap& map, const Case& c) {
    check_case(map, c);
    const int n = map.cell_count();
    const int start = map.flatten(c.start);
    const int dest = map.flatten(c.dest);
    const SafetyField from_start = max_safety_field(map, c.start);
    const SafetyField from_dest = max_safety_field(map, c.dest);

    std::vector<std::uint8_t> mask(n, 1);
    auto ordered_product = [&](const std::vector<int>& cells) {
        double s = 1.0;
        for (int v : cells) s *= map.safety(v);
        return s;
    };

    // Start and destination themselves: any simple start -> dest path will do.
    {
        std::vector<int> best = tree_path(from_start, dest);
        std::reverse(best.begin(), best.end());
        const bool reachable = !best.empty() && best.front() == start;
        const bool ok = reachable && from_start.best[dest] > 0.0 && ordered_product(best) >= c.epsilon;
        mask[start] = ok ? 0 : 1;
        mask[dest] = ok ? 0 : 1;
        if (!ok) {
            // No feasible path at all: every cell is infeasible.
            std::fill(mask.begin(), mask.end(), 1);
            return mask;
        }
    }

    // The walk bound best_start * best_dest / S(n) is an upper bound over simple
    // paths, so cells below it are infeasible. Cells above it are confirmed with
    // the tree arms when those are disjoint and with the exact arm solver otherwise.
    constexpr double kSlack = 1e-12;
    std::optional<DisjointArms> arms;
    std::vector<std::uint8_t> on_arm(n, 0);
    for (int v = 0; v < n; ++v) {
        if (v == start || v == dest) continue;
        const double s = map.safety(v);
        if (s <= 0.0) continue;
        const double bound = from_start.best[v] * from_dest.best[v] / s;
        if (bound < c.epsilon * (1.0 - kSlack)) continue;

        const std::vector<int> to_start = tree_path(from_start, v);  // v ... start
        const std::vector<int> to_dest = tree_path(from_dest, v);    // v ... dest
        if (to_start.back() != start || to_dest.back() != dest) continue;
        for (int u : to_start) on_arm[u] = 1;
        bool disjoint = true;
        for (std::size_t k = 1; k < to_dest.size(); ++k) disjoint = disjoint && !on_arm[to_dest[k]];
        for (int u : to_start) on_arm[u] = 0;

        double through = 0.0;
        if (disjoint) {
            std::vector<int> path(to_start.rbegin(), to_start.rend());
            path.insert(path.end(), to_dest.begin() + 1, to_dest.end());
            through = ordered_product(path);
        }
        if (!disjoint || through < c.epsilon) {
            if (!arms) arms.emplace(map, start, dest);
            through = std::max(through, arms->best_through(v));
        }
        mask[v] = through >= c.epsilon ? 0 : 1;
    }
    return mask;
}

HeuristicTable expert_heuristic(const RiskMap& map, const Case& c) {
    const PathResult optimal = pareto_oracle(map, c);
    if (!optimal.feasible()) {
        throw UsageError("expert_heuristic: case has no feasible path");
    }
    return expert_heuristic(map, c, optimal);
}

HeuristicTable expert_heuristic(const RiskMap& map, const Case& c, const PathResult& optimal) {
    if (!optimal.feasible()) {
        throw UsageError("expert_heuristic: case has no feasible path");
    }
    const int n = map.cell_count();
    HeuristicTable table{map.size(), std::vector<double>(n), infeasible_mask(map, c)};
    for (int i = 0; i < n; ++i) table.h[i] = manhattan(map.unflatten(i), c.dest);
    const int length = optimal.length;
    for (int k = 0; k <= length; ++k) {
        const int cell = map.flatten(optimal.path[k]);
        table.h[cell] = length - k;
        if (table.infeasible[cell]) {
            throw CorrectnessError("infeasible mask covers a cell of the optimal path");
        }
    }
    return table;
}

}  // namespace riskpath
