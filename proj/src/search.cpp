#include "riskpath/search.hpp"

#include "riskpath/errors.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <string>

namespace riskpath {

double path_safety(const RiskMap& map, std::span<const Coord> path) {
    double s = 1.0;
    for (const Coord& c : path) s *= map.safety(c);
    return s;
}

namespace {

// Min f, then max safety, then max g, then first inserted.
struct FrontierEntry {
    double f;
    double safety;
    int g;
    std::int32_t label;

    bool operator<(const FrontierEntry& o) const {  // "lower priority than"
        if (f != o.f) return f > o.f;
        if (safety != o.safety) return safety < o.safety;
        if (g != o.g) return g < o.g;
        return label > o.label;
    }
};

bool weakly_dominates(const Label& a, const Label& b) { return a.f <= b.f && a.safety >= b.safety; }

std::vector<Coord> unwind(const std::vector<Label>& labels, std::int32_t idx, const RiskMap& map) {
    std::vector<Coord> path;
    for (; idx >= 0; idx = labels[idx].parent) path.push_back(map.unflatten(labels[idx].cell));
    std::reverse(path.begin(), path.end());
    return path;
}

}  // namespace

AsdAStar::AsdAStar(const RiskMap& map, const Heuristic& heuristic) : map_(map), heuristic_(heuristic) {}

bool AsdAStar::insert(std::int32_t idx, bool audit) {
    const Label& fresh = labels_[idx];
    auto& list = kept_[fresh.cell];
    for (std::int32_t k : list) {
        if (weakly_dominates(labels_[k], fresh)) return false;
    }
    std::erase_if(list, [&](std::int32_t k) {
        if (weakly_dominates(fresh, labels_[k])) {
            dead_[k] = 1;
            return true;
        }
        return false;
    });
    list.push_back(idx);
    if (audit) {
        for (std::size_t i = 0; i < list.size(); ++i)
            for (std::size_t j = 0; j < list.size(); ++j)
                if (i != j && weakly_dominates(labels_[list[i]], labels_[list[j]])) {
                    throw CorrectnessError("dominance violated at cell " + std::to_string(fresh.cell));
                }
    }
    return true;
}

PathResult AsdAStar::solve(const Case& c, const SearchOptions& options) {
    check_case(map_, c);
    const auto t0 = std::chrono::steady_clock::now();

    labels_.clear();
    dead_.clear();
    kept_.assign(map_.cell_count(), {});
    std::priority_queue<FrontierEntry> frontier;
    const int dest = map_.flatten(c.dest);

    auto push = [&](const Label& l) {
        labels_.push_back(l);
        dead_.push_back(0);
        const auto idx = static_cast<std::int32_t>(labels_.size() - 1);
        if (insert(idx, options.audit)) {
            frontier.push({l.f, l.safety, l.g, idx});
        } else {
            labels_.pop_back();
            dead_.pop_back();
        }
    };

    // The start label goes in unconditionally; if it already misses epsilon it is rejected on pop.
    const int start = map_.flatten(c.start);
    push(Label{start, map_.safety(start), 0, heuristic_.evaluate(c, c.start), -1});

    PathResult result;
    while (!frontier.empty()) {
        const FrontierEntry top = frontier.top();
        frontier.pop();
        if (dead_[top.label]) continue;
        const Label cur = labels_[top.label];
        ++result.nodes_explored;
        if (options.trace) options.trace->push_back({cur.cell, cur.g, cur.safety, cur.f});
        if (cur.safety < c.epsilon) continue;
        if (cur.cell == dest) {
            result.path = unwind(labels_, top.label, map_);
            result.length = cur.g;
            result.safety = cur.safety;
            break;
        }
        for (const Coord n : neighbors(map_, map_.unflatten(cur.cell))) {
            const double s = cur.safety * map_.safety(n);
            if (s < c.epsilon || heuristic_.is_infeasible(c, n)) continue;
            const int g = cur.g + 1;
            push(Label{map_.flatten(n), s, g, g + heuristic_.evaluate(c, n), top.label});
        }
    }
    result.elapsed_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

PathResult asd_astar(const RiskMap& map, const Case& c, const Heuristic& heuristic,
                     const SearchOptions& options) {
    AsdAStar search(map, heuristic);
    return search.solve(c, options);
}

bool validate_path(const RiskMap& map, const Case& c, std::span<const Coord> path) {
    if (path.empty() || !(path.front() == c.start) || !(path.back() == c.dest)) return false;
    std::vector<std::uint8_t> seen(map.cell_count(), 0);
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (!map.in_bounds(path[i])) return false;
        auto& mark = seen[map.flatten(path[i])];
        if (mark) return false;
        mark = 1;
        if (i > 0 && manhattan(path[i - 1], path[i]) != 1) return false;
    }
    return path_safety(map, path) >= c.epsilon;
}

std::string format_trace(std::span<const TraceRecord> trace) {
    std::string out;
    for (const TraceRecord& r : trace) {
        out += std::to_string(r.cell) + "," + std::to_string(r.g) + "," + detail::format_double(r.safety) + "," +
               detail::format_double(r.f) + "\n";
    }
    return out;
}

std::vector<TraceRecord> parse_trace(const std::string& text) {
    std::vector<TraceRecord> trace;
    const auto lines = detail::lines_of(text);
    for (std::size_t k = 0; k < lines.size(); ++k) {
        if (detail::blank(lines[k])) continue;
        const int line_no = static_cast<int>(k) + 1;
        const auto toks = detail::split(lines[k], ',');
        if (toks.size() != 4) throw ParseError("trace line needs 4 fields", line_no);
        trace.push_back({detail::to_int(toks[0], line_no), detail::to_int(toks[1], line_no),
                         detail::to_double(toks[2], line_no), detail::to_double(toks[3], line_no)});
    }
    return trace;
}

}  // namespace riskpath
