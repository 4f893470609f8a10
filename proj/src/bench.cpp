#include "riskpath/bench.hpp"

#include "riskpath/errors.hpp"
#include "riskpath/expert.hpp"
#include "riskpath/nnheur.hpp"
#include "text_io.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>

namespace riskpath {

std::string to_string(HeuristicKind kind) {
    switch (kind) {
        case HeuristicKind::Manhattan: return "manhattan";
        case HeuristicKind::Expert: return "expert";
        case HeuristicKind::Learned: return "nn";
    }
    return "?";
}

HeuristicKind parse_heuristic_kind(const std::string& name) {
    if (name == "manhattan") return HeuristicKind::Manhattan;
    if (name == "expert") return HeuristicKind::Expert;
    if (name == "nn") return HeuristicKind::Learned;
    throw UsageError("unknown heuristic '" + name + "' (expected manhattan, expert or nn)");
}

namespace {

CaseOutcome run_one(HeuristicKind kind, const BenchCase& bc, std::size_t index, const TransformerModel* model) {
    const RiskMap& map = *bc.map;
    const auto t0 = std::chrono::steady_clock::now();
    PathResult result;
    switch (kind) {
        case HeuristicKind::Manhattan:
            result = asd_astar(map, bc.query, ManhattanHeuristic{});
            break;
        case HeuristicKind::Expert:
            result = asd_astar(map, bc.query, TableHeuristic(expert_heuristic(map, bc.query), "expert"));
            break;
        case HeuristicKind::Learned:
            result = asd_astar(map, bc.query, TableHeuristic(nn_heuristic(map, bc.query, *model), "nn"));
            break;
    }
    const double elapsed =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    if (!result.feasible()) {
        throw CorrectnessError(to_string(kind) + " heuristic found no path for case " + std::to_string(index));
    }
    if (!validate_path(map, bc.query, result.path)) {
        throw CorrectnessError(to_string(kind) + " heuristic returned an invalid path for case " +
                               std::to_string(index));
    }
    return CaseOutcome{index, to_string(kind), result.nodes_explored, elapsed, result.length, true};
}

bool challenger_wins(const CaseOutcome& a, const CaseOutcome& b) {
    return b.elapsed_ms <= a.elapsed_ms && b.path_length <= a.path_length;
}

}  // namespace

std::pair<double, double> win_ratio(std::span<const CaseOutcome> a, std::span<const CaseOutcome> b) {
    if (a.size() != b.size() || a.empty()) {
        throw UsageError("win_ratio needs two equally sized, non-empty outcome lists");
    }
    std::size_t b_wins = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].case_index != b[i].case_index) {
            throw UsageError("win_ratio: outcomes are not paired on the same cases");
        }
        if (challenger_wins(a[i], b[i])) ++b_wins;
    }
    const double n = static_cast<double>(a.size());
    const double rb = static_cast<double>(b_wins) / n;
    return {static_cast<double>(a.size() - b_wins) / n, rb};
}

BenchRun run_bench(std::span<const BenchCase> cases, std::span<const HeuristicKind> heuristics,
                   const TransformerModel* model, int jobs) {
    if (cases.empty()) throw UsageError("run_bench: no cases");
    if (heuristics.empty()) throw UsageError("run_bench: no heuristics");
    for (HeuristicKind k : heuristics) {
        if (k == HeuristicKind::Learned && !model) throw UsageError("run_bench: nn heuristic needs weights");
    }
    for (const BenchCase& bc : cases) {
        if (!bc.map) throw UsageError("run_bench: case without a map");
    }

    BenchRun run;
    run.outcomes.assign(heuristics.size(), std::vector<CaseOutcome>(cases.size()));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cases.size()) return;
            try {
                for (std::size_t h = 0; h < heuristics.size(); ++h) {
                    run.outcomes[h][i] = run_one(heuristics[h], cases[i], i, model);
                }
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cases.size();
                return;
            }
        }
    };
    const int threads = std::max(1, jobs);
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    const double n = static_cast<double>(cases.size());
    for (std::size_t h = 0; h < heuristics.size(); ++h) {
        HeuristicSummary row;
        row.heuristic = to_string(heuristics[h]);
        row.cases = cases.size();
        std::int64_t nodes = 0;
        double time = 0.0, len = 0.0;
        for (const CaseOutcome& o : run.outcomes[h]) {
            nodes += o.nodes_explored;
            time += o.elapsed_ms;
            len += o.path_length;
        }
        row.avg_nodes = static_cast<double>(nodes) / n;
        row.avg_time_ms = time / n;
        row.avg_len = len / n;
        if (h > 0) {
            row.win_ratio = win_ratio(run.outcomes[0], run.outcomes[h]).second;
        } else {
            // Baseline wins a case when it beats every challenger.
            std::size_t wins = 0;
            for (std::size_t i = 0; i < cases.size(); ++i) {
                bool all = true;
                for (std::size_t c = 1; c < heuristics.size(); ++c) {
                    all = all && !challenger_wins(run.outcomes[0][i], run.outcomes[c][i]);
                }
                if (all) ++wins;
            }
            row.win_ratio = static_cast<double>(wins) / n;
        }
        run.report.rows.push_back(std::move(row));
    }
    return run;
}

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string pad(std::string s, std::size_t width) {
    if (s.size() < width) s.append(width - s.size(), ' ');
    return s;
}

}  // namespace

std::string format_report(const BenchmarkReport& report, ReportFormat format) {
    if (format == ReportFormat::Csv) {
        std::string out = "heuristic,cases,avg_nodes,avg_time_ms,avg_len,win_ratio\n";
        for (const auto& r : report.rows) {
            out += r.heuristic + "," + std::to_string(r.cases) + "," + detail::format_double(r.avg_nodes) + "," +
                   detail::format_double(r.avg_time_ms) + "," + detail::format_double(r.avg_len) + "," +
                   detail::format_double(r.win_ratio) + "\n";
        }
        return out;
    }

    constexpr std::size_t kLabel = 28, kCol = 14;
    std::string out;
    auto row = [&](const char* label, auto&& cell) {
        std::string line = pad(label, kLabel);
        for (const auto& r : report.rows) line += pad(cell(r), kCol);
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    };
    row("result", [](const HeuristicSummary& r) { return r.heuristic; });
    row("total number of test case", [](const HeuristicSummary& r) { return std::to_string(r.cases); });
    row("average nodes explored", [](const HeuristicSummary& r) { return fixed(r.avg_nodes, 1); });
    row("average time cost (ms)", [](const HeuristicSummary& r) { return fixed(r.avg_time_ms, 2); });
    row("average path length", [](const HeuristicSummary& r) { return fixed(r.avg_len, 2); });
    row("faster test case ratio", [](const HeuristicSummary& r) { return fixed(100.0 * r.win_ratio, 1) + "%"; });
    return out;
}

BenchmarkReport parse_report_csv(const std::string& text) {
    const auto lines = detail::lines_of(text);
    if (lines.empty() || detail::split(lines[0], ',') !=
                             std::vector<std::string_view>{"heuristic", "cases", "avg_nodes", "avg_time_ms",
                                                           "avg_len", "win_ratio"}) {
        throw ParseError("report header must be 'heuristic,cases,avg_nodes,avg_time_ms,avg_len,win_ratio'", 1);
    }
    BenchmarkReport report;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (detail::blank(lines[k])) continue;
        const int line_no = static_cast<int>(k) + 1;
        const auto t = detail::split(lines[k], ',');
        if (t.size() != 6) throw ParseError("report rows need 6 fields", line_no);
        HeuristicSummary r;
        r.heuristic = std::string(t[0]);
        const int cases = detail::to_int(t[1], line_no);
        if (cases < 0) throw ParseError("negative case count", line_no);
        r.cases = static_cast<std::size_t>(cases);
        r.avg_nodes = detail::to_double(t[2], line_no);
        r.avg_time_ms = detail::to_double(t[3], line_no);
        r.avg_len = detail::to_double(t[4], line_no);
        r.win_ratio = detail::to_double(t[5], line_no);
        report.rows.push_back(std::move(r));
    }
    return report;
}

void export_report(const BenchmarkReport& report, const std::filesystem::path& path, ReportFormat format) {
    if (report.rows.empty() || report.rows.front().cases == 0) {
        throw UsageError("refusing to export an empty report");
    }
    detail::write_file(path, format_report(report, format));
}

std::vector<std::int64_t> exploration_counts(std::span<const TraceRecord> trace, int m) {
    std::vector<std::int64_t> counts(static_cast<std::size_t>(m) * m, 0);
    for (const TraceRecord& r : trace) {
        if (r.cell < 0 || r.cell >= m * m) throw UsageError("trace cell outside the map");
        ++counts[r.cell];
    }
    return counts;
}

std::string format_exploration_grid(std::span<const TraceRecord> trace, const RiskMap& map, const Case& c,
                                    std::span<const Coord> path) {
    const int m = map.size();
    const auto counts = exploration_counts(trace, m);
    std::vector<char> marker(counts.size(), 0);
    for (const Coord& p : path) marker[map.flatten(p)] = '*';
    marker[map.flatten(c.start)] = 'S';
    marker[map.flatten(c.dest)] = 'D';
    std::string out = std::to_string(m) + "\n";
    for (int y = m - 1; y >= 0; --y) {
        for (int x = 0; x < m; ++x) {
            const int i = y * m + x;
            if (x > 0) out += ' ';
            out += std::to_string(counts[i]);
            if (marker[i]) out += marker[i];
        }
        out += '\n';
    }
    return out;
}

void export_exploration_grid(std::span<const TraceRecord> trace, const RiskMap& map, const Case& c,
                             std::span<const Coord> path, const std::filesystem::path& file) {
    detail::write_file(file, format_exploration_grid(trace, map, c, path));
}

}  // namespace riskpath
