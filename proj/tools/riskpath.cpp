// riskpath: command-line front end for map generation, case enumeration,
// single-query solving, expert dataset export and benchmarking.
#include "riskpath/bench.hpp"
#include "riskpath/errors.hpp"
#include "riskpath/expert.hpp"
#include "riskpath/nnheur.hpp"
#include "riskpath/riskmap.hpp"
#include "riskpath/search.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace riskpath;

namespace {

Coord parse_coord(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos) throw UsageError("expected X,Y but got '" + text + "'");
    try {
        std::size_t used = 0;
        const int x = std::stoi(text.substr(0, comma), &used);
        if (used != comma) throw UsageError("bad coordinate '" + text + "'");
        const std::string rest = text.substr(comma + 1);
        const int y = std::stoi(rest, &used);
        if (used != rest.size()) throw UsageError("bad coordinate '" + text + "'");
        return {x, y};
    } catch (const std::logic_error&) {
        throw UsageError("bad coordinate '" + text + "'");
    }
}

struct NamedMap {
    std::string id;
    RiskMap map;
};

// Every *.map file in dir, ordered by file name; the id is the file stem.
std::vector<NamedMap> load_map_dir(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw UsageError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".map") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw UsageError("no .map files in " + dir.string());
    std::vector<NamedMap> maps;
    for (const auto& f : files) maps.push_back({f.stem().string(), load_map(f)});
    return maps;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    for (std::string item; std::getline(in, item, ',');) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::unique_ptr<TransformerModel> load_model(const std::string& path) {
    auto [config, weights] = load_weights(path);
    (void)config;
    return std::make_unique<TransformerModel>(std::move(weights));
}

int cmd_gen(const std::string& kind, int size, std::uint64_t seed, const WindParams& wind_in,
            const std::string& wind_dir, const std::string& out) {
    RiskMap map;
    if (kind == "random") {
        map = gen_random_map(size, seed);
    } else if (kind == "wind") {
        WindParams wind = wind_in;
        wind.seed = seed;
        wind.wind_direction = parse_wind_direction(wind_dir);
        map = gen_windflow_map(size, wind);
    } else {
        throw UsageError("--kind must be random or wind");
    }
    save_map(map, out);
    return 0;
}

int cmd_cases(const std::string& map_path, double epsilon, std::size_t limit, const std::string& out) {
    const RiskMap map = load_map(map_path);
    const auto cases = enumerate_cases(map, epsilon, limit);
    save_cases(cases, out);
    std::cout << cases.size() << " cases\n";
    return 0;
}

int cmd_solve(const std::string& map_path, const std::string& start, const std::string& dest, double epsilon,
              const std::string& heuristic, const std::string& weights, const std::string& trace_path,
              const std::string& grid_path) {
    const RiskMap map = load_map(map_path);
    const Case c{"", parse_coord(start), parse_coord(dest), epsilon};
    check_case(map, c);

    std::unique_ptr<Heuristic> h;
    switch (parse_heuristic_kind(heuristic)) {
        case HeuristicKind::Manhattan:
            h = std::make_unique<ManhattanHeuristic>();
            break;
        case HeuristicKind::Expert: {
            const PathResult optimal = pareto_oracle(map, c);
            if (!optimal.feasible()) {
                std::cout << "infeasible\n";
                return 0;
            }
            h = std::make_unique<TableHeuristic>(expert_heuristic(map, c, optimal), "expert");
            break;
        }
        case HeuristicKind::Learned: {
            if (weights.empty()) throw UsageError("--heuristic nn needs --weights");
            const auto model = load_model(weights);
            h = std::make_unique<TableHeuristic>(nn_heuristic(map, c, *model), "nn");
            break;
        }
    }

    std::vector<TraceRecord> trace;
    SearchOptions options;
    if (!trace_path.empty() || !grid_path.empty()) options.trace = &trace;
    const PathResult r = asd_astar(map, c, *h, options);

    if (!trace_path.empty()) {
        std::ofstream f(trace_path, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + trace_path);
        f << format_trace(trace);
    }
    if (!grid_path.empty()) export_exploration_grid(trace, map, c, r.path, grid_path);

    if (!r.feasible()) {
        std::cout << "infeasible\nnodes " << r.nodes_explored << "\n";
        return 0;
    }
    std::cout << "length " << r.length << "\n";
    std::printf("safety %.17g\n", r.safety);
    std::cout << "nodes " << r.nodes_explored << "\n";
    std::printf("time_ms %.3f\n", r.elapsed_ms);
    std::cout << "path";
    for (const Coord& p : r.path) std::cout << " " << p.x << "," << p.y;
    std::cout << "\n";
    return 0;
}

int cmd_expert(const std::string& dir, double epsilon, std::size_t limit, const std::string& out) {
    const auto maps = load_map_dir(dir);
    const int m = maps.front().map.size();
    DatasetWriter writer(out, m);
    for (const NamedMap& nm : maps) {
        if (nm.map.size() != m) throw UsageError("maps in " + dir + " differ in size");
        for (const Case& c : enumerate_cases(nm.map, epsilon, limit, nm.id)) {
            writer.write(make_record(nm.map, c, expert_heuristic(nm.map, c)));
        }
    }
    std::cout << writer.count() << " records\n";
    return 0;
}

int cmd_bench(const std::string& dir, const std::string& cases_path, std::optional<double> epsilon,
              std::size_t limit, const std::string& heuristics, const std::string& weights, int jobs,
              const std::string& out, const std::string& format) {
    const auto maps = load_map_dir(dir);
    std::map<std::string, const RiskMap*> by_id;
    for (const NamedMap& nm : maps) by_id[nm.id] = &nm.map;

    std::vector<BenchCase> cases;
    if (!cases_path.empty()) {
        for (Case c : load_cases(cases_path)) {
            const RiskMap* map = nullptr;
            if (c.map_id.empty()) {
                if (maps.size() != 1) throw UsageError("case file has no map column but DIR holds several maps");
                map = &maps.front().map;
            } else {
                const auto it = by_id.find(c.map_id);
                if (it == by_id.end()) throw UsageError("case refers to unknown map '" + c.map_id + "'");
                map = it->second;
            }
            if (epsilon) c.epsilon = *epsilon;
            check_case(*map, c);
            cases.push_back({map, c});
        }
    } else {
        if (!epsilon) throw UsageError("--epsilon is required when --cases is absent");
        for (const NamedMap& nm : maps) {
            for (const Case& c : enumerate_cases(nm.map, *epsilon, limit, nm.id)) cases.push_back({&nm.map, c});
        }
    }
    if (cases.empty()) throw UsageError("no cases to run");

    std::vector<HeuristicKind> kinds;
    for (const std::string& name : split_list(heuristics)) kinds.push_back(parse_heuristic_kind(name));
    if (kinds.empty()) throw UsageError("--heuristics is empty");

    std::unique_ptr<TransformerModel> model;
    if (std::find(kinds.begin(), kinds.end(), HeuristicKind::Learned) != kinds.end()) {
        if (weights.empty()) throw UsageError("heuristic nn needs --weights");
        model = load_model(weights);
    }

    ReportFormat fmt;
    if (format == "csv") {
        fmt = ReportFormat::Csv;
    } else if (format == "text") {
        fmt = ReportFormat::Text;
    } else {
        throw UsageError("--format must be csv or text");
    }

    const BenchRun run = run_bench(cases, kinds, model.get(), jobs);
    export_report(run.report, out, fmt);
    std::cout << format_report(run.report, ReportFormat::Text);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"risk-constrained grid path planning"};
    app.require_subcommand(1);

    std::string kind = "random", out, wind_dir = "+x";
    int size = 16;
    std::uint64_t seed = 0;
    WindParams wind;
    auto* gen = app.add_subcommand("gen", "generate a risk map");
    gen->add_option("--kind", kind, "random or wind")->check(CLI::IsMember({"random", "wind"}));
    gen->add_option("--size", size, "grid size m")->required()->check(CLI::Range(1, 4096));
    gen->add_option("--seed", seed, "generator seed")->required();
    gen->add_option("--wind-speed", wind.wind_speed, "wind speed (wind maps)")->check(CLI::NonNegativeNumber);
    gen->add_option("--height", wind.assess_height, "assessment height (wind maps)")->check(CLI::NonNegativeNumber);
    gen->add_option("--buildings", wind.building_count, "building count (wind maps)")->check(CLI::NonNegativeNumber);
    gen->add_option("--wind-dir", wind_dir, "+x, -x, +y or -y (wind maps)");
    gen->add_option("--out", out, "map file")->required();

    std::string map_path;
    double epsilon = 0.9;
    std::size_t limit = 100;
    auto* cases = app.add_subcommand("cases", "enumerate suitable start/dest pairs");
    cases->add_option("--map", map_path)->required();
    cases->add_option("--epsilon", epsilon)->required();
    cases->add_option("--limit", limit)->required();
    cases->add_option("--out", out)->required();

    std::string start, dest, heuristic = "manhattan", weights, trace, grid;
    auto* solve = app.add_subcommand("solve", "solve one query");
    solve->add_option("--map", map_path)->required();
    solve->add_option("--start", start, "X,Y")->required();
    solve->add_option("--dest", dest, "X,Y")->required();
    solve->add_option("--epsilon", epsilon)->required();
    solve->add_option("--heuristic", heuristic, "manhattan, expert or nn");
    solve->add_option("--weights", weights, "ASDW file for nn");
    solve->add_option("--trace", trace, "per-pop log: flat,g,safety,f");
    solve->add_option("--grid", grid, "exploration count grid");

    std::string dir;
    std::size_t expert_limit = 100;
    auto* expert = app.add_subcommand("expert", "export an expert heuristic dataset");
    expert->add_option("--maps", dir, "directory of .map files")->required();
    expert->add_option("--epsilon", epsilon)->required();
    expert->add_option("--out", out)->required();
    expert->add_option("--limit", expert_limit, "cases per map");

    std::string cases_path, heuristics = "manhattan,expert", format = "csv";
    std::optional<double> bench_epsilon;
    int jobs = 1;
    std::size_t bench_limit = 100;
    auto* bench = app.add_subcommand("bench", "benchmark heuristics");
    bench->add_option("--maps", dir, "directory of .map files")->required();
    bench->add_option("--cases", cases_path, "case file; enumerated per map when absent");
    bench->add_option("--epsilon", bench_epsilon, "overrides case epsilon; required without --cases");
    bench->add_option("--limit", bench_limit, "cases per map when enumerating");
    bench->add_option("--heuristics", heuristics, "comma list, baseline first");
    bench->add_option("--weights", weights, "ASDW file for nn");
    bench->add_option("--jobs", jobs)->check(CLI::PositiveNumber);
    bench->add_option("--out", out)->required();
    bench->add_option("--format", format, "csv or text");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*gen) return cmd_gen(kind, size, seed, wind, wind_dir, out);
        if (*cases) return cmd_cases(map_path, epsilon, limit, out);
        if (*solve) return cmd_solve(map_path, start, dest, epsilon, heuristic, weights, trace, grid);
        if (*expert) return cmd_expert(dir, epsilon, expert_limit, out);
        if (*bench) return cmd_bench(dir, cases_path, bench_epsilon, bench_limit, heuristics, weights, jobs, out, format);
    } catch (const CorrectnessError& e) {
        std::cerr << "correctness error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
