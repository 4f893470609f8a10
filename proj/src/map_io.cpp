#include "riskpath/errors.hpp"
#include "riskpath/riskmap.hpp"

#include "text_io.hpp"

#include <string>
#include <vector>

namespace riskpath {

using detail::blank;
using detail::format_double;
using detail::lines_of;
using detail::read_file;
using detail::split;
using detail::to_double;
using detail::to_int;
using detail::write_file;

std::string format_map(const RiskMap& map) {
    const int m = map.size();
    std::string out = std::to_string(m) + "\n";
    for (int y = m - 1; y >= 0; --y) {
        for (int x = 0; x < m; ++x) {
            if (x > 0) out += ' ';
            out += format_double(map.safety(Coord{x, y}));
        }
        out += '\n';
    }
    return out;
}

RiskMap parse_map(const std::string& text) {
    const auto lines = lines_of(text);
    std::size_t last = lines.size();
    while (last > 0 && blank(lines[last - 1])) --last;
    if (last == 0) {
        throw ParseError("empty map file", 1);
    }
    const auto head = split(lines[0], ' ');
    if (head.size() != 1) {
        throw ParseError("first line must hold the map side m", 1);
    }
    const int m = to_int(head[0], 1);
    if (m < 1) {
        throw ParseError("map side must be >= 1", 1);
    }
    if (last - 1 != static_cast<std::size_t>(m)) {
        throw ParseError("expected " + std::to_string(m) + " rows, found " + std::to_string(last - 1),
                         static_cast<int>(last));
    }
    std::vector<double> safety(static_cast<std::size_t>(m) * m);
    for (int k = 0; k < m; ++k) {
        const int line_no = k + 2;
        const auto toks = split(lines[k + 1], ' ');
        if (toks.size() != static_cast<std::size_t>(m)) {
            throw ParseError("expected " + std::to_string(m) + " values, found " + std::to_string(toks.size()),
                             line_no);
        }
        const int y = m - 1 - k;
        for (int x = 0; x < m; ++x) {
            const double v = to_double(toks[x], line_no);
            if (!(v >= 0.0 && v <= 1.0)) {
                throw ParseError("safety value " + std::string(toks[x]) + " outside [0,1]", line_no);
            }
            safety[y * m + x] = v;
        }
    }
    return RiskMap(m, std::move(safety));
}

void save_map(const RiskMap& map, const std::filesystem::path& path) { write_file(path, format_map(map)); }

RiskMap load_map(const std::filesystem::path& path) { return parse_map(read_file(path)); }

void save_cases(const std::vector<Case>& cases, const std::filesystem::path& path) {
    bool with_map = false;
    for (const Case& c : cases) with_map = with_map || !c.map_id.empty();
    std::string out = with_map ? "map,x0,y0,x1,y1,epsilon\n" : "x0,y0,x1,y1,epsilon\n";
    for (const Case& c : cases) {
        if (with_map) out += c.map_id + ",";
        out += std::to_string(c.start.x) + "," + std::to_string(c.start.y) + "," + std::to_string(c.dest.x) +
               "," + std::to_string(c.dest.y) + "," + format_double(c.epsilon) + "\n";
    }
    write_file(path, out);
}

std::vector<Case> load_cases(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    const auto lines = lines_of(text);
    if (lines.empty()) {
        throw ParseError("empty case file", 1);
    }
    const auto header = split(lines[0], ',');
    bool with_map = false;
    if (header.size() == 6 && header[0] == "map") {
        with_map = true;
    } else if (header.size() != 5 || header[0] != "x0") {
        throw ParseError("case header must be 'x0,y0,x1,y1,epsilon' or 'map,x0,y0,x1,y1,epsilon'", 1);
    }
    std::vector<Case> cases;
    for (std::size_t k = 1; k < lines.size(); ++k) {
        if (blank(lines[k])) continue;
        const int line_no = static_cast<int>(k) + 1;
        const auto toks = split(lines[k], ',');
        if (toks.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields", line_no);
        }
        const std::size_t o = with_map ? 1 : 0;
        Case c;
        if (with_map) c.map_id = std::string(toks[0]);
        c.start = {to_int(toks[o], line_no), to_int(toks[o + 1], line_no)};
        c.dest = {to_int(toks[o + 2], line_no), to_int(toks[o + 3], line_no)};
        c.epsilon = to_double(toks[o + 4], line_no);
        if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) {
            throw ParseError("epsilon outside (0,1]", line_no);
        }
        cases.push_back(std::move(c));
    }
    return cases;
}

}  // namespace riskpath
