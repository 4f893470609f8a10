#include "riskpath/errors.hpp"
#include "riskpath/expert.hpp"

#include "text_io.hpp"

#include <fstream>

namespace riskpath {

DatasetRecord make_record(const RiskMap& map, const Case& c, const HeuristicTable& table) {
    if (table.m != map.size()) {
        throw UsageError("heuristic table and map sizes differ");
    }
    DatasetRecord r;
    r.safety = map.safety_values();
    r.start_flat = map.flatten(c.start);
    r.dest_flat = map.flatten(c.dest);
    r.epsilon = c.epsilon;
    r.target = table.h;
    r.mask = table.infeasible;
    const double sentinel = h_inf(map.size());
    for (std::size_t i = 0; i < r.target.size(); ++i) {
        if (r.mask[i]) r.target[i] = sentinel;
    }
    return r;
}

DatasetWriter::DatasetWriter(const std::filesystem::path& path, int m)
    : out_(std::make_unique<std::ofstream>(path, std::ios::binary)), m_(m) {
    if (!*out_) {
        throw std::runtime_error("cannot write " + path.string());
    }
    *out_ << m << '\n';
}

DatasetWriter::~DatasetWriter() = default;

void DatasetWriter::write(const DatasetRecord& r) {
    const auto n = static_cast<std::size_t>(m_) * m_;
    if (r.safety.size() != n || r.target.size() != n || r.mask.size() != n) {
        throw UsageError("dataset record does not match grid size");
    }
    std::string line;
    auto emit_values = [&](const std::vector<double>& v) {
        line.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) line += ' ';
            line += detail::format_double(v[i]);
        }
        *out_ << line << '\n';
    };
    emit_values(r.safety);
    *out_ << r.start_flat << ' ' << r.dest_flat << ' ' << detail::format_double(r.epsilon) << '\n';
    emit_values(r.target);
    line.clear();
    for (std::size_t i = 0; i < r.mask.size(); ++i) {
        if (i) line += ' ';
        line += r.mask[i] ? '1' : '0';
    }
    *out_ << line << '\n';
    if (!*out_) {
        throw std::runtime_error("dataset write failed");
    }
    ++count_;
}

void export_dataset(std::span<const Case> cases, std::span<const RiskMap* const> maps,
                    std::span<const HeuristicTable> tables, const std::filesystem::path& path) {
    if (cases.size() != maps.size() || cases.size() != tables.size()) {
        throw UsageError("export_dataset: cases, maps and tables must be parallel");
    }
    if (cases.empty()) {
        throw UsageError("export_dataset: no records");
    }
    DatasetWriter writer(path, maps[0]->size());
    for (std::size_t k = 0; k < cases.size(); ++k) {
        writer.write(make_record(*maps[k], cases[k], tables[k]));
    }
}

Dataset load_dataset(const std::filesystem::path& path) {
    const std::string text = detail::read_file(path);
    const auto all = detail::lines_of(text);
    std::vector<std::pair<int, std::string_view>> lines;
    for (std::size_t k = 0; k < all.size(); ++k) {
        if (!detail::blank(all[k])) lines.push_back({static_cast<int>(k) + 1, all[k]});
    }
    if (lines.empty()) throw ParseError("empty dataset", 1);

    Dataset ds;
    ds.m = detail::to_int(detail::split(lines[0].second, ' ').at(0), lines[0].first);
    if (ds.m < 1) throw ParseError("grid side must be >= 1", lines[0].first);
    const auto n = static_cast<std::size_t>(ds.m) * ds.m;
    if ((lines.size() - 1) % 4 != 0) {
        throw ParseError("dataset records must have 4 lines each", lines.back().first);
    }
    auto values = [&](std::size_t k) {
        const auto toks = detail::split(lines[k].second, ' ');
        if (toks.size() != n) {
            throw ParseError("expected " + std::to_string(n) + " values", lines[k].first);
        }
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = detail::to_double(toks[i], lines[k].first);
        return v;
    };
    for (std::size_t k = 1; k < lines.size(); k += 4) {
        DatasetRecord r;
        r.safety = values(k);
        const auto q = detail::split(lines[k + 1].second, ' ');
        if (q.size() != 3) throw ParseError("expected 'start_flat dest_flat epsilon'", lines[k + 1].first);
        r.start_flat = detail::to_int(q[0], lines[k + 1].first);
        r.dest_flat = detail::to_int(q[1], lines[k + 1].first);
        r.epsilon = detail::to_double(q[2], lines[k + 1].first);
        r.target = values(k + 2);
        const auto bits = detail::split(lines[k + 3].second, ' ');
        if (bits.size() != n) throw ParseError("expected " + std::to_string(n) + " mask bits", lines[k + 3].first);
        r.mask.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (bits[i] != "0" && bits[i] != "1") throw ParseError("mask bit must be 0 or 1", lines[k + 3].first);
            r.mask[i] = bits[i] == "1";
        }
        ds.records.push_back(std::move(r));
    }
    return ds;
}

}  // namespace riskpath
