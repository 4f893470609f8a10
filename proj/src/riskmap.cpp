#include "riskpath/riskmap.hpp"

#include "riskpath/errors.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace riskpath {

RiskMap::RiskMap(int m, std::vector<double> safety) : m_(m), safety_(std::move(safety)) {
    if (m < 1) {
        throw UsageError("map side must be >= 1, got " + std::to_string(m));
    }
    if (safety_.size() != static_cast<std::size_t>(m) * m) {
        throw UsageError("safety array has " + std::to_string(safety_.size()) + " values, expected " +
                         std::to_string(m * m));
    }
    for (std::size_t i = 0; i < safety_.size(); ++i) {
        if (!(safety_[i] >= 0.0 && safety_[i] <= 1.0)) {
            throw UsageError("safety[" + std::to_string(i) + "] outside [0,1]");
        }
    }
}

RiskMap RiskMap::uniform(int m, double safety) {
    return RiskMap(m, std::vector<double>(static_cast<std::size_t>(m) * m, safety));
}

void check_case(const RiskMap& map, const Case& c) {
    if (!map.in_bounds(c.start) || !map.in_bounds(c.dest)) {
        throw UsageError("case endpoints out of bounds");
    }
    if (c.start == c.dest) {
        throw UsageError("case start equals destination");
    }
    if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) {
        throw UsageError("epsilon must lie in (0,1]");
    }
}

std::vector<Coord> neighbors(const RiskMap& map, Coord c) {
    if (!map.in_bounds(c)) {
        throw UsageError("neighbors: cell (" + std::to_string(c.x) + "," + std::to_string(c.y) +
                         ") is off the map");
    }
    std::vector<Coord> out;
    out.reserve(4);
    const int m = map.size();
    if (c.y + 1 < m) out.push_back({c.x, c.y + 1});
    if (c.x + 1 < m) out.push_back({c.x + 1, c.y});
    if (c.x > 0) out.push_back({c.x - 1, c.y});
    if (c.y > 0) out.push_back({c.x, c.y - 1});
    return out;
}

RiskMap gen_random_map(int m, std::uint64_t seed) {
    if (m < 2) {
        throw UsageError("gen_random_map: m must be >= 2");
    }
    const int n = m * m;
    const int fifth = static_cast<int>(std::lround(0.2 * n));

    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    detail::Rng rng(seed);
    rng.shuffle(order);

    constexpr double kMaxRisk = 0.02;
    const double below_one = std::nextafter(1.0, 0.0);
    std::vector<double> safety(n, 1.0);
    for (int k = 0; k < n; ++k) {
        const int cell = order[k];
        if (k < fifth) {
            safety[cell] = 1.0;
        } else if (k < 2 * fifth) {
            safety[cell] = 0.0;
        } else {
            const double risk = kMaxRisk * (1.0 - rng.unit());  // (0, 0.02]
            safety[cell] = std::min(1.0 - risk, below_one);
        }
    }
    return RiskMap(m, std::move(safety));
}

namespace {

struct Rect {
    int x0, y0, w, h;
    bool overlaps(const Rect& o) const {
        return x0 < o.x0 + o.w && o.x0 < x0 + w && y0 < o.y0 + o.h && o.y0 < y0 + h;
    }
};

}  // namespace

RiskMap gen_windflow_map(int m, const WindParams& p) {
    if (m < 2) {
        throw UsageError("gen_windflow_map: m must be >= 2");
    }
    if (p.building_count < 0 || p.wind_speed < 0.0 || p.assess_height < 0.0) {
        throw UsageError("gen_windflow_map: negative building count, wind speed or height");
    }

    // Layout depends only on (m, count, seed) so wind parameters can be swept on a fixed city.
    constexpr int kMaxTries = 256;
    const int max_side = std::max(1, m / 5);
    detail::Rng rng(p.seed);
    std::vector<Rect> buildings;
    for (int b = 0; b < p.building_count; ++b) {
        bool placed = false;
        for (int t = 0; t < kMaxTries && !placed; ++t) {
            Rect r{0, 0, rng.between(1, max_side), rng.between(1, max_side)};
            r.x0 = rng.between(0, m - r.w);
            r.y0 = rng.between(0, m - r.h);
            if (std::none_of(buildings.begin(), buildings.end(),
                             [&](const Rect& o) { return o.overlaps(r); })) {
                buildings.push_back(r);
                placed = true;
            }
        }
        if (!placed) {
            throw GenerationError("gen_windflow_map: could not place building " + std::to_string(b) +
                                  " without overlap");
        }
    }

    std::vector<double> risk(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<std::uint8_t> solid(risk.size(), 0);
    for (const Rect& r : buildings) {
        for (int y = r.y0; y < r.y0 + r.h; ++y)
            for (int x = r.x0; x < r.x0 + r.w; ++x) solid[y * m + x] = 1;
    }

    // Wake: peak risk just behind the building, decaying linearly to zero past `length` cells.
    const double peak = std::min(0.95, 0.02 * p.wind_speed * (1.0 + p.assess_height / 10.0));
    const int length = p.wind_speed > 0.0 ? std::min(m, static_cast<int>(std::ceil(1.5 * p.wind_speed))) : 0;
    int dx = 0, dy = 0;
    switch (p.wind_direction) {
        case WindDirection::PlusX: dx = 1; break;
        case WindDirection::MinusX: dx = -1; break;
        case WindDirection::PlusY: dy = 1; break;
        case WindDirection::MinusY: dy = -1; break;
    }
    for (const Rect& r : buildings) {
        for (int y = r.y0; y < r.y0 + r.h; ++y) {
            for (int x = r.x0; x < r.x0 + r.w; ++x) {
                for (int d = 1; d <= length; ++d) {
                    const int wx = x + dx * d, wy = y + dy * d;
                    if (wx < 0 || wy < 0 || wx >= m || wy >= m) break;
                    const double r_d = peak * static_cast<double>(length - d + 1) / length;
                    double& cell = risk[wy * m + wx];
                    cell = std::max(cell, r_d);
                }
            }
        }
    }

    std::vector<double> safety(risk.size());
    for (std::size_t i = 0; i < risk.size(); ++i) {
        safety[i] = solid[i] ? 0.0 : 1.0 - risk[i];
    }
    return RiskMap(m, std::move(safety));
}

WindDirection parse_wind_direction(const std::string& s) {
    if (s == "+x" || s == "x") return WindDirection::PlusX;
    if (s == "-x") return WindDirection::MinusX;
    if (s == "+y" || s == "y") return WindDirection::PlusY;
    if (s == "-y") return WindDirection::MinusY;
    throw UsageError("unknown wind direction '" + s + "' (expected +x, -x, +y or -y)");
}

}  // namespace riskpath
