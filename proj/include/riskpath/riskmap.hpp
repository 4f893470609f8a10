// Grid-world data model: cells, risk maps, query cases, generators and text I/O.
//
// Coordinates are Cartesian with the origin at the bottom-left cell. A cell
// (x, y) flattens to y * m + x, so on a 2x2 map (0,0) -> 0 and (1,1) -> 3.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace riskpath {

struct Coord {
    int x = 0;
    int y = 0;

    friend bool operator==(const Coord&, const Coord&) = default;
};

inline int manhattan(Coord a, Coord b) noexcept {
    const int dx = a.x > b.x ? a.x - b.x : b.x - a.x;
    const int dy = a.y > b.y ? a.y - b.y : b.y - a.y;
    return dx + dy;
}

class RiskMap {
public:
    RiskMap() = default;
    // Throws UsageError if m < 1, the size is not m*m, or any value lies outside [0,1].
    RiskMap(int m, std::vector<double> safety);

    // m x m map with every cell at the given safety.
    static RiskMap uniform(int m, double safety = 1.0);

    int size() const noexcept { return m_; }
    int cell_count() const noexcept { return m_ * m_; }

    bool in_bounds(Coord c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < m_ && c.y < m_; }
    int flatten(Coord c) const noexcept { return c.y * m_ + c.x; }
    Coord unflatten(int i) const noexcept { return {i % m_, i / m_}; }

    double safety(Coord c) const noexcept { return safety_[flatten(c)]; }
    double safety(int i) const noexcept { return safety_[i]; }
    double risk(int i) const noexcept { return 1.0 - safety_[i]; }
    const std::vector<double>& safety_values() const noexcept { return safety_; }

    friend bool operator==(const RiskMap&, const RiskMap&) = default;

private:
    int m_ = 0;
    std::vector<double> safety_;
};

struct Case {
    std::string map_id;
    Coord start;
    Coord dest;
    double epsilon = 0.9;

    friend bool operator==(const Case&, const Case&) = default;
};

// Throws UsageError unless start != dest, both lie on the map and epsilon is in (0,1].
void check_case(const RiskMap& map, const Case& c);

enum class WindDirection { PlusX, MinusX, PlusY, MinusY };

struct WindParams {
    int building_count = 6;
    WindDirection wind_direction = WindDirection::PlusX;
    double wind_speed = 3.0;
    double assess_height = 10.0;
    std::uint64_t seed = 0;
};

// In-bounds 4-neighbours in expansion order: up, right, left, down.
// Blocked cells are included. Throws UsageError when c is off the map.
std::vector<Coord> neighbors(const RiskMap& map, Coord c);

// Exact 20/20/60 split of safe (S=1), blocked (S=0) and risky cells, risky
// risk drawn uniformly from (0, 0.02]. Deterministic in seed.
RiskMap gen_random_map(int m, std::uint64_t seed);

// Synthetic wind-wake map: rectangular buildings (S=0) each casting a
// downwind wake whose risk decays linearly with distance and grows with
// wind speed and assessment height. Building layout depends on the seed only.
RiskMap gen_windflow_map(int m, const WindParams& params);

// Suitable cases: manhattan(start, dest) > 10 and a path meeting epsilon
// exists. Scans start then dest in ascending flat index; stops at limit.
std::vector<Case> enumerate_cases(const RiskMap& map, double epsilon, std::size_t limit,
                                  const std::string& map_id = {});

// Map text format: first line m, then m rows of m safety values, top row (y = m-1) first.
void save_map(const RiskMap& map, const std::filesystem::path& path);
RiskMap load_map(const std::filesystem::path& path);
std::string format_map(const RiskMap& map);
RiskMap parse_map(const std::string& text);

// Case CSV: header "x0,y0,x1,y1,epsilon"; with a leading "map" column when
// cases span several maps.
void save_cases(const std::vector<Case>& cases, const std::filesystem::path& path);
std::vector<Case> load_cases(const std::filesystem::path& path);

WindDirection parse_wind_direction(const std::string& s);

}  // namespace riskpath
