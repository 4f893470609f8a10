#include "riskpath/errors.hpp"
#include "riskpath/expert.hpp"
#include "riskpath/riskmap.hpp"

namespace riskpath {

// A case is feasible iff the best product-safety path from start reaches dest
// at or above epsilon, which is exactly the question the label oracle answers;
// one max-product sweep per start covers every destination at once.
std::vector<Case> enumerate_cases(const RiskMap& map, double epsilon, std::size_t limit,
                                  const std::string& map_id) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) {
        throw UsageError("enumerate_cases: epsilon must lie in (0,1]");
    }
    std::vector<Case> cases;
    const int n = map.cell_count();
    for (int s = 0; s < n && cases.size() < limit; ++s) {
        if (map.safety(s) < epsilon) continue;
        const Coord start = map.unflatten(s);
        const SafetyField field = max_safety_field(map, start);
        for (int d = 0; d < n && cases.size() < limit; ++d) {
            const Coord dest = map.unflatten(d);
            if (manhattan(start, dest) > 10 && field.best[d] >= epsilon) {
                cases.push_back({map_id, start, dest, epsilon});
            }
        }
    }
    return cases;
}

}  // namespace riskpath
