#pragma once

#include <vector>

namespace germlin {

// Is x a convex combination of the given points? Phase-I simplex with Bland's rule.
bool in_convex_hull(const std::vector<std::vector<double>>& points, const std::vector<double>& x, double tol = 1e-9);

}  // namespace germlin
