#include "germlin/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace germlin {

bool in_convex_hull(const std::vector<std::vector<double>>& points, const std::vector<double>& x, double tol) {
    if (points.empty()) return false;
    const size_t dim = x.size(), np = points.size();
    const size_t rows = dim + 1;
    // columns: lambda_1..lambda_np, artificial_1..artificial_rows, rhs
    const size_t na = rows, ncol = np + na + 1;
    std::vector<std::vector<double>> t(rows, std::vector<double>(ncol, 0.0));
    for (size_t r = 0; r < rows; ++r) {
        double rhs = r < dim ? x[r] : 1.0;
        double sgn = rhs < 0 ? -1.0 : 1.0;
        for (size_t c = 0; c < np; ++c) t[r][c] = sgn * (r < dim ? points[c].at(r) : 1.0);
        t[r][np + r] = 1.0;
        t[r][ncol - 1] = sgn * rhs;
    }
    std::vector<size_t> basis(rows);
    for (size_t r = 0; r < rows; ++r) basis[r] = np + r;

    // reduced costs of the Phase-I objective sum(artificials)
    auto reduced = [&](size_t c) {
        double cost = c >= np && c < np + na ? 1.0 : 0.0;
        for (size_t r = 0; r < rows; ++r) {
            double cb = basis[r] >= np ? 1.0 : 0.0;
            cost -= cb * t[r][c];
        }
        return cost;
    };

    for (int iter = 0; iter < 10000; ++iter) {
        size_t enter = ncol;
        for (size_t c = 0; c + 1 < ncol; ++c)
            if (reduced(c) < -1e-12) {
                enter = c;
                break;
            }
        if (enter == ncol) break;
        size_t leave = rows;
        double best = 0;
        for (size_t r = 0; r < rows; ++r) {
            if (t[r][enter] <= 1e-12) continue;
            double ratio = t[r][ncol - 1] / t[r][enter];
            if (leave == rows || ratio < best - 1e-15 || (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
                best = ratio;
                leave = r;
            }
        }
        if (leave == rows) throw std::logic_error("phase-I simplex unbounded");
        double piv = t[leave][enter];
        for (auto& e : t[leave]) e /= piv;
        for (size_t r = 0; r < rows; ++r) {
            if (r == leave || t[r][enter] == 0.0) continue;
            double f = t[r][enter];
            for (size_t c = 0; c < ncol; ++c) t[r][c] -= f * t[leave][c];
        }
        basis[leave] = enter;
    }
    double infeas = 0;
    for (size_t r = 0; r < rows; ++r)
        if (basis[r] >= np) infeas += t[r][ncol - 1];
    return infeas <= tol;
}

}  // namespace germlin
