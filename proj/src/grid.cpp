#include "germlin/grid.hpp"

#include <omp.h>

namespace germlin {

long GridSpec::point_count() const {
    long n = 1;
    for (const auto& r : h_radii) n *= static_cast<long>(r.size()) * n_angle;
    for (size_t j = 0; j < v_radius.size(); ++j) n *= n_angle;
    return n;
}

void GridSpec::validate(int n_h, int n_v) const {
    if (static_cast<int>(h_radii.size()) != n_h || static_cast<int>(v_radius.size()) != n_v)
        throw std::invalid_argument("grid dimensions do not match the series");
    if (n_angle < 4) throw std::invalid_argument("grid needs at least 4 angular samples");
    for (const auto& rs : h_radii) {
        if (rs.empty()) throw std::invalid_argument("empty grid");
        for (double r : rs)
            if (!(r > 0)) throw std::invalid_argument("grid radii must be positive");
    }
    for (double r : v_radius)
        if (!(r > 0)) throw std::invalid_argument("grid radii must be positive");
}

namespace kernels {

void grid_point(const GridSpec& g, long idx, std::vector<CD>& h, std::vector<CD>& v) {
    const double two_pi = 2.0 * std::numbers::pi;
    const size_t nh = g.h_radii.size(), nv = g.v_radius.size();
    h.resize(nh);
    v.resize(nv);
    for (size_t j = 0; j < nv; ++j) {
        long a = idx % g.n_angle;
        idx /= g.n_angle;
        v[j] = std::polar(g.v_radius[j], two_pi * static_cast<double>(a) / g.n_angle);
    }
    for (size_t i = 0; i < nh; ++i) {
        long a = idx % g.n_angle;
        idx /= g.n_angle;
        long nr = static_cast<long>(g.h_radii[i].size());
        long ri = idx % nr;
        idx /= nr;
        h[i] = std::polar(g.h_radii[i][static_cast<size_t>(ri)], two_pi * static_cast<double>(a) / g.n_angle);
    }
}

CD eval_terms(const std::vector<FlatTerm>& terms, const std::vector<CD>& h, const std::vector<CD>& v) {
    CD acc(0.0, 0.0);
    for (const auto& t : terms) {
        CD m = t.c;
        for (size_t i = 0; i < h.size(); ++i)
            if (t.P[i] != 0) m *= std::pow(h[i], t.P[i]);
        for (size_t j = 0; j < v.size(); ++j)
            if (t.Q[j] != 0) m *= std::pow(v[j], t.Q[j]);
        acc += m;
    }
    return acc;
}

namespace serial {
double sup_abs(const std::vector<FlatTerm>& terms, const GridSpec& g) {
    double best = 0.0;
    std::vector<CD> h, v;
    const long n = g.point_count();
    for (long p = 0; p < n; ++p) {
        grid_point(g, p, h, v);
        best = std::max(best, std::abs(eval_terms(terms, h, v)));
    }
    return best;
}
}  // namespace serial

namespace omp {
double sup_abs(const std::vector<FlatTerm>& terms, const GridSpec& g) {
    double best = 0.0;
    const long n = g.point_count();
#pragma omp parallel num_threads(thread_count())
    {
        std::vector<CD> h, v;
        double local = 0.0;
#pragma omp for schedule(static)
        for (long p = 0; p < n; ++p) {
            grid_point(g, p, h, v);
            local = std::max(local, std::abs(eval_terms(terms, h, v)));
        }
#pragma omp critical
        best = std::max(best, local);
    }
    return best;
}
}  // namespace omp

}  // namespace kernels

double slice_sup(const std::vector<kernels::FlatTerm>& slice, const GridSpec& g) {
    GridSpec hg = g;
    hg.v_radius.clear();
    std::vector<kernels::FlatTerm> terms;
    for (const auto& t : slice) terms.push_back(kernels::FlatTerm{t.P, {}, t.c});
    return kernels::omp::sup_abs(terms, hg);
}

}  // namespace germlin
