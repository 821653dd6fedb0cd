#pragma once

// Sampled sup norms on Reinhardt product grids and the Cauchy coefficient check.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "germlin/series.hpp"

namespace germlin {

struct GridSpec {
    std::vector<std::vector<double>> h_radii;  // per h coordinate, radius samples
    std::vector<double> v_radius;              // per v coordinate
    int n_angle = 16;                          // samples per angular direction

    long point_count() const;
    void validate(int n_h, int n_v) const;
};

struct CauchyReport {
    bool pass = true;
    double worst_ratio = 0.0;
    Key worst_Q;
    double sup = 0.0;
    int slices = 0;
};

namespace kernels {

struct FlatTerm {
    std::vector<int> P, Q;
    CD c;
};

template <class C>
std::vector<FlatTerm> flatten(const Series<C>& f) {
    std::vector<FlatTerm> out;
    out.reserve(f.terms.size());
    for (const auto& [k, c] : f.terms) out.push_back(FlatTerm{k.P, k.Q, scalar_traits<C>::to_cd(c)});
    return out;
}

// Point index -> (h values, v values)
void grid_point(const GridSpec& g, long idx, std::vector<CD>& h, std::vector<CD>& v);
CD eval_terms(const std::vector<FlatTerm>& terms, const std::vector<CD>& h, const std::vector<CD>& v);

namespace serial {
double sup_abs(const std::vector<FlatTerm>& terms, const GridSpec& g);
}
namespace omp {
double sup_abs(const std::vector<FlatTerm>& terms, const GridSpec& g);
}

}  // namespace kernels

template <class C>
double grid_sup_norm(const Series<C>& f, const GridSpec& g) {
    g.validate(f.n_h, f.n_v);
    if (f.empty()) return 0.0;
    return kernels::omp::sup_abs(kernels::flatten(f), g);
}

template <class C>
double grid_sup_norm(const VSeries<C>& fs, const GridSpec& g) {
    double m = 0.0;
    for (const auto& f : fs) m = std::max(m, grid_sup_norm(f, g));
    return m;
}

// Grid covering only the h directions; the v slice norm of each Q is sampled there.
double slice_sup(const std::vector<kernels::FlatTerm>& slice, const GridSpec& g);

template <class C>
CauchyReport cauchy_bound_check(const Series<C>& f, const GridSpec& g, double slack = 1e-9) {
    g.validate(f.n_h, f.n_v);
    CauchyReport rep;
    if (f.empty()) return rep;
    rep.sup = grid_sup_norm(f, g);
    std::map<std::vector<int>, std::vector<kernels::FlatTerm>> slices;
    for (const auto& [k, c] : f.terms)
        slices[k.Q].push_back(kernels::FlatTerm{k.P, std::vector<int>(k.Q.size(), 0), scalar_traits<C>::to_cd(c)});
    for (const auto& [Q, terms] : slices) {
        double rq = 1.0;
        for (size_t j = 0; j < Q.size(); ++j) rq *= std::pow(g.v_radius[j], Q[j]);
        double ratio = slice_sup(terms, g) * rq / rep.sup;
        ++rep.slices;
        if (ratio > rep.worst_ratio) {
            rep.worst_ratio = ratio;
            rep.worst_Q = Key{std::vector<int>(f.n_h, 0), Q};
        }
    }
    rep.pass = rep.worst_ratio <= 1.0 + slack;
    return rep;
}

}  // namespace germlin
