#pragma once

// Random fixtures shared by the unit tests.

#include <random>

#include "germlin/series.hpp"

namespace germlin::testing {

inline QC random_qc(std::mt19937_64& rng, int span = 9) {
    std::uniform_int_distribution<int> num(-span, span), den(1, 6);
    return QC(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

inline CD to_float(const QC& z) { return scalar_traits<QC>::to_cd(z); }

// Random series with |P_i| <= pspan and qmin <= |Q| <= qmax.
inline Series<QC> random_series(std::mt19937_64& rng, int n_h, int n_v, Trunc t, int nterms, int pspan, int qmin,
                                int qmax) {
    Series<QC> f(n_h, n_v, t);
    std::uniform_int_distribution<int> pd(-pspan, pspan), qd(qmin, qmax);
    for (int k = 0; k < nterms; ++k) {
        Key key{std::vector<int>(n_h), std::vector<int>(n_v, 0)};
        for (auto& p : key.P) p = pd(rng);
        int deg = qd(rng);
        if (n_v == 0) deg = 0;
        for (int s = 0; s < deg; ++s) key.Q[std::uniform_int_distribution<int>(0, n_v - 1)(rng)]++;
        if (key.pabs() > t.N_h) continue;
        f.add_term(key, random_qc(rng));
    }
    return f;
}

inline Series<CD> to_float(const Series<QC>& f) {
    Series<CD> g(f.n_h, f.n_v, f.trunc);
    for (const auto& [k, c] : f.terms) g.add_term(k, to_float(c));
    return g;
}

}  // namespace germlin::testing
