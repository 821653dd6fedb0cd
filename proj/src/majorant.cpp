#include "germlin/majorant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace germlin {

EtaResult eta_sequence(double C1, double eta_margin, double tau, double nu, int M) {
    if (!(C1 > 0) || !(eta_margin > 0) || !(tau > 0) || !(nu > 0)) throw std::invalid_argument("eta_sequence needs positive constants");
    if (M < 2) throw std::invalid_argument("eta_sequence needs M >= 2");
    const double e = tau + nu;
    const double log_pref = std::log(C1) - e * std::log(eta_margin);
    EtaResult r;
    r.log_eta.assign(static_cast<size_t>(M + 1), 0.0);
    r.log_eta[1] = 0.0;
    const double NEG = -INFINITY;
    std::vector<double> f(static_cast<size_t>(M + 1));
    for (int m = 2; m <= M; ++m) {
        // f[k]: best log product over nonempty multisets of parts in [1, m-1] summing to k
        std::fill(f.begin(), f.end(), NEG);
        for (int k = 1; k <= m; ++k)
            for (int j = 1; j <= std::min(k, m - 1); ++j) {
                const double rest = k == j ? 0.0 : f[static_cast<size_t>(k - j)];
                if (rest == NEG) continue;
                f[static_cast<size_t>(k)] = std::max(f[static_cast<size_t>(k)], r.log_eta[static_cast<size_t>(j)] + rest);
            }
        double best = NEG;
        for (int k = 1; k <= m; ++k) best = std::max(best, f[static_cast<size_t>(k)]);
        r.log_eta[static_cast<size_t>(m)] = log_pref + m * e * std::log(2.0) + best;
    }
    r.log_D = 0.0;
    for (int m = 1; m <= M; ++m) r.log_D = std::max(r.log_D, r.log_eta[static_cast<size_t>(m)] / m);
    return r;
}

double multi_index_count(int n, int k) {
    if (n == 0) return k == 0 ? 1.0 : 0.0;
    // C(k + n - 1, n - 1)
    double c = 1.0;
    for (int i = 1; i < n; ++i) c = c * (k + i) / i;
    return std::round(c);
}

namespace {

using PS = std::vector<double>;  // truncated power series in t

PS mul(const PS& a, const PS& b) {
    PS r(a.size(), 0.0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; i + j < a.size(); ++j) r[i + j] += a[i] * b[j];
    }
    return r;
}

// sum_{k >= kmin} w_k x^k with w_k = count(n, k) s^k, x of t-order >= 1
PS weighted_power_sum(const PS& x, int n, double s, int kmin) {
    const size_t M = x.size() - 1;
    PS r(x.size(), 0.0), pw(x.size(), 0.0);
    pw[0] = 1.0;
    for (int k = 0; k <= static_cast<int>(M); ++k) {
        if (k >= kmin) {
            const double w = multi_index_count(n, k) * std::pow(s, k);
            for (size_t i = 0; i <= M; ++i) r[i] += w * pw[i];
        }
        pw = mul(pw, x);
    }
    return r;
}

// G(t, U) = sum_{|Q|>=2} R'^|Q| (t + U)^|Q| over Q in N^d
PS G_of(const PS& U, int d, double R1) {
    PS x = U;
    x[1] += 1.0;
    return weighted_power_sum(x, d, R1, 2);
}

// (1 - y)^{-n} - 1
PS inv_power_minus_one(const PS& y, int n) {
    PS geo = weighted_power_sum(y, 1, 1.0, 0);  // 1/(1-y)
    PS r(y.size(), 0.0);
    r[0] = 1.0;
    for (int i = 0; i < n; ++i) r = mul(r, geo);
    r[0] -= 1.0;
    return r;
}

void require_nonneg(const PS& a, int m, const char* what) {
    if (a[static_cast<size_t>(m)] < 0) throw std::logic_error(std::string("negative majorant coefficient in ") + what);
}

}  // namespace

MajorantSeries majorant_functional_solve(LinMode mode, const MajorantConstants& k, int M) {
    if (M < 2) throw std::invalid_argument("majorant needs M >= 2");
    if (!(k.R1 > 0) || !(k.C > 0) || !(k.Cp > 0) || !(k.Cpp > 0) || !(k.nu > 0) || !(k.Mden > 0))
        throw std::invalid_argument("majorant constants must be positive");
    if (k.n_h < 0 || k.d < 1 || k.q < 1) throw std::invalid_argument("majorant dimensions invalid");
    const size_t len = static_cast<size_t>(M + 1);
    MajorantSeries out;
    out.A.assign(len, 0.0);
    if (mode == LinMode::Vertical) {
        out.B.assign(static_cast<size_t>(2 * k.q), PS(len, 0.0));
        const double K = k.C / std::pow(k.Cpp, k.nu);
        auto rhs = [&](const PS& U, const PS& sumAB) {
            PS G = G_of(U, k.d, k.R1);
            PS y = G;
            for (auto& c : y) c *= k.Cp / k.Cpp;
            PS tail = mul(sumAB, inv_power_minus_one(y, k.n_h));
            for (size_t i = 0; i < len; ++i) G[i] += K * tail[i];
            return G;
        };
        for (int m = 2; m <= M; ++m) {
            PS sumAB = out.A;
            for (const auto& b : out.B)
                for (size_t i = 0; i < len; ++i) sumAB[i] += b[i];
            const double a_m = rhs(out.A, sumAB)[static_cast<size_t>(m)];
            std::vector<double> b_m;
            for (const auto& b : out.B) b_m.push_back(rhs(b, sumAB)[static_cast<size_t>(m)]);
            out.A[static_cast<size_t>(m)] = a_m;
            require_nonneg(out.A, m, "A");
            for (size_t s = 0; s < out.B.size(); ++s) {
                out.B[s][static_cast<size_t>(m)] = b_m[s];
                require_nonneg(out.B[s], m, "B");
            }
        }
    } else {
        const int hmin = k.full_h_from_zero ? 0 : 2;
        for (int m = 2; m <= M; ++m) {
            PS g = G_of(out.A, k.d, k.R1);
            PS h = weighted_power_sum(out.A, k.n_h, 1.0 / k.Mden, hmin);
            out.A[static_cast<size_t>(m)] = mul(g, h)[static_cast<size_t>(m)];
            require_nonneg(out.A, m, "A");
        }
    }
    return out;
}

json majorant_json(const MajorantCert& cert) {
    auto arr = [](const std::vector<double>& v, int from) {
        json a = json::array();
        for (size_t i = static_cast<size_t>(from); i < v.size(); ++i) a.push_back(format_double(v[i]));
        return a;
    };
    json eta = json::array();
    for (size_t m = 1; m < cert.eta.log_eta.size(); ++m) eta.push_back(format_double(std::exp(cert.eta.log_eta[m])));
    json B = json::object();
    for (size_t s = 0; s < cert.series.B.size(); ++s)
        B[(s % 2 == 0 ? "+e" : "-e") + std::to_string(s / 2 + 1)] = arr(cert.series.B[s], 2);
    const auto& k = cert.constants;
    json c{{"C1", format_double(cert.C1)},
           {"eta_margin", format_double(cert.eta_margin)},
           {"tau", format_double(cert.tau)},
           {"nu", format_double(k.nu)},
           {"R_prime", format_double(k.R1)},
           {"M_denominator", format_double(k.Mden)},
           {"C", format_double(k.C)},
           {"C_prime", format_double(k.Cp)},
           {"C_second", format_double(k.Cpp)},
           {"D_growth", format_double(cert.eta.D_growth())}};
    return json{{"mode", lin_mode_name(cert.mode)}, {"eta", eta}, {"A", arr(cert.series.A, 2)}, {"B", B}, {"constants", c}};
}

double Ladder::rho(int m) const {
    double s = 0;
    for (int k = 1; k < m; ++k) s += std::ldexp(1.0, -k);
    return s;
}

double Ladder::eps_ratio(int m) const { return 1.0 - eta_margin / kappa * rho(m); }

GridSpec Ladder::grid(int m) const {
    if (m < 1) throw std::invalid_argument("ladder index starts at 1");
    return shrink_grid(base, eps_ratio(m), rho(m));
}

json domination_json(const DominationReport& rep) {
    json rows = json::array();
    for (const auto& r : rep.rows)
        rows.push_back(json{{"m", r.m},
                            {"sup", format_double(r.sup)},
                            {"bound", format_double(r.bound)},
                            {"sup_B", format_double(r.sup_B)},
                            {"bound_B", format_double(r.bound_B)},
                            {"pass", r.pass}});
    return json{{"pass", rep.pass}, {"first_fail", rep.first_fail < 0 ? json(nullptr) : json(rep.first_fail)}, {"rows", rows}};
}

}  // namespace germlin
