#pragma once

// Order-by-order linearization of commuting deck systems tau_i = tau_hat_i + tau*_i.
// Maps are stored as n_h + d component series, h components first.

#include <random>
#include <stdexcept>
#include <vector>

#include "germlin/series_io.hpp"
#include "germlin/small_divisors.hpp"

namespace germlin {

enum class LinMode { Vertical, Full };
inline const char* lin_mode_name(LinMode m) { return m == LinMode::Vertical ? "vertical" : "full"; }

template <class C>
struct DeckPerturbation {
    Decks<C> decks;
    int n_h = 0, d = 0;
    Trunc trunc;
    std::vector<VSeries<C>> tau_star;  // q maps, each n_h + d components of v-order >= 2

    int q() const { return static_cast<int>(tau_star.size()); }

    void validate() const {
        decks.validate();
        if (decks.q() != q() || decks.n_h() != n_h || decks.d() != d)
            throw std::invalid_argument("perturbation and deck data disagree in shape");
        for (const auto& t : tau_star) {
            if (static_cast<int>(t.size()) != n_h + d) throw std::invalid_argument("tau* needs n_h + d components");
            for (const auto& s : t)
                if (s.n_h != n_h || s.n_v != d) throw std::invalid_argument("tau* component has wrong variables");
            detail::require_vorder2(t, "tau*");
        }
    }

    std::vector<C> diag(int i) const {
        std::vector<C> r = decks.lam[static_cast<size_t>(i)];
        r.insert(r.end(), decks.mu[static_cast<size_t>(i)].begin(), decks.mu[static_cast<size_t>(i)].end());
        return r;
    }

    int max_pabs() const {
        int m = 0;
        for (const auto& t : tau_star)
            for (const auto& s : t) m = std::max(m, s.max_pabs());
        return m;
    }

    // Truncation used by the solvers: N_h = N_v * (max |P| in tau* + 1), never below the stored one.
    Trunc work_trunc(int N_v) const { return Trunc{std::max(trunc.N_h, N_v * (max_pabs() + 1)), N_v}; }
};

template <class C>
struct LinearizationResult {
    LinMode mode = LinMode::Vertical;
    int N_v = 0;
    bool inverse = false;
    VSeries<C> phi;                   // d components (vertical) or n_h + d (full)
    std::vector<double> residual;     // per degree 0..N_v
};

namespace detail {

template <class C>
VSeries<C> zeros(int count, int n_h, int d, Trunc t) {
    return VSeries<C>(static_cast<size_t>(count), Series<C>(n_h, d, t));
}

template <class C>
VSeries<C> regrade(const VSeries<C>& a, Trunc t) {
    VSeries<C> r;
    for (const auto& s : a) r.push_back(with_trunc(s, t));
    return r;
}

template <class C>
Series<C> coordinate(int n_h, int d, Trunc t, int comp, const C& c) {
    std::vector<int> P(static_cast<size_t>(n_h), 0), Q(static_cast<size_t>(d), 0);
    if (comp < n_h)
        P[static_cast<size_t>(comp)] = 1;
    else
        Q[static_cast<size_t>(comp - n_h)] = 1;
    return monomial<C>(n_h, d, t, P, Q, c);
}

// Component c of tau_i as a full series: diag_c x_c + tau*_c
template <class C>
Series<C> full_component(const DeckPerturbation<C>& p, int i, int c, Trunc t) {
    const C e = p.diag(i)[static_cast<size_t>(c)];
    return add(coordinate(p.n_h, p.d, t, c, e), with_trunc(p.tau_star[static_cast<size_t>(i)][static_cast<size_t>(c)], t));
}

template <class C>
void accumulate_degrees(const Series<C>& s, std::vector<double>& out) {
    for (const auto& [k, c] : s.terms) {
        const size_t dg = static_cast<size_t>(k.qdeg());
        if (dg < out.size()) out[dg] = std::max(out[dg], scalar_traits<C>::abs(c));
    }
}

}  // namespace detail

// tau_i^{-1} = tau_hat_i^{-1} + tau*_{i,-}, from tau_i = L (Id + L^{-1} tau*).
template <class C>
DeckPerturbation<C> inverse_perturbation(const DeckPerturbation<C>& p, int N_v) {
    p.validate();
    const Trunc t = p.work_trunc(N_v);
    DeckPerturbation<C> r;
    r.decks = p.decks.inverse();
    r.n_h = p.n_h;
    r.d = p.d;
    r.trunc = t;
    for (int i = 0; i < p.q(); ++i) {
        const auto dinv = inverse_each(p.diag(i));
        VSeries<C> g = scale_each(detail::regrade(p.tau_star[static_cast<size_t>(i)], t), dinv);
        VSeries<C> psi = invert_near_identity(g, p.n_h, N_v, t.N_h);
        VSeries<C> out;
        for (const auto& s : psi)
            out.push_back(with_trunc(compose_linear(s, r.decks.lam[static_cast<size_t>(i)], r.decks.mu[static_cast<size_t>(i)]), t));
        r.tau_star.push_back(std::move(out));
    }
    return r;
}

// Max coefficient of tau_i o tau_j - tau_j o tau_i over all pairs and components.
template <class C>
double check_commutation(const DeckPerturbation<C>& p, int N_v) {
    p.validate();
    const Trunc t = p.work_trunc(N_v);
    double worst = 0.0;
    const int dim = p.n_h + p.d;
    for (int i = 0; i < p.q(); ++i)
        for (int j = i + 1; j < p.q(); ++j) {
            VSeries<C> gi = detail::regrade(p.tau_star[static_cast<size_t>(i)], t);
            VSeries<C> gj = detail::regrade(p.tau_star[static_cast<size_t>(j)], t);
            for (int c = 0; c < dim; ++c) {
                auto ij = compose(detail::full_component(p, i, c, t), p.decks.lam[static_cast<size_t>(j)],
                                  p.decks.mu[static_cast<size_t>(j)], gj, N_v, t.N_h);
                auto ji = compose(detail::full_component(p, j, c, t), p.decks.lam[static_cast<size_t>(i)],
                                  p.decks.mu[static_cast<size_t>(i)], gi, N_v, t.N_h);
                worst = std::max(worst, sub(ij, ji).max_abs());
            }
        }
    return worst;
}

// Per-degree max coefficient of Phi o tau_lin_i - tau_i o Phi. Full mode: tau_lin = tau_hat,
// all components. Vertical mode: tau_lin_i = (T_i h + tau*^h_i(h, v + phi^v), M_i v),
// vertical components only. Computed by composing whole maps, independently of the solvers.
template <class C>
std::vector<double> conjugacy_residual(const VSeries<C>& phi, const DeckPerturbation<C>& p, int N_v, LinMode mode) {
    p.validate();
    const Trunc t = p.work_trunc(N_v);
    const int nh = p.n_h, d = p.d;
    std::vector<double> out(static_cast<size_t>(N_v + 1), 0.0);
    VSeries<C> ph = detail::regrade(phi, t);
    VSeries<C> shift_h, shift_v;
    if (mode == LinMode::Full) {
        if (static_cast<int>(ph.size()) != nh + d) throw std::invalid_argument("full phi needs n_h + d components");
        shift_h = h_block(ph, nh);
        shift_v = v_block(ph, nh);
    } else {
        if (static_cast<int>(ph.size()) != d) throw std::invalid_argument("vertical phi needs d components");
        shift_h = detail::zeros<C>(nh, nh, d, t);
        shift_v = ph;
    }
    for (int i = 0; i < p.q(); ++i) {
        const auto& lam = p.decks.lam[static_cast<size_t>(i)];
        const auto& mu = p.decks.mu[static_cast<size_t>(i)];
        // g_i: nonlinear part of the linear-side map
        VSeries<C> g = detail::zeros<C>(nh + d, nh, d, t);
        if (mode == LinMode::Vertical)
            for (int k = 0; k < nh; ++k)
                g[static_cast<size_t>(k)] =
                    substitute_shift(with_trunc(p.tau_star[static_cast<size_t>(i)][static_cast<size_t>(k)], t), shift_h, shift_v, N_v, t.N_h);
        const int c0 = mode == LinMode::Full ? 0 : nh;
        for (int c = c0; c < nh + d; ++c) {
            const int pc = mode == LinMode::Full ? c : c - nh;
            Series<C> Phi_c = add(detail::coordinate(nh, d, t, c, scalar_traits<C>::one()), ph[static_cast<size_t>(pc)]);
            auto lhs = compose(Phi_c, lam, mu, g, N_v, t.N_h);
            auto rhs = substitute_shift(detail::full_component(p, i, c, t), shift_h, shift_v, N_v, t.N_h);
            detail::accumulate_degrees(sub(with_trunc(lhs, t), with_trunc(rhs, t)), out);
        }
    }
    return out;
}

template <class C>
void require_report(const DiophantineReport* report, ScanMode mode) {
    if (!report) return;
    if (report->mode != mode) throw std::invalid_argument("Diophantine report has the wrong mode");
    if (report->resonant())
        throw ResonanceError("Diophantine report carries a resonance at " + key_string(Key{report->resonances[0].P, report->resonances[0].Q}),
                             Key{report->resonances[0].P, report->resonances[0].Q}, report->resonances[0].idx);
}

// phi^v with Phi = (h, v + phi^v) and Phi o tau_lin_i = tau_i o Phi, degree by degree.
// Degree m right side: tau*^v(h, v + phi^v) - [psi(h + T^{-1} tau~*^h, v) - psi], psi = phi^v o tau_hat_i.
template <class C>
LinearizationResult<C> vertical_linearize(const DeckPerturbation<C>& pert_in, int N_v,
                                          const DiophantineReport* report = nullptr, bool inverse = false) {
    require_report<C>(report, ScanMode::Vertical);
    if (N_v < 2) throw std::invalid_argument("N_v must be >= 2");
    const DeckPerturbation<C> pert = inverse ? inverse_perturbation(pert_in, N_v) : pert_in;
    pert.validate();
    const Trunc t = pert.work_trunc(N_v);
    const int nh = pert.n_h, d = pert.d;
    VSeries<C> phi = detail::zeros<C>(d, nh, d, t);
    const VSeries<C> zero_h = detail::zeros<C>(nh, nh, d, t);
    const VSeries<C> zero_v = detail::zeros<C>(d, nh, d, t);

    for (int m = 2; m <= N_v; ++m) {
        std::vector<VSeries<C>> rhs;
        for (int i = 0; i < pert.q(); ++i) {
            const auto& ts = pert.tau_star[static_cast<size_t>(i)];
            const auto& lam = pert.decks.lam[static_cast<size_t>(i)];
            const auto& mu = pert.decks.mu[static_cast<size_t>(i)];
            VSeries<C> tilde_h;  // T^{-1} tau~*^h
            for (int k = 0; k < nh; ++k)
                tilde_h.push_back(scale(substitute_shift(with_trunc(ts[static_cast<size_t>(k)], t), zero_h, phi, m, t.N_h),
                                        scalar_traits<C>::one() / lam[static_cast<size_t>(k)]));
            VSeries<C> r;
            for (int j = 0; j < d; ++j) {
                auto I = substitute_shift(with_trunc(ts[static_cast<size_t>(nh + j)], t), zero_h, phi, m, t.N_h);
                auto psi = compose_linear(phi[static_cast<size_t>(j)], lam, mu);
                Series<C> II(nh, d, t);
                if (nh > 0) II = sub(with_trunc(substitute_shift(psi, tilde_h, zero_v, m, t.N_h), t), psi);
                r.push_back(with_trunc(homogeneous_part(sub(with_trunc(I, t), II), m), t));
            }
            rhs.push_back(std::move(r));
        }
        CochainSystem<C> sys{std::move(rhs), Block::Vertical, false, pert.decks};
        phi = add(phi, detail::regrade(solve_family(sys), t));
    }
    LinearizationResult<C> res;
    res.mode = LinMode::Vertical;
    res.N_v = N_v;
    res.inverse = inverse;
    res.phi = phi;
    res.residual = conjugacy_residual(phi, pert_in, N_v, LinMode::Vertical);
    return res;
}

// phi with Phi = Id + phi and Phi o tau_hat_i = tau_i o Phi: L_i(phi) = tau*_i o (Id + phi).
template <class C>
LinearizationResult<C> full_linearize(const DeckPerturbation<C>& pert_in, int N_v,
                                      const DiophantineReport* report = nullptr, bool inverse = false) {
    require_report<C>(report, ScanMode::Full);
    if (N_v < 2) throw std::invalid_argument("N_v must be >= 2");
    const DeckPerturbation<C> pert = inverse ? inverse_perturbation(pert_in, N_v) : pert_in;
    pert.validate();
    const Trunc t = pert.work_trunc(N_v);
    const int nh = pert.n_h, d = pert.d;
    VSeries<C> phi = detail::zeros<C>(nh + d, nh, d, t);
    for (int m = 2; m <= N_v; ++m) {
        std::vector<VSeries<C>> rhs;
        const VSeries<C> ph = h_block(phi, nh), pv = v_block(phi, nh);
        for (int i = 0; i < pert.q(); ++i) {
            VSeries<C> r;
            for (const auto& s : pert.tau_star[static_cast<size_t>(i)])
                r.push_back(with_trunc(homogeneous_part(substitute_shift(with_trunc(s, t), ph, pv, m, t.N_h), m), t));
            rhs.push_back(std::move(r));
        }
        CochainSystem<C> sys{std::move(rhs), Block::Total, false, pert.decks};
        phi = add(phi, detail::regrade(solve_family(sys), t));
    }
    LinearizationResult<C> res;
    res.mode = LinMode::Full;
    res.N_v = N_v;
    res.inverse = inverse;
    res.phi = phi;
    res.residual = conjugacy_residual(phi, pert_in, N_v, LinMode::Full);
    return res;
}

struct GenOptions {
    int nterms = 4;             // terms per component of phi0
    int pspan = 1;              // |P_i| <= pspan in phi0
    int qmax = 3;               // v-degree range 2..qmax in phi0
    mpq_class scale = 1;        // coefficient scale
    bool horizontal = true;     // phi0 has h components
    bool vertical = true;       // phi0 has v components
};

enum class GenProfile { Coboundary, Generic };

template <class C>
struct GeneratedDecks {
    DeckPerturbation<C> pert;
    VSeries<C> phi0;  // n_h + d components; meaningful for the coboundary profile
};

namespace detail {

inline QC small_rational(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> num(-9, 9), den(1, 6);
    return QC(mpq_class(num(rng), den(rng)), mpq_class(num(rng), den(rng)));
}

template <class C>
C to_scalar(const QC& z) {
    if constexpr (scalar_traits<C>::exact)
        return z;
    else
        return scalar_traits<QC>::to_cd(z);
}

}  // namespace detail

// Linear parts: exact mode uses Pythagorean unit lam and mu_{i,j} = 1/p for distinct primes
// (so |lam^P mu^Q| never equals |mu_j| when |Q| >= 2); float mode uses random phases.
template <class C>
Decks<C> random_decks(std::mt19937_64& rng, int n_h, int d, int q) {
    static const QC units[] = {QC(mpq_class(3, 5), mpq_class(4, 5)), QC(mpq_class(5, 13), mpq_class(12, 13)),
                               QC(mpq_class(8, 17), mpq_class(15, 17)), QC(mpq_class(7, 25), mpq_class(24, 25))};
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    if (q * d > 12) throw std::invalid_argument("random_decks supports q * d <= 12");
    std::uniform_int_distribution<int> pw(1, 3);
    std::uniform_real_distribution<double> u(0, 1);
    Decks<C> dk;
    for (int i = 0; i < q; ++i) {
        std::vector<C> lam, mu;
        for (int k = 0; k < n_h; ++k) {
            if constexpr (scalar_traits<C>::exact)
                lam.push_back(ipow(units[(k + i) % 4], pw(rng)));
            else
                lam.push_back(std::polar(1.0, 2 * std::numbers::pi * u(rng)));
        }
        for (int j = 0; j < d; ++j) {
            if constexpr (scalar_traits<C>::exact)
                mu.push_back(QC(mpq_class(1, primes[i * d + j])));
            else
                mu.push_back(std::polar(0.25 + 0.5 * u(rng), 2 * std::numbers::pi * u(rng)));
        }
        dk.lam.push_back(std::move(lam));
        dk.mu.push_back(std::move(mu));
    }
    return dk;
}

// tau*_i from tau_i = Phi0 o tau_hat_i o Phi0^{-1}:  tau*_i = D_i psi0 + (phi0 o tau_hat_i)(Id + psi0).
template <class C>
DeckPerturbation<C> conjugate_decks(const Decks<C>& dk, const VSeries<C>& phi0, int N_v, Trunc t) {
    const int nh = dk.n_h(), d = dk.d();
    DeckPerturbation<C> p;
    p.decks = dk;
    p.n_h = nh;
    p.d = d;
    p.trunc = t;
    VSeries<C> ph0 = detail::regrade(phi0, t);
    VSeries<C> psi0 = detail::regrade(invert_near_identity(ph0, nh, N_v, t.N_h), t);
    for (int i = 0; i < dk.q(); ++i) {
        std::vector<C> diag = dk.lam[static_cast<size_t>(i)];
        diag.insert(diag.end(), dk.mu[static_cast<size_t>(i)].begin(), dk.mu[static_cast<size_t>(i)].end());
        VSeries<C> ts;
        for (int c = 0; c < nh + d; ++c) {
            auto moved = compose_linear(ph0[static_cast<size_t>(c)], dk.lam[static_cast<size_t>(i)], dk.mu[static_cast<size_t>(i)]);
            auto shifted = substitute_shift(moved, h_block(psi0, nh), v_block(psi0, nh), N_v, t.N_h);
            ts.push_back(add(scale(psi0[static_cast<size_t>(c)], diag[static_cast<size_t>(c)]), with_trunc(shifted, t)));
        }
        p.tau_star.push_back(std::move(ts));
    }
    return p;
}

// Test-data generator. Both profiles conjugate the linear decks by a random Phi0; the
// generic profile draws phi0 with both blocks populated and does not expose it.
template <class C>
GeneratedDecks<C> generate_commuting_decks(std::uint64_t seed, int n_h, int d, int q, int N_v, GenProfile profile,
                                           const GenOptions& opt = {}) {
    if (n_h < 0 || d < 1 || q < 1 || N_v < 2) throw std::invalid_argument("invalid dimensions");
    if (opt.qmax < 2 || opt.qmax > N_v) throw std::invalid_argument("truncation too small to express phi0");
    std::mt19937_64 rng(seed);
    GeneratedDecks<C> out;
    Decks<C> dk = random_decks<C>(rng, n_h, d, q);
    const Trunc t{N_v * (opt.pspan + 1), N_v};
    GenOptions o = opt;
    if (profile == GenProfile::Generic) o.horizontal = o.vertical = true;
    VSeries<C> phi0;
    std::uniform_int_distribution<int> pd(-o.pspan, o.pspan), qd(2, o.qmax);
    for (int c = 0; c < n_h + d; ++c) {
        Series<C> s(n_h, d, t);
        const bool on = c < n_h ? o.horizontal : o.vertical;
        for (int k = 0; on && k < o.nterms; ++k) {
            Key key{std::vector<int>(static_cast<size_t>(n_h)), std::vector<int>(static_cast<size_t>(d), 0)};
            for (auto& x : key.P) x = pd(rng);
            const int deg = qd(rng);
            for (int r = 0; r < deg; ++r) key.Q[std::uniform_int_distribution<int>(0, d - 1)(rng)]++;
            s.add_term(key, detail::to_scalar<C>(detail::small_rational(rng) * QC(o.scale)));
        }
        phi0.push_back(std::move(s));
    }
    out.pert = conjugate_decks(dk, phi0, N_v, t);
    if (profile == GenProfile::Coboundary) out.phi0 = phi0;
    return out;
}

template <class C>
json linearization_json(const LinearizationResult<C>& r) {
    json res = json::array();
    for (double x : r.residual) res.push_back(format_double(x));
    return json{{"mode", lin_mode_name(r.mode)},
                {"N_v", r.N_v},
                {"inverse", r.inverse},
                {"residual_per_degree", res},
                {"phi", vseries_to_json(r.phi)}};
}

template <class C>
json perturbation_json(const DeckPerturbation<C>& p) {
    json lam = json::array(), mu = json::array();
    for (const auto& row : p.decks.lam) {
        json r = json::array();
        for (const auto& x : row) r.push_back(scalar_json(x));
        lam.push_back(r);
    }
    for (const auto& row : p.decks.mu) {
        json r = json::array();
        for (const auto& x : row) r.push_back(scalar_json(x));
        mu.push_back(r);
    }
    json ts = json::array();
    for (const auto& t : p.tau_star) ts.push_back(vseries_to_json(t));
    return json{{"n_h", p.n_h}, {"d", p.d}, {"lambda", lam}, {"mu", mu}, {"tau_star", ts}};
}

template <class C>
DeckPerturbation<C> perturbation_from_json(const json& j) {
    DeckPerturbation<C> p;
    p.n_h = j.at("n_h").get<int>();
    p.d = j.at("d").get<int>();
    p.decks = decks_from_json<C>(j);
    for (const auto& tj : j.at("tau_star")) {
        VSeries<C> t;
        for (const auto& sj : tj) {
            auto s = series_from_json<C>(sj);
            p.trunc.N_h = std::max(p.trunc.N_h, s.trunc.N_h);
            p.trunc.N_v = std::max(p.trunc.N_v, s.trunc.N_v);
            t.push_back(std::move(s));
        }
        p.tau_star.push_back(std::move(t));
    }
    p.validate();
    return p;
}

}  // namespace germlin
