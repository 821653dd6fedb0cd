#pragma once

// Small divisors lam^P mu^Q - e, Diophantine scans, and the coefficientwise
// solution of the cohomological equations L_i(G) = F_i.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

#include "germlin/grid.hpp"
#include "germlin/json_util.hpp"
#include "germlin/series.hpp"

namespace germlin {

template <class C>
struct Decks {
    std::vector<std::vector<C>> lam;  // q x n_h
    std::vector<std::vector<C>> mu;   // q x d

    int q() const { return static_cast<int>(lam.size()); }
    int n_h() const { return lam.empty() ? 0 : static_cast<int>(lam[0].size()); }
    int d() const { return mu.empty() ? 0 : static_cast<int>(mu[0].size()); }

    void validate() const {
        if (lam.empty() || lam.size() != mu.size()) throw std::invalid_argument("decks need q >= 1 rows of lambda and mu");
        for (size_t i = 0; i < lam.size(); ++i) {
            if (static_cast<int>(lam[i].size()) != n_h() || static_cast<int>(mu[i].size()) != d())
                throw std::invalid_argument("ragged deck data");
            for (const auto& x : lam[i])
                if (scalar_traits<C>::is_zero(x)) throw std::invalid_argument("deck eigenvalue is zero");
            for (const auto& x : mu[i])
                if (scalar_traits<C>::is_zero(x)) throw std::invalid_argument("deck eigenvalue is zero");
        }
    }

    // Data of the inverse decks tau_hat_i^{-1}.
    Decks inverse() const {
        Decks r;
        for (const auto& row : lam) r.lam.push_back(inverse_each(row));
        for (const auto& row : mu) r.mu.push_back(inverse_each(row));
        return r;
    }
};

// Which eigenvalue is subtracted: mu_{l,idx} for vertical targets, lam_{l,idx} for horizontal.
enum class Target { V, H };
// Component layout of the unknown: d vertical, n_h horizontal, or (h then v).
enum class Block { Vertical, Horizontal, Total };
enum class ScanMode { Vertical, Full };

inline const char* target_name(Target t) { return t == Target::V ? "v" : "h"; }
inline const char* scan_mode_name(ScanMode m) { return m == ScanMode::Vertical ? "vertical" : "full"; }

inline int block_dim(Block b, int n_h, int d) {
    return b == Block::Vertical ? d : (b == Block::Horizontal ? n_h : n_h + d);
}

// Target of component k of a block.
inline std::pair<Target, int> block_target(Block b, int n_h, int k) {
    if (b == Block::Vertical) return {Target::V, k};
    if (b == Block::Horizontal) return {Target::H, k};
    return k < n_h ? std::pair{Target::H, k} : std::pair{Target::V, k - n_h};
}

class ResonanceError : public std::runtime_error {
public:
    Key key;
    int component;
    ResonanceError(const std::string& what, Key k, int c) : std::runtime_error(what), key(std::move(k)), component(c) {}
};

class IncompatibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kCompatTol = 1e-12;

template <class C>
C divisor_value(const Decks<C>& decks, const std::vector<int>& P, const std::vector<int>& Q, Target t, int idx,
                int l) {
    if (l < 0 || l >= decks.q()) throw std::out_of_range("deck index out of range");
    if (t == Target::V && (idx < 0 || idx >= decks.d())) throw std::out_of_range("vertical index out of range");
    if (t == Target::H && (idx < 0 || idx >= decks.n_h())) throw std::out_of_range("horizontal index out of range");
    const C e = t == Target::V ? decks.mu[l][idx] : decks.lam[l][idx];
    return monomial_value(decks.lam[l], decks.mu[l], P, Q) - e;
}

// |lam_l^P mu_l^Q - e_{l,idx}|
template <class C>
double divisor(const Decks<C>& decks, const std::vector<int>& P, const std::vector<int>& Q, Target t, int idx, int l) {
    int qd = 0;
    for (int x : Q) qd += x;
    if (qd <= 1) throw std::invalid_argument("divisor needs |Q| > 1");
    return scalar_traits<C>::abs(divisor_value(decks, P, Q, t, idx, l));
}

template <class C>
bool is_resonant_value(const C& v, const C& e) {
    if constexpr (scalar_traits<C>::exact) {
        (void)e;
        return scalar_traits<C>::is_zero(v);
    } else {
        return std::abs(v) <= 1e-12 * std::max(1.0, std::abs(e));
    }
}

// Index l maximizing |divisor|, smallest l on ties; exact mode compares squared moduli exactly.
template <class C>
std::pair<int, C> best_divisor(const Decks<C>& decks, const std::vector<int>& P, const std::vector<int>& Q, Target t,
                               int idx) {
    int best = 0;
    C bv = divisor_value(decks, P, Q, t, idx, 0);
    for (int l = 1; l < decks.q(); ++l) {
        C v = divisor_value(decks, P, Q, t, idx, l);
        if (scalar_traits<C>::abs_greater(v, bv)) {
            best = l;
            bv = v;
        }
    }
    return {best, bv};
}

struct DivisorWitness {
    std::vector<int> P, Q;
    Target target = Target::V;
    int idx = 0;
    int l = 0;
    double value = 0.0;
};

struct DiophantineReport {
    ScanMode mode = ScanMode::Vertical;
    int N = 0;
    bool exact = false;
    long scanned = 0;
    double min_divisor = 0.0;
    DivisorWitness argmin;
    double D = 0.0, tau = 0.0;
    bool fit_valid = false;
    double fitted_slope = 0.0;
    std::vector<DivisorWitness> resonances;
    std::vector<DivisorWitness> violations;

    bool resonant() const { return !resonances.empty(); }
};

// All (P, Q) with |Q| >= 2 and |P| + |Q| <= N, ordered by (|P|+|Q|, Q, P).
std::vector<Key> scan_keys(int n_h, int d, int N);

namespace kernels {

struct ScanPoint {
    int s = 0;             // |P| + |Q|
    double value = 0.0;    // max over l, minimized over targets
    int target_slot = 0;   // attaining target
    int l = 0;
    bool resonant = false;
};

template <class C>
ScanPoint scan_one(const Decks<C>& decks, const Key& k, ScanMode mode) {
    ScanPoint sp;
    sp.s = k.pabs() + k.qdeg();
    const int d = decks.d(), nh = decks.n_h();
    const int slots = mode == ScanMode::Vertical ? d : d + nh;
    bool first = true;
    for (int slot = 0; slot < slots; ++slot) {
        Target t = slot < d ? Target::V : Target::H;
        int idx = slot < d ? slot : slot - d;
        auto [l, v] = best_divisor(decks, k.P, k.Q, t, idx);
        const C& e = t == Target::V ? decks.mu[l][idx] : decks.lam[l][idx];
        bool res = is_resonant_value(v, e);
        double a = scalar_traits<C>::abs(v);
        if (res) a = 0.0;
        if (first || a < sp.value) {
            sp.value = a;
            sp.target_slot = slot;
            sp.l = l;
            first = false;
        }
        sp.resonant = sp.resonant || res;
    }
    return sp;
}

namespace serial {
template <class C>
std::vector<ScanPoint> scan(const Decks<C>& decks, const std::vector<Key>& keys, ScanMode mode) {
    std::vector<ScanPoint> out(keys.size());
    for (size_t i = 0; i < keys.size(); ++i) out[i] = scan_one(decks, keys[i], mode);
    return out;
}
}  // namespace serial

namespace omp {
template <class C>
std::vector<ScanPoint> scan(const Decks<C>& decks, const std::vector<Key>& keys, ScanMode mode) {
    std::vector<ScanPoint> out(keys.size());
    const long n = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_count())
    for (long i = 0; i < n; ++i) out[static_cast<size_t>(i)] = scan_one(decks, keys[static_cast<size_t>(i)], mode);
    return out;
}
}  // namespace omp

}  // namespace kernels

struct FitResult {
    bool valid = false;
    double slope = 0.0, D = 0.0, tau = 0.0;
};

// Fit (D, tau) to scanned (s, value) pairs: least-squares slope of the per-s
// minima in log-log, smallest ladder tau in {1..10} at or above it, then D
// shrunk below every scanned value * s^tau.
FitResult fit_diophantine(const std::vector<std::pair<int, double>>& points);

template <class C>
DiophantineReport diophantine_scan(const Decks<C>& decks, int N, ScanMode mode) {
    decks.validate();
    if (N < 2) throw std::invalid_argument("scan bound N must be >= 2");
    DiophantineReport rep;
    rep.mode = mode;
    rep.N = N;
    rep.exact = scalar_traits<C>::exact;
    const auto keys = scan_keys(decks.n_h(), decks.d(), N);
    const auto pts = kernels::omp::scan(decks, keys, mode);
    rep.scanned = static_cast<long>(keys.size());
    const int d = decks.d();
    auto witness = [&](size_t i) {
        const auto& sp = pts[i];
        DivisorWitness w;
        w.P = keys[i].P;
        w.Q = keys[i].Q;
        w.target = sp.target_slot < d ? Target::V : Target::H;
        w.idx = sp.target_slot < d ? sp.target_slot : sp.target_slot - d;
        w.l = sp.l;
        w.value = sp.value;
        return w;
    };
    std::vector<std::pair<int, double>> fitpts;
    for (size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].resonant) rep.resonances.push_back(witness(i));
        if (i == 0 || pts[i].value < rep.min_divisor) {
            rep.min_divisor = pts[i].value;
            rep.argmin = witness(i);
        }
        fitpts.emplace_back(pts[i].s, pts[i].value);
    }
    if (rep.resonant()) return rep;
    FitResult fit = fit_diophantine(fitpts);
    rep.fit_valid = fit.valid;
    rep.fitted_slope = fit.slope;
    rep.D = fit.D;
    rep.tau = fit.tau;
    for (size_t i = 0; i < pts.size(); ++i)
        if (!(pts[i].value > rep.D / std::pow(static_cast<double>(pts[i].s), rep.tau))) rep.violations.push_back(witness(i));
    if (!rep.violations.empty()) rep.fit_valid = false;
    return rep;
}

json witness_json(const DivisorWitness& w);
json diophantine_report_json(const DiophantineReport& rep);

template <class C>
struct CochainSystem {
    std::vector<VSeries<C>> F;  // one vector per deck, block_dim components each
    Block block = Block::Vertical;
    bool inverse = false;       // solve L_{-i} instead of L_i
    Decks<C> decks;

    Decks<C> effective_decks() const { return inverse ? decks.inverse() : decks; }
};

// L_i(G) = G o tau_hat_i - E_i G, coefficientwise multiplication by lam_i^P mu_i^Q - e_{i,k}.
template <class C>
VSeries<C> apply_operator(const Decks<C>& decks, Block block, int i, const VSeries<C>& G) {
    VSeries<C> out;
    for (size_t k = 0; k < G.size(); ++k) {
        auto [t, idx] = block_target(block, decks.n_h(), static_cast<int>(k));
        Series<C> r(G[k].n_h, G[k].n_v, G[k].trunc);
        for (const auto& [key, c] : G[k].terms) r.add_term(key, c * divisor_value(decks, key.P, key.Q, t, idx, i));
        r.cleanup();
        out.push_back(std::move(r));
    }
    return out;
}

struct CompatResidual {
    double max_abs = 0.0;
    bool exact_zero = true;
};

template <class C>
CompatResidual compatibility_residual(const CochainSystem<C>& sys) {
    const Decks<C> dk = sys.effective_decks();
    CompatResidual res;
    const int q = static_cast<int>(sys.F.size());
    for (int i = 0; i < q; ++i)
        for (int j = i + 1; j < q; ++j) {
            auto a = apply_operator(dk, sys.block, i, sys.F[j]);
            auto b = apply_operator(dk, sys.block, j, sys.F[i]);
            for (size_t k = 0; k < a.size(); ++k) {
                Series<C> diff(a[k].n_h, a[k].n_v, a[k].trunc);
                for (const auto& [key, c] : a[k].terms) diff.add_term(key, c);
                for (const auto& [key, c] : b[k].terms) diff.add_term(key, -c);
                for (const auto& [key, c] : diff.terms) {
                    res.exact_zero = false;
                    res.max_abs = std::max(res.max_abs, scalar_traits<C>::abs(c));
                }
            }
        }
    return res;
}

namespace detail {

template <class C>
double max_coeff(const std::vector<VSeries<C>>& F) {
    double m = 0;
    for (const auto& v : F)
        for (const auto& s : v) m = std::max(m, s.max_abs());
    return m;
}

template <class C>
void check_compatible(const CochainSystem<C>& sys) {
    auto r = compatibility_residual(sys);
    if constexpr (scalar_traits<C>::exact) {
        if (!r.exact_zero) throw IncompatibleError("cochain family is not compatible (exact residual nonzero)");
    } else {
        if (r.max_abs >= kCompatTol * std::max(1.0, max_coeff(sys.F)))
            throw IncompatibleError("cochain family is not compatible (residual " + format_double(r.max_abs) + ")");
    }
}

}  // namespace detail

// G with L_i(G) = F_i for all i. Each coefficient is divided by the largest divisor over l.
template <class C>
VSeries<C> solve_family(const CochainSystem<C>& sys) {
    if (sys.F.empty()) throw std::invalid_argument("empty cochain family");
    sys.decks.validate();
    if (static_cast<int>(sys.F.size()) != sys.decks.q()) throw std::invalid_argument("need one cochain per deck");
    const Decks<C> dk = sys.effective_decks();
    const size_t dim = sys.F[0].size();
    for (const auto& Fi : sys.F) {
        if (Fi.size() != dim) throw std::invalid_argument("cochain dimension mismatch");
        detail::require_vorder2(Fi, "cochain");
    }
    if (static_cast<int>(dim) != block_dim(sys.block, dk.n_h(), dk.d()))
        throw std::invalid_argument("cochain has the wrong number of components");
    detail::check_compatible(sys);

    VSeries<C> G;
    for (size_t k = 0; k < dim; ++k) {
        auto [t, idx] = block_target(sys.block, dk.n_h(), static_cast<int>(k));
        std::map<Key, int> keyset;
        for (const auto& Fi : sys.F)
            for (const auto& [key, c] : Fi[k].terms) keyset.emplace(key, 0);
        std::vector<Key> keys;
        for (const auto& [key, z] : keyset) keys.push_back(key);
        std::vector<C> vals(keys.size());
        std::vector<int> bad(keys.size(), 0);
        const long nk = static_cast<long>(keys.size());
#pragma omp parallel for schedule(dynamic, 8) num_threads(thread_count()) if (nk > 64)
        for (long s = 0; s < nk; ++s) {
            const Key& key = keys[static_cast<size_t>(s)];
            auto [l, dv] = best_divisor(dk, key.P, key.Q, t, idx);
            const C& e = t == Target::V ? dk.mu[l][idx] : dk.lam[l][idx];
            if (is_resonant_value(dv, e)) {
                bad[static_cast<size_t>(s)] = 1;
                continue;
            }
            vals[static_cast<size_t>(s)] = sys.F[static_cast<size_t>(l)][k].coeff(key) / dv;
        }
        Series<C> g(sys.F[0][k].n_h, sys.F[0][k].n_v, sys.F[0][k].trunc);
        for (size_t s = 0; s < keys.size(); ++s) {
            if (bad[s]) throw ResonanceError("resonant divisor at " + key_string(keys[s]), keys[s], static_cast<int>(k));
            g.add_term(keys[s], vals[s]);
        }
        g.cleanup();
        G.push_back(std::move(g));
    }
    return G;
}

// G with L_i(G) = F_i for the single deck i (or L_{-i} when inverse).
template <class C>
VSeries<C> solve_single(int i, const VSeries<C>& Fi, const Decks<C>& decks, Block block, bool inverse) {
    decks.validate();
    const Decks<C> dk = inverse ? decks.inverse() : decks;
    if (i < 0 || i >= dk.q()) throw std::out_of_range("deck index out of range");
    detail::require_vorder2(Fi, "cochain");
    VSeries<C> G;
    for (size_t k = 0; k < Fi.size(); ++k) {
        auto [t, idx] = block_target(block, dk.n_h(), static_cast<int>(k));
        Series<C> g(Fi[k].n_h, Fi[k].n_v, Fi[k].trunc);
        for (const auto& [key, c] : Fi[k].terms) {
            C dv = divisor_value(dk, key.P, key.Q, t, idx, i);
            const C& e = t == Target::V ? dk.mu[i][idx] : dk.lam[i][idx];
            if (is_resonant_value(dv, e))
                throw ResonanceError("resonant divisor at " + key_string(key), key, static_cast<int>(k));
            g.add_term(key, c / dv);
        }
        g.cleanup();
        G.push_back(std::move(g));
    }
    return G;
}

// Data for the inverse family: F_{-i} = -E_i^{-1} (F_i o tau_hat_i^{-1}).
// If L_i(G) = F_i then L_{-i}(G) = F_{-i}.
template <class C>
std::vector<VSeries<C>> to_inverse_data(const std::vector<VSeries<C>>& F, const Decks<C>& decks, Block block) {
    const Decks<C> inv = decks.inverse();
    std::vector<VSeries<C>> out;
    for (size_t i = 0; i < F.size(); ++i) {
        VSeries<C> Fi;
        for (size_t k = 0; k < F[i].size(); ++k) {
            auto [t, idx] = block_target(block, decks.n_h(), static_cast<int>(k));
            const C einv = t == Target::V ? inv.mu[i][idx] : inv.lam[i][idx];
            Series<C> s(F[i][k].n_h, F[i][k].n_v, F[i][k].trunc);
            for (const auto& [key, c] : F[i][k].terms)
                s.add_term(key, -(c * monomial_value(inv.lam[i], inv.mu[i], key.P, key.Q) * einv));
            s.cleanup();
            Fi.push_back(std::move(s));
        }
        out.push_back(std::move(Fi));
    }
    return out;
}

struct BoundReport {
    bool pass = true;
    double C1 = 0.0;
    double norm_G = 0.0, norm_F = 0.0, factor = 0.0;
};

// Smallest C1 with ||G||_after <= max_i ||F_i||_before (C1/delta^(tau+nu) + C1/rho^(tau+nu)).
template <class C>
BoundReport bound_verify(const VSeries<C>& G, const std::vector<VSeries<C>>& F, double tau, double nu,
                         const GridSpec& before, const GridSpec& after, double delta, double rho) {
    if (!(delta > 0) || !(rho > 0)) throw std::invalid_argument("bound_verify needs delta, rho > 0");
    BoundReport br;
    br.norm_G = grid_sup_norm(G, after);
    for (const auto& Fi : F) br.norm_F = std::max(br.norm_F, grid_sup_norm(Fi, before));
    br.factor = std::pow(delta, -(tau + nu)) + std::pow(rho, -(tau + nu));
    if (br.norm_G == 0.0) return br;
    if (br.norm_F == 0.0) {
        br.pass = false;
        br.C1 = INFINITY;
        return br;
    }
    br.C1 = br.norm_G / (br.norm_F * br.factor);
    br.pass = std::isfinite(br.C1);
    return br;
}

// Grid with v radii scaled by e^{-rho} and each h radius pulled toward the
// logarithmic center of its samples by the factor keep (in (0, 1]).
GridSpec shrink_grid(const GridSpec& g, double keep, double rho);

template <class C>
Decks<C> decks_from_json(const json& j) {
    Decks<C> d;
    for (const auto& row : j.at("lambda")) {
        std::vector<C> r;
        for (const auto& e : row) r.push_back(json_scalar<C>(e));
        d.lam.push_back(r);
    }
    for (const auto& row : j.at("mu")) {
        std::vector<C> r;
        for (const auto& e : row) r.push_back(json_scalar<C>(e));
        d.mu.push_back(r);
    }
    d.validate();
    return d;
}

}  // namespace germlin
