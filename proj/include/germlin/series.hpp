#pragma once

// Sparse series, Laurent in h (n_h variables) and Taylor in v (n_v variables).

#include <algorithm>
#include <climits>
#include <cstdlib>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

#include "germlin/parallel.hpp"
#include "germlin/scalar.hpp"

namespace germlin {

struct Key {
    std::vector<int> P;  // Laurent exponents
    std::vector<int> Q;  // Taylor exponents, all >= 0

    int qdeg() const {
        int s = 0;
        for (int q : Q) s += q;
        return s;
    }
    int pabs() const {
        int s = 0;
        for (int p : P) s += std::abs(p);
        return s;
    }
};

// Ordered by v-degree, then Q, then P.
inline bool operator<(const Key& a, const Key& b) {
    int da = a.qdeg(), db = b.qdeg();
    if (da != db) return da < db;
    if (a.Q != b.Q) return a.Q < b.Q;
    return a.P < b.P;
}
inline bool operator==(const Key& a, const Key& b) { return a.P == b.P && a.Q == b.Q; }

inline Key key_sum(const Key& a, const Key& b) {
    Key k;
    k.P.resize(a.P.size());
    k.Q.resize(a.Q.size());
    for (size_t i = 0; i < a.P.size(); ++i) k.P[i] = a.P[i] + b.P[i];
    for (size_t j = 0; j < a.Q.size(); ++j) k.Q[j] = a.Q[j] + b.Q[j];
    return k;
}

std::string key_string(const Key& k);

struct Trunc {
    int N_h = 0;  // max |P|
    int N_v = 0;  // max |Q|
};

class TruncationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kFloatCleanup = 1e-14;

template <class C>
struct Series {
    int n_h = 0, n_v = 0;
    Trunc trunc;
    bool vorder2 = false;
    std::map<Key, C> terms;

    Series() = default;
    Series(int nh, int nv, Trunc t) : n_h(nh), n_v(nv), trunc(t) {}

    bool empty() const { return terms.empty(); }

    // Accumulate c into key k. Keys beyond N_v are dropped, beyond N_h rejected.
    void add_term(const Key& k, const C& c) {
        if (scalar_traits<C>::is_zero(c)) return;
        if (k.qdeg() > trunc.N_v) return;
        if (k.pabs() > trunc.N_h)
            throw TruncationError("Laurent spread " + std::to_string(k.pabs()) + " exceeds N_h=" +
                                  std::to_string(trunc.N_h));
        if (vorder2 && k.qdeg() < 2) throw std::logic_error("term of v-degree < 2 in a v-order-2 series");
        auto it = terms.find(k);
        if (it == terms.end()) {
            terms.emplace(k, c);
        } else {
            it->second += c;
            if (scalar_traits<C>::is_zero(it->second)) terms.erase(it);
        }
    }

    C coeff(const Key& k) const {
        auto it = terms.find(k);
        return it == terms.end() ? scalar_traits<C>::zero() : it->second;
    }

    int v_order() const {
        int m = INT_MAX;
        for (const auto& [k, c] : terms) m = std::min(m, k.qdeg());
        return m;
    }

    int max_pabs() const {
        int m = 0;
        for (const auto& [k, c] : terms) m = std::max(m, k.pabs());
        return m;
    }

    double max_abs() const {
        double m = 0;
        for (const auto& [k, c] : terms) m = std::max(m, scalar_traits<C>::abs(c));
        return m;
    }

    // Float mode: drop coefficients below 1e-14 times the largest one.
    void cleanup() {
        if constexpr (!scalar_traits<C>::exact) {
            double cut = kFloatCleanup * max_abs();
            for (auto it = terms.begin(); it != terms.end();) {
                if (std::abs(it->second) < cut)
                    it = terms.erase(it);
                else
                    ++it;
            }
        }
    }
};

template <class C>
using VSeries = std::vector<Series<C>>;

template <class C>
Series<C> monomial(int n_h, int n_v, Trunc t, std::vector<int> P, std::vector<int> Q, const C& c) {
    Series<C> s(n_h, n_v, t);
    s.add_term(Key{std::move(P), std::move(Q)}, c);
    return s;
}

template <class C>
void check_dims(const Series<C>& f, const Series<C>& g) {
    if (f.n_h != g.n_h || f.n_v != g.n_v) throw std::invalid_argument("series dimension mismatch");
}

inline Trunc tighter(Trunc a, Trunc b) { return Trunc{std::min(a.N_h, b.N_h), std::min(a.N_v, b.N_v)}; }

template <class C>
Series<C> add(const Series<C>& f, const Series<C>& g) {
    check_dims(f, g);
    Series<C> r(f.n_h, f.n_v, tighter(f.trunc, g.trunc));
    for (const auto& [k, c] : f.terms) r.add_term(k, c);
    for (const auto& [k, c] : g.terms) r.add_term(k, c);
    r.cleanup();
    return r;
}

template <class C>
Series<C> scale(const Series<C>& f, const C& c) {
    Series<C> r(f.n_h, f.n_v, f.trunc);
    if (scalar_traits<C>::is_zero(c)) return r;
    for (const auto& [k, a] : f.terms) r.add_term(k, a * c);
    r.vorder2 = f.vorder2;
    return r;
}

template <class C>
Series<C> sub(const Series<C>& f, const Series<C>& g) {
    return add(f, scale(g, -scalar_traits<C>::one()));
}

namespace kernels {

template <class C>
struct Contribution {
    Key k;
    C c;
};

namespace serial {

template <class C>
Series<C> mul(const Series<C>& f, const Series<C>& g, Trunc t) {
    Series<C> r(f.n_h, f.n_v, t);
    for (const auto& [ka, a] : f.terms)
        for (const auto& [kb, b] : g.terms) {
            if (ka.qdeg() + kb.qdeg() > t.N_v) continue;
            r.add_term(key_sum(ka, kb), a * b);
        }
    return r;
}

}  // namespace serial

namespace omp {

// Products are formed in parallel over contiguous chunks of f; accumulation
// then replays them in serial order, so float results match serial::mul bitwise.
template <class C>
Series<C> mul(const Series<C>& f, const Series<C>& g, Trunc t) {
    std::vector<const std::pair<const Key, C>*> fa;
    fa.reserve(f.terms.size());
    for (const auto& e : f.terms) fa.push_back(&e);
    std::vector<const std::pair<const Key, C>*> gb;
    gb.reserve(g.terms.size());
    for (const auto& e : g.terms) gb.push_back(&e);
    const long nf = static_cast<long>(fa.size());
    std::vector<std::vector<Contribution<C>>> rows(fa.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(thread_count())
    for (long i = 0; i < nf; ++i) {
        auto& row = rows[static_cast<size_t>(i)];
        const auto& [ka, a] = *fa[static_cast<size_t>(i)];
        for (const auto* pb : gb) {
            if (ka.qdeg() + pb->first.qdeg() > t.N_v) continue;
            row.push_back(Contribution<C>{key_sum(ka, pb->first), a * pb->second});
        }
    }
    Series<C> r(f.n_h, f.n_v, t);
    for (const auto& row : rows)
        for (const auto& ct : row) r.add_term(ct.k, ct.c);
    return r;
}

}  // namespace omp
}  // namespace kernels

template <class C>
Series<C> mul(const Series<C>& f, const Series<C>& g) {
    check_dims(f, g);
    Trunc t = tighter(f.trunc, g.trunc);
    if (t.N_h == 0 && t.N_v == 0 && (f.n_h > 0 || f.n_v > 0))
        throw std::invalid_argument("mul needs a nonzero truncation bound");
    Series<C> r = (f.terms.size() * g.terms.size() > 256) ? kernels::omp::mul(f, g, t)
                                                          : kernels::serial::mul(f, g, t);
    r.cleanup();
    return r;
}

template <class C>
Series<C> homogeneous_part(const Series<C>& f, int k) {
    Series<C> r(f.n_h, f.n_v, f.trunc);
    for (const auto& [key, c] : f.terms)
        if (key.qdeg() == k) r.terms.emplace(key, c);
    return r;
}

template <class C>
Series<C> truncate_v(const Series<C>& f, int N_v) {
    Series<C> r(f.n_h, f.n_v, Trunc{f.trunc.N_h, std::min(N_v, f.trunc.N_v)});
    for (const auto& [key, c] : f.terms)
        if (key.qdeg() <= N_v) r.terms.emplace(key, c);
    return r;
}

template <class C>
Series<C> with_trunc(const Series<C>& f, Trunc t) {
    Series<C> r(f.n_h, f.n_v, t);
    for (const auto& [key, c] : f.terms) r.add_term(key, c);
    return r;
}

// Product of the values lam^P mu^Q, by repeated multiplication in a fixed order.
template <class C>
C monomial_value(const std::vector<C>& lam, const std::vector<C>& mu, const std::vector<int>& P,
                 const std::vector<int>& Q) {
    C acc = scalar_traits<C>::one();
    for (size_t i = 0; i < P.size(); ++i) acc *= ipow(lam[i], P[i]);
    for (size_t j = 0; j < Q.size(); ++j) acc *= ipow(mu[j], Q[j]);
    return acc;
}

// f(lam h, mu v)
template <class C>
Series<C> compose_linear(const Series<C>& f, const std::vector<C>& lam, const std::vector<C>& mu) {
    Series<C> r(f.n_h, f.n_v, f.trunc);
    for (const auto& [k, c] : f.terms) r.add_term(k, c * monomial_value(lam, mu, k.P, k.Q));
    r.cleanup();
    return r;
}

namespace detail {

inline long gen_binom(int p, int k) {
    // p(p-1)...(p-k+1)/k!, an integer for integer p
    mpz_class num = 1, den = 1;
    for (int i = 0; i < k; ++i) {
        num *= (p - i);
        den *= (i + 1);
    }
    mpz_class q = num / den;
    return q.get_si();
}

template <class C>
void require_vorder2(const VSeries<C>& phis, const char* what) {
    for (const auto& s : phis)
        if (!s.empty() && s.v_order() < 2)
            throw std::invalid_argument(std::string(what) + " must have v-order >= 2");
}

}  // namespace detail

// f(h + phi_h, v + phi_v), truncated at v-degree N_v. Negative powers use
// h^p (1 + phi/h)^p expanded binomially; the expansion stops because each
// factor phi raises the v-degree by at least 2.
template <class C>
Series<C> substitute_shift(const Series<C>& f, const VSeries<C>& phi_h, const VSeries<C>& phi_v, int N_v,
                           int N_h_budget = -1) {
    if (static_cast<int>(phi_h.size()) != f.n_h || static_cast<int>(phi_v.size()) != f.n_v)
        throw std::invalid_argument("substitute_shift: argument count mismatch");
    detail::require_vorder2(phi_h, "phi_h");
    detail::require_vorder2(phi_v, "phi_v");
    const int budget = N_h_budget >= 0 ? N_h_budget : f.trunc.N_h;
    const Trunc work{budget, std::min(N_v, f.trunc.N_v)};
    const int nh = f.n_h, nv = f.n_v;

    auto unit = [&]() { return monomial<C>(nh, nv, work, std::vector<int>(nh, 0), std::vector<int>(nv, 0), scalar_traits<C>::one()); };
    auto regrade = [&](const Series<C>& s) { return with_trunc(s, work); };

    // powers phi_h[i]^k and phi_v[j]^k
    std::vector<std::vector<Series<C>>> hp(nh), vp(nv);
    auto power = [&](std::vector<Series<C>>& cache, const Series<C>& base, int k) -> const Series<C>& {
        if (cache.empty()) cache.push_back(unit());
        while (static_cast<int>(cache.size()) <= k) cache.push_back(mul(cache.back(), regrade(base)));
        return cache[static_cast<size_t>(k)];
    };

    std::vector<std::map<int, Series<C>>> hfac(nh), vfac(nv);
    auto h_factor = [&](int i, int p) -> const Series<C>& {
        auto it = hfac[i].find(p);
        if (it != hfac[i].end()) return it->second;
        Series<C> acc(nh, nv, work);
        const bool zero_phi = phi_h[i].empty();
        for (int k = 0;; ++k) {
            if (p >= 0 && k > p) break;
            if (2 * k > work.N_v) break;
            if (zero_phi && k > 0) break;
            const Series<C>& pk = power(hp[i], phi_h[i], k);
            if (k > 0 && pk.empty()) break;
            std::vector<int> P(nh, 0);
            P[i] = p - k;
            Series<C> term = mul(monomial<C>(nh, nv, work, P, std::vector<int>(nv, 0),
                                             scalar_traits<C>::from_int(detail::gen_binom(p, k))),
                                 pk);
            acc = add(acc, term);
        }
        return hfac[i].emplace(p, std::move(acc)).first->second;
    };
    auto v_factor = [&](int j, int q) -> const Series<C>& {
        auto it = vfac[j].find(q);
        if (it != vfac[j].end()) return it->second;
        Series<C> base(nh, nv, work);
        std::vector<int> Q(nv, 0);
        Q[j] = 1;
        base.add_term(Key{std::vector<int>(nh, 0), Q}, scalar_traits<C>::one());
        base = add(base, regrade(phi_v[j]));
        Series<C> acc = unit();
        for (int k = 0; k < q; ++k) acc = mul(acc, base);
        return vfac[j].emplace(q, std::move(acc)).first->second;
    };

    Series<C> out(nh, nv, work);
    for (const auto& [key, c] : f.terms) {
        if (key.qdeg() > work.N_v) continue;
        Series<C> prod = unit();
        for (int i = 0; i < nh; ++i) prod = mul(prod, h_factor(i, key.P[i]));
        for (int j = 0; j < nv; ++j)
            if (key.Q[j] != 0) prod = mul(prod, v_factor(j, key.Q[j]));
        for (const auto& [k2, c2] : prod.terms) out.add_term(k2, c * c2);
    }
    out.cleanup();
    return out;
}

// Helpers for maps (h, v) -> (h', v') stored as n_h + n_v component series.
template <class C>
VSeries<C> h_block(const VSeries<C>& m, int n_h) {
    return VSeries<C>(m.begin(), m.begin() + n_h);
}
template <class C>
VSeries<C> v_block(const VSeries<C>& m, int n_h) {
    return VSeries<C>(m.begin() + n_h, m.end());
}

template <class C>
VSeries<C> add(const VSeries<C>& a, const VSeries<C>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    VSeries<C> r;
    for (size_t i = 0; i < a.size(); ++i) r.push_back(add(a[i], b[i]));
    return r;
}

template <class C>
VSeries<C> sub(const VSeries<C>& a, const VSeries<C>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("vector size mismatch");
    VSeries<C> r;
    for (size_t i = 0; i < a.size(); ++i) r.push_back(sub(a[i], b[i]));
    return r;
}

// Componentwise diag(scales) * a
template <class C>
VSeries<C> scale_each(const VSeries<C>& a, const std::vector<C>& scales) {
    VSeries<C> r;
    for (size_t i = 0; i < a.size(); ++i) r.push_back(scale(a[i], scales[i]));
    return r;
}

template <class C>
VSeries<C> homogeneous_part(const VSeries<C>& a, int k) {
    VSeries<C> r;
    for (const auto& s : a) r.push_back(homogeneous_part(s, k));
    return r;
}

template <class C>
VSeries<C> truncate_v(const VSeries<C>& a, int N_v) {
    VSeries<C> r;
    for (const auto& s : a) r.push_back(truncate_v(s, N_v));
    return r;
}

template <class C>
std::vector<C> inverse_each(const std::vector<C>& v) {
    std::vector<C> r;
    for (const auto& x : v) r.push_back(scalar_traits<C>::one() / x);
    return r;
}

// f o (diag(lam, mu) + g), computed as (f o L)(x + L^{-1} g(x)).
template <class C>
Series<C> compose(const Series<C>& f, const std::vector<C>& lam, const std::vector<C>& mu, const VSeries<C>& g,
                  int N_v, int N_h_budget = -1) {
    const int nh = f.n_h;
    VSeries<C> gh = scale_each(h_block(g, nh), inverse_each(lam));
    VSeries<C> gv = scale_each(v_block(g, nh), inverse_each(mu));
    return substitute_shift(compose_linear(f, lam, mu), gh, gv, N_v, N_h_budget);
}

// psi with (Id + phi)^{-1} = Id + psi, by the fixed point psi = -phi o (Id + psi).
template <class C>
VSeries<C> invert_near_identity(const VSeries<C>& phi, int n_h, int N_v, int N_h_budget = -1) {
    detail::require_vorder2(phi, "phi");
    VSeries<C> psi;
    for (const auto& s : phi) psi.push_back(Series<C>(s.n_h, s.n_v, s.trunc));
    for (int it = 0; it <= N_v; ++it) {
        VSeries<C> next;
        VSeries<C> ph = h_block(psi, n_h), pv = v_block(psi, n_h);
        for (const auto& s : phi)
            next.push_back(scale(substitute_shift(s, ph, pv, N_v, N_h_budget), -scalar_traits<C>::one()));
        bool same = true;
        for (size_t i = 0; i < next.size() && same; ++i) same = next[i].terms == psi[i].terms;
        psi = std::move(next);
        if (same && scalar_traits<C>::exact) break;
    }
    return psi;
}

}  // namespace germlin
