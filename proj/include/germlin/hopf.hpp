#pragma once

// Hopf manifolds: eigenvalue group membership, classification, vanishing criteria for flat line
// bundles, the precondition checklist, the nested Stein covering, transition chains, Shilov
// constants and the Jordan deformation.

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "germlin/json_util.hpp"
#include "germlin/parallel.hpp"
#include "germlin/scalar.hpp"

namespace germlin {

constexpr double kHopfTol = 1e-12;

// Exact in exact mode, else |a - b| <= 1e-12 max(|a|, |b|).
template <class C>
bool hopf_equal(const C& a, const C& b) {
    if constexpr (scalar_traits<C>::exact) {
        return a == b;
    } else {
        const double s = std::max(std::abs(a), std::abs(b));
        return std::abs(a - b) <= kHopfTol * s;
    }
}

template <class C>
struct Torsion {
    int m = 1;
    C a;  // a^m = 1
};

template <class C>
struct HopfSpec {
    std::vector<C> alpha;
    std::vector<bool> jordan_overdiag;  // n - 1 entries, entry i couples z_i and z_{i+1}
    std::optional<Torsion<C>> torsion;

    int n() const { return static_cast<int>(alpha.size()); }
    bool diagonal() const {
        for (bool b : jordan_overdiag)
            if (b) return false;
        return true;
    }
    void validate() const;
};

template <class C>
struct FlatBundle {
    C beta;
    std::optional<C> d_char;
    void validate() const {
        if (scalar_traits<C>::is_zero(beta)) throw std::invalid_argument("beta must be nonzero");
    }
};

template <class C>
void HopfSpec<C>::validate() const {
    using T = scalar_traits<C>;
    if (n() < 2) throw std::invalid_argument("Hopf spec needs n >= 2");
    for (const auto& a : alpha) {
        if (T::is_zero(a)) throw std::invalid_argument("alpha entries must be nonzero");
        if (!T::abs_greater(T::one(), a)) throw std::invalid_argument("alpha entries must have modulus < 1");
    }
    if (!jordan_overdiag.empty()) {
        if (static_cast<int>(jordan_overdiag.size()) != n() - 1)
            throw std::invalid_argument("jordan_overdiag needs n - 1 entries");
        for (int i = 0; i + 1 < n(); ++i)
            if (jordan_overdiag[static_cast<size_t>(i)] && !(alpha[static_cast<size_t>(i)] == alpha[static_cast<size_t>(i + 1)]))
                throw std::invalid_argument("a Jordan coupling needs equal eigenvalues");
    }
    if (torsion) {
        if (torsion->m < 1) throw std::invalid_argument("torsion order must be >= 1");
        if (!hopf_equal(ipow(torsion->a, torsion->m), T::one())) throw std::invalid_argument("torsion a must satisfy a^m = 1");
    }
}

enum class ExpDomain { Integer, Natural };

// Powers alpha_l^k for |k| <= B.
template <class C>
struct PowerTable {
    int B = 0;
    std::vector<std::vector<C>> pw;
    std::vector<double> logabs;

    PowerTable(const std::vector<C>& alpha, int bound) : B(bound) {
        for (const auto& a : alpha) {
            std::vector<C> row(static_cast<size_t>(2 * B + 1));
            row[static_cast<size_t>(B)] = scalar_traits<C>::one();
            const C inv = scalar_traits<C>::one() / a;
            for (int k = 1; k <= B; ++k) {
                row[static_cast<size_t>(B + k)] = row[static_cast<size_t>(B + k - 1)] * a;
                row[static_cast<size_t>(B - k)] = row[static_cast<size_t>(B - k + 1)] * inv;
            }
            pw.push_back(std::move(row));
            logabs.push_back(std::log(scalar_traits<C>::abs(a)));
        }
    }
    const C& at(int l, int k) const { return pw[static_cast<size_t>(l)][static_cast<size_t>(B + k)]; }
    int n() const { return static_cast<int>(pw.size()); }
};

struct Membership {
    bool member = false;
    std::vector<int> witness;  // exponent vector, smallest |v|_1 then lexicographic
    int bound = 0;
    long scanned = 0;
};

namespace kernels {

// First v (lexicographic) in the shell |v|_1 = s with v_0 = v0 and alpha^v == target.
// Prunes on log-modulus reach of the unassigned coordinates.
template <class C>
bool shell_search(const PowerTable<C>& t, const C& target, double log_target, int s, int v0, ExpDomain dom,
                  std::vector<int>& out, long& scanned) {
    const int n = t.n();
    std::vector<double> reach(static_cast<size_t>(n + 1), 0.0);  // max |log|alpha_l|| over l >= k
    for (int k = n - 1; k >= 0; --k) reach[static_cast<size_t>(k)] = std::max(reach[static_cast<size_t>(k + 1)], std::abs(t.logabs[static_cast<size_t>(k)]));
    std::vector<int> v(static_cast<size_t>(n), 0);
    v[0] = v0;
    const int rem0 = s - std::abs(v0);
    if (rem0 < 0 || (dom == ExpDomain::Natural && v0 < 0)) return false;
    auto rec = [&](auto&& self, int k, int rem, const C& prod, double logp) -> bool {
        if (std::abs(log_target - logp) > rem * reach[static_cast<size_t>(k)] + 1e-9) return false;
        if (k == n - 1) {
            const int nx = rem == 0 ? 1 : 2;
            for (int c = 0; c < nx; ++c) {
                const int x = c == 0 && rem > 0 ? -rem : rem;
                if (dom == ExpDomain::Natural && x < 0) continue;
                ++scanned;
                if (hopf_equal(prod * t.at(k, x), target)) {
                    v[static_cast<size_t>(k)] = x;
                    out = v;
                    return true;
                }
            }
            return false;
        }
        for (int x = dom == ExpDomain::Natural ? 0 : -rem; x <= rem; ++x) {
            v[static_cast<size_t>(k)] = x;
            if (self(self, k + 1, rem - std::abs(x), prod * t.at(k, x), logp + x * t.logabs[static_cast<size_t>(k)])) return true;
        }
        v[static_cast<size_t>(k)] = 0;
        return false;
    };
    if (n == 1) {
        if (rem0 != 0) return false;
        ++scanned;
        if (hopf_equal(t.at(0, v0), target)) {
            out = v;
            return true;
        }
        return false;
    }
    return rec(rec, 1, rem0, t.at(0, v0), v0 * t.logabs[0]);
}

namespace serial {
template <class C>
Membership delta_search(const PowerTable<C>& t, const C& target, int bound, ExpDomain dom) {
    Membership m;
    m.bound = bound;
    const double lt = std::log(scalar_traits<C>::abs(target));
    for (int s = 0; s <= bound; ++s)
        for (int v0 = dom == ExpDomain::Natural ? 0 : -s; v0 <= s; ++v0)
            if (shell_search(t, target, lt, s, v0, dom, m.witness, m.scanned)) {
                m.member = true;
                return m;
            }
    return m;
}
}  // namespace serial

namespace omp {
// Each shell is split over v_0; the smallest v_0 with a hit wins, so the witness matches serial.
template <class C>
Membership delta_search(const PowerTable<C>& t, const C& target, int bound, ExpDomain dom) {
    Membership m;
    m.bound = bound;
    const double lt = std::log(scalar_traits<C>::abs(target));
    for (int s = 0; s <= bound; ++s) {
        const int lo = dom == ExpDomain::Natural ? 0 : -s;
        const int cnt = s - lo + 1;
        std::vector<std::vector<int>> hits(static_cast<size_t>(cnt));
        std::vector<char> found(static_cast<size_t>(cnt), 0);
        long scanned = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : scanned) num_threads(thread_count())
        for (int idx = 0; idx < cnt; ++idx) {
            long sc = 0;
            found[static_cast<size_t>(idx)] = shell_search(t, target, lt, s, lo + idx, dom, hits[static_cast<size_t>(idx)], sc);
            scanned += sc;
        }
        m.scanned += scanned;
        for (int idx = 0; idx < cnt; ++idx)
            if (found[static_cast<size_t>(idx)]) {
                m.member = true;
                m.witness = hits[static_cast<size_t>(idx)];
                return m;
            }
    }
    return m;
}
}  // namespace omp

}  // namespace kernels

// Is target = alpha^v for some v with |v|_1 <= bound?
template <class C>
Membership delta_member_target(const C& target, const std::vector<C>& alpha, int bound, ExpDomain dom = ExpDomain::Integer) {
    if (bound < 1) throw std::invalid_argument("exponent bound must be >= 1");
    if (scalar_traits<C>::is_zero(target)) {
        Membership m;
        m.bound = bound;
        return m;
    }
    return kernels::omp::delta_search(PowerTable<C>(alpha, bound), target, bound, dom);
}

// beta^m_power in Delta_{alpha_1..alpha_n}, v in Z^n by default.
template <class C>
Membership delta_membership(const C& beta, const HopfSpec<C>& spec, int m_power, int exp_bound,
                            ExpDomain dom = ExpDomain::Integer) {
    if (m_power < 1) throw std::invalid_argument("m_power must be >= 1");
    return delta_member_target(ipow(beta, m_power), spec.alpha, exp_bound, dom);
}

enum class HopfType { Diagonal, Classical, Generic, Undetermined };
const char* hopf_type_name(HopfType t);

struct Classification {
    HopfType type = HopfType::Generic;
    bool linear = false;           // Jordan couplings present
    std::vector<int> relation;     // alpha^{v+} = alpha^{v-}, empty if none found
    bool moduli_strict = true;
    int bound = 0;
    std::string reason;
};

namespace detail {

// Relations alpha^{v+} = alpha^{v-}, v != 0, |v+|_1 <= B, |v-|_1 <= B, first nonzero entry positive.
// Smallest |v|_1, then lexicographic.
template <class C>
std::vector<int> find_relation(const std::vector<C>& alpha, int B) {
    const int n = static_cast<int>(alpha.size());
    const PowerTable<C> t(alpha, B);
    std::vector<int> v(static_cast<size_t>(n), 0), out;
    auto rec = [&](auto&& self, int k, int rem, int pos, int neg, bool lead) -> bool {
        if (k == n) {
            if (rem != 0 || lead) return false;
            C lhs = scalar_traits<C>::one(), rhs = scalar_traits<C>::one();
            for (int l = 0; l < n; ++l) {
                const int x = v[static_cast<size_t>(l)];
                if (x > 0) lhs *= t.at(l, x);
                if (x < 0) rhs *= t.at(l, -x);
            }
            if (hopf_equal(lhs, rhs)) {
                out = v;
                return true;
            }
            return false;
        }
        for (int x = lead ? 0 : -rem; x <= rem; ++x) {
            if (x > 0 && pos + x > B) break;
            if (x < 0 && neg - x > B) continue;
            v[static_cast<size_t>(k)] = x;
            if (self(self, k + 1, rem - std::abs(x), pos + std::max(x, 0), neg + std::max(-x, 0), lead && x == 0)) return true;
        }
        v[static_cast<size_t>(k)] = 0;
        return false;
    };
    for (int s = 1; s <= 2 * B; ++s)
        if (rec(rec, 0, s, 0, 0, true)) return out;
    return {};
}

}  // namespace detail

// classical iff all alpha equal; generic up to bound if diagonal, pairwise distinct moduli and
// no relation with each side's exponent sum <= exp_bound; undetermined for Jordan data whose
// eigenvalues are not all equal.
template <class C>
Classification classify_hopf(const HopfSpec<C>& spec, int exp_bound) {
    if (exp_bound < 1) throw std::invalid_argument("exponent bound must be >= 1");
    spec.validate();
    using T = scalar_traits<C>;
    Classification c;
    c.bound = exp_bound;
    c.linear = !spec.diagonal();
    bool all_equal = true;
    for (const auto& a : spec.alpha) all_equal = all_equal && a == spec.alpha[0];
    // after sorting by modulus the ordering must be strict
    for (int i = 0; i < spec.n(); ++i)
        for (int k = i + 1; k < spec.n(); ++k)
            if (!T::abs_greater(spec.alpha[static_cast<size_t>(i)], spec.alpha[static_cast<size_t>(k)]) &&
                !T::abs_greater(spec.alpha[static_cast<size_t>(k)], spec.alpha[static_cast<size_t>(i)]))
                c.moduli_strict = false;
    c.relation = detail::find_relation(spec.alpha, exp_bound);
    if (all_equal) {
        c.type = HopfType::Classical;
        c.moduli_strict = false;
        c.reason = c.linear ? "scalar diagonal part with Jordan couplings" : "all eigenvalues equal";
        return c;
    }
    if (c.linear) {
        c.type = HopfType::Undetermined;
        c.reason = "Jordan couplings with unequal eigenvalues";
        return c;
    }
    if (!c.relation.empty()) {
        c.type = HopfType::Diagonal;
        c.reason = "multiplicative relation";
    } else if (!c.moduli_strict) {
        c.type = HopfType::Diagonal;
        c.reason = "moduli not strictly increasing";
    } else {
        c.type = HopfType::Generic;
        c.reason = "no relation up to bound";
    }
    return c;
}

json relation_json(const std::vector<int>& v);
json classification_json(const Classification& c);

enum class VanishingVariant { MallGeneric, Classical, Zhou1, Zhou2 };
const char* vanishing_variant_name(VanishingVariant v);
VanishingVariant parse_vanishing_variant(const std::string& s);

struct VanishingResult {
    VanishingVariant variant = VanishingVariant::MallGeneric;
    bool criterion_holds = false;  // then H0 = H1 = 0
    std::string reason;
    json witness;  // null when the criterion holds
    int bound = 0;
};

json vanishing_json(const VanishingResult& r);

template <class C>
VanishingResult vanishing_predicate(const FlatBundle<C>& bundle, const HopfSpec<C>& spec, VanishingVariant variant,
                                    int exp_bound) {
    bundle.validate();
    const Classification cls = classify_hopf(spec, exp_bound);
    VanishingResult r;
    r.variant = variant;
    r.bound = exp_bound;
    auto need = [&](bool ok, const char* what) {
        if (!ok) throw std::invalid_argument(std::string("variant ") + vanishing_variant_name(variant) + " needs " + what);
    };
    switch (variant) {
        case VanishingVariant::MallGeneric: {
            need(cls.type == HopfType::Generic, "a generic spec");
            const Membership m = delta_membership(bundle.beta, spec, 1, exp_bound);
            r.criterion_holds = !m.member;
            if (m.member) r.witness = json{{"v", m.witness}};
            r.reason = m.member ? "beta in Delta" : "beta not in Delta up to bound";
            break;
        }
        case VanishingVariant::Classical: {
            need(cls.type == HopfType::Classical, "a classical spec");
            const Membership m = delta_member_target(bundle.beta, std::vector<C>{spec.alpha[0]}, exp_bound);
            r.criterion_holds = !m.member;
            if (m.member) r.witness = json{{"k", m.witness[0]}};
            r.reason = m.member ? "beta in Delta_alpha" : "beta not in Delta_alpha up to bound";
            break;
        }
        case VanishingVariant::Zhou1: {
            need(cls.type == HopfType::Classical && !cls.linear, "a scalar contraction");
            need(spec.torsion.has_value() && bundle.d_char.has_value(), "torsion data and d_char");
            const C& mu = spec.alpha[0];
            r.criterion_holds = true;
            for (int k = 0; k <= exp_bound; ++k)
                if (hopf_equal(bundle.beta, ipow(mu, k)) && hopf_equal(*bundle.d_char, ipow(spec.torsion->a, k))) {
                    r.criterion_holds = false;
                    r.witness = json{{"r", k}};
                    break;
                }
            r.reason = r.criterion_holds ? "no r with c = mu^r, d = a^r up to bound" : "c = mu^r and d = a^r";
            break;
        }
        case VanishingVariant::Zhou2: {
            need(cls.type == HopfType::Generic, "a generic spec");
            need(spec.torsion.has_value() && bundle.d_char.has_value(), "torsion data and d_char");
            const int n = spec.n();
            const PowerTable<C> t(spec.alpha, exp_bound);
            std::vector<int> v(static_cast<size_t>(n), 0);
            r.criterion_holds = true;
            // v in Z^n, |v|_1 <= bound, filtered by the two cones as stated
            auto rec = [&](auto&& self, int k, int rem) -> bool {
                if (k == n) {
                    bool all_pos = true, all_nonneg = true, some_zero = false;
                    int sum = 0;
                    for (int x : v) {
                        all_pos = all_pos && x >= 1;
                        all_nonneg = all_nonneg && x >= 0;
                        some_zero = some_zero || x == 0;
                        sum += x;
                    }
                    const bool cone1 = all_pos, cone2 = all_nonneg && some_zero;
                    if (!cone1 && !cone2) return false;
                    C p = scalar_traits<C>::one();
                    for (int l = 0; l < n; ++l) p *= t.at(l, v[static_cast<size_t>(l)]);
                    if (hopf_equal(bundle.beta, p) && hopf_equal(*bundle.d_char, ipow(spec.torsion->a, sum))) {
                        r.witness = json{{"v", v}, {"cone", cone1 ? "v >= (1,...,1)" : "v >= 0, some v_i = 0"}};
                        return true;
                    }
                    return false;
                }
                for (int x = -rem; x <= rem; ++x) {
                    v[static_cast<size_t>(k)] = x;
                    if (self(self, k + 1, rem - std::abs(x))) return true;
                }
                v[static_cast<size_t>(k)] = 0;
                return false;
            };
            if (rec(rec, 0, exp_bound)) r.criterion_holds = false;
            r.reason = r.criterion_holds ? "no admissible v up to bound" : "c = mu^v and d = a^|v|";
            break;
        }
    }
    return r;
}

struct CheckItem {
    std::string condition;
    bool pass = true;
    json witness;  // null on pass
};

struct Checklist {
    bool pass = true;
    int N_v = 0, bound = 0;
    std::vector<CheckItem> items;
};

json checklist_json(const Checklist& c);

// Genericity, then beta alpha_i^{+-1} not in Delta and beta^{-m} alpha_i not in Delta for m = 1..N_v.
template <class C>
Checklist hopf_precheck(const FlatBundle<C>& bundle, const HopfSpec<C>& spec, int N_v, int exp_bound) {
    bundle.validate();
    if (N_v < 1) throw std::invalid_argument("N_v must be >= 1");
    Checklist cl;
    cl.N_v = N_v;
    cl.bound = exp_bound;
    auto add = [&](CheckItem it) {
        cl.pass = cl.pass && it.pass;
        cl.items.push_back(std::move(it));
    };
    const Classification cls = classify_hopf(spec, exp_bound);
    {
        CheckItem it{"spec generic", cls.type == HopfType::Generic, nullptr};
        if (!it.pass) it.witness = json{{"type", hopf_type_name(cls.type)}, {"reason", cls.reason}, {"relation", relation_json(cls.relation)}};
        add(std::move(it));
    }
    auto member_item = [&](const std::string& name, const C& target) {
        const Membership m = delta_member_target(target, spec.alpha, exp_bound);
        CheckItem it{name, !m.member, nullptr};
        if (m.member) it.witness = json{{"v", m.witness}};
        add(std::move(it));
    };
    const int n = spec.n();
    for (int i = 0; i < n; ++i) {
        const C& a = spec.alpha[static_cast<size_t>(i)];
        const std::string ai = "alpha_" + std::to_string(i + 1);
        member_item("beta*" + ai + " not in Delta", bundle.beta * a);
        member_item("beta/" + ai + " not in Delta", bundle.beta / a);
    }
    for (int m = 1; m <= N_v; ++m) {
        const C bm = ipow(bundle.beta, -m);
        for (int i = 0; i < n; ++i)
            member_item("beta^-" + std::to_string(m) + "*alpha_" + std::to_string(i + 1) + " not in Delta",
                        bm * spec.alpha[static_cast<size_t>(i)]);
    }
    return cl;
}

struct H0Count {
    long count = 0;
    int bound = 0;
    std::vector<std::vector<int>> witnesses;  // first few, lexicographic within |v|_1
};

// Monomials z^v, v in N^n, |v|_1 <= bound, invariant under the twisted action: alpha^v = beta.
template <class C>
H0Count h0_monomial_oracle(const FlatBundle<C>& bundle, const HopfSpec<C>& spec, int exp_bound) {
    if (!spec.diagonal()) throw std::invalid_argument("monomial oracle needs a diagonal spec");
    H0Count h;
    h.bound = exp_bound;
    const int n = spec.n();
    std::vector<int> v(static_cast<size_t>(n), 0);
    auto rec = [&](auto&& self, int k, int rem, const C& prod) -> void {
        if (k == n) {
            if (rem == 0 && hopf_equal(prod, bundle.beta)) {
                ++h.count;
                if (h.witnesses.size() < 8) h.witnesses.push_back(v);
            }
            return;
        }
        C p = prod;
        for (int x = 0; x <= rem; ++x) {
            v[static_cast<size_t>(k)] = x;
            self(self, k + 1, rem - x, p);
            p *= spec.alpha[static_cast<size_t>(k)];
        }
        v[static_cast<size_t>(k)] = 0;
    };
    for (int s = 0; s <= exp_bound; ++s) rec(rec, 0, s, scalar_traits<C>::one());
    return h;
}

// Covering pieces U_i^j: r_i^j - delta < |z_j| < r_i^j + delta, |z_k| < r_4^j + delta/2 (k != j).
struct NestedCoveringSpec {
    int n = 0;
    double delta = 0;
    std::vector<std::array<double, 4>> radii;  // r_1..r_4 per j
    std::vector<double> modulus;               // |alpha_j|
    std::vector<double> expansion;             // 1/|alpha_j| = r_4/r_1
    // rational data when every |alpha_j| is rational
    bool exact = false;
    std::vector<mpq_class> r1_q, r4_q, modulus_q;
    bool arcs_cover = false;   // the three annuli cover the log circle for every j
    bool common_outer = false; // all r_4^j equal
    bool covering_certified() const { return arcs_cover && common_outer; }
};

namespace detail {
NestedCoveringSpec build_covering_impl(const std::vector<double>& modulus, const std::vector<mpq_class>* modulus_q,
                                       const mpq_class& delta, const std::vector<mpq_class>& r1);
std::optional<mpq_class> exact_sqrt(const mpq_class& x);
}  // namespace detail

// r_4 = r_1/|alpha_j|, r_2, r_3 geometric. Throws if delta <= 0, r_1 <= delta, an annulus is wider
// than the fundamental annulus, or the three images meet.
template <class C>
NestedCoveringSpec build_covering(const HopfSpec<C>& spec, const mpq_class& delta, const std::vector<mpq_class>& r1) {
    spec.validate();
    if (static_cast<int>(r1.size()) != spec.n()) throw std::invalid_argument("need one base radius per coordinate");
    std::vector<double> mod;
    std::vector<mpq_class> modq;
    bool exact = scalar_traits<C>::exact;
    for (const auto& a : spec.alpha) {
        mod.push_back(scalar_traits<C>::abs(a));
        if constexpr (scalar_traits<C>::exact) {
            auto r = detail::exact_sqrt(scalar_traits<C>::norm2_exact(a));
            if (r) modq.push_back(*r);
            else exact = false;
        }
    }
    return detail::build_covering_impl(mod, exact ? &modq : nullptr, delta, r1);
}

json covering_json(const NestedCoveringSpec& c);

struct CoverCheck {
    int points = 0;
    int uncovered = 0;
    int triple = 0;  // points whose orbit meets U_1^j, U_2^j and U_3^j for some j
};

// Samples moduli of points in C^n \ {0} (pieces are Reinhardt) and tests every rescaling alpha^k z.
CoverCheck monte_carlo_cover(const NestedCoveringSpec& c, int points, std::uint64_t seed);

struct TransitionEdge {
    int from = 0, to = 0;
    CD l;  // l_{from,to}
};

struct TransitionGraph {
    std::vector<std::string> nodes;
    std::vector<TransitionEdge> edges;
    void validate() const;  // l_{ba} = 1 / l_{ab}
};

// Nodes U_i^j; within each j, l_31 = beta and l_13 = 1/beta, all other transitions 1.
TransitionGraph covering_graph(int n, CD beta);

struct ChainResult {
    std::vector<std::optional<std::vector<int>>> chains;  // per start node, node sequence N_0..N_A
    bool all_found() const;
    bool none_found() const;
};

// BFS over |l| <= 1 + 1e-12 seeking an edge with |l| < 1 - 1e-12; shortest chain per start.
ChainResult transition_chain_search(const TransitionGraph& g);
json chain_json(const TransitionGraph& g, const ChainResult& r);

// Shilov boundary of a product of annuli and discs: per coordinate the circle radii.
struct ShilovPiece {
    std::vector<std::vector<double>> radii;
};

ShilovPiece covering_piece(const NestedCoveringSpec& c, int j, int i);

enum class FieldKind { Diagonal, Jordan };

struct ShilovResult {
    double C = 0;
    std::vector<double> argmax_radii;
};

// sup over the distinguished torus of ||g^{-1}||_inf, Z_i = sum_j g_ij d_j.
// Diagonal: g = diag(z). Jordan: g_ii = alpha z_i, g_{i,i+1} = z_{i+1}.
ShilovResult shilov_constant(const ShilovPiece& piece, FieldKind kind, CD alpha = CD(1, 0));

// Coefficient matrix g at a boundary point.
std::vector<std::vector<CD>> field_matrix(const std::vector<CD>& z, FieldKind kind, CD alpha);

// S_t g S_t^{-1}, S_t = diag(t^{n-1}, ..., 1); entry (i, k) picks up t^{k-i}. Upper triangular input.
template <class C>
std::vector<std::vector<C>> jordan_deform(const std::vector<std::vector<C>>& g, const C& t) {
    const size_t n = g.size();
    for (size_t i = 0; i < n; ++i) {
        if (g[i].size() != n) throw std::invalid_argument("square matrix required");
        for (size_t k = 0; k < i; ++k)
            if (!scalar_traits<C>::is_zero(g[i][k])) throw std::invalid_argument("Jordan form is upper triangular");
    }
    auto out = g;
    for (size_t i = 0; i < n; ++i)
        for (size_t k = i + 1; k < n; ++k) out[i][k] = g[i][k] * ipow(t, static_cast<int>(k - i));
    return out;
}

template <class C>
HopfSpec<C> hopf_spec_from_json(const json& j) {
    HopfSpec<C> s;
    for (const auto& a : j.at("alpha")) s.alpha.push_back(json_scalar<C>(a));
    if (j.contains("jordan_overdiag"))
        for (const auto& b : j.at("jordan_overdiag")) s.jordan_overdiag.push_back(b.get<bool>());
    if (j.contains("torsion")) {
        const auto& t = j.at("torsion");
        s.torsion = Torsion<C>{t.at("m").get<int>(), json_scalar<C>(t.at("a"))};
    }
    s.validate();
    return s;
}

template <class C>
FlatBundle<C> flat_bundle_from_json(const json& j) {
    FlatBundle<C> b{json_scalar<C>(j.at("beta")), std::nullopt};
    if (j.contains("d_char")) b.d_char = json_scalar<C>(j.at("d_char"));
    b.validate();
    return b;
}

template <class C>
json hopf_spec_json(const HopfSpec<C>& s) {
    json a = json::array();
    for (const auto& x : s.alpha) a.push_back(scalar_json(x));
    json j{{"alpha", a}};
    if (!s.jordan_overdiag.empty()) j["jordan_overdiag"] = s.jordan_overdiag;
    if (s.torsion) j["torsion"] = json{{"m", s.torsion->m}, {"a", scalar_json(s.torsion->a)}};
    return j;
}

}  // namespace germlin
