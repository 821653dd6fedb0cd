#include "germlin/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

namespace germlin {

const char* hopf_type_name(HopfType t) {
    switch (t) {
        case HopfType::Diagonal: return "diagonal";
        case HopfType::Classical: return "classical";
        case HopfType::Generic: return "generic";
        case HopfType::Undetermined: return "undetermined";
    }
    return "?";
}

const char* vanishing_variant_name(VanishingVariant v) {
    switch (v) {
        case VanishingVariant::MallGeneric: return "mall_generic";
        case VanishingVariant::Classical: return "classical";
        case VanishingVariant::Zhou1: return "zhou1";
        case VanishingVariant::Zhou2: return "zhou2";
    }
    return "?";
}

VanishingVariant parse_vanishing_variant(const std::string& s) {
    if (s == "mall_generic") return VanishingVariant::MallGeneric;
    if (s == "classical") return VanishingVariant::Classical;
    if (s == "zhou1") return VanishingVariant::Zhou1;
    if (s == "zhou2") return VanishingVariant::Zhou2;
    throw std::invalid_argument("unknown vanishing variant: " + s);
}

json relation_json(const std::vector<int>& v) {
    if (v.empty()) return nullptr;
    json A = json::array(), lhs = json::array(), rhs = json::array();
    for (size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 0) {
            A.push_back(i + 1);
            lhs.push_back(v[i]);
        } else {
            rhs.push_back(-v[i]);
        }
    }
    return json{{"v", v}, {"A", A}, {"lhs", lhs}, {"rhs", rhs}};
}

json classification_json(const Classification& c) {
    return json{{"type", hopf_type_name(c.type)},
                {"linear", c.linear},
                {"moduli_strict", c.moduli_strict},
                {"relation", relation_json(c.relation)},
                {"bound", c.bound},
                {"reason", c.reason}};
}

json vanishing_json(const VanishingResult& r) {
    return json{{"variant", vanishing_variant_name(r.variant)},
                {"criterion_holds", r.criterion_holds},
                {"H0_vanishes", r.criterion_holds},
                {"H1_vanishes", r.criterion_holds},
                {"reason", r.reason},
                {"witness", r.witness},
                {"bound", r.bound}};
}

json checklist_json(const Checklist& c) {
    json items = json::array();
    for (const auto& it : c.items) {
        json j{{"condition", it.condition}, {"verdict", it.pass ? "pass" : "fail"}};
        if (it.pass) j["bound"] = c.bound;
        else j["witness"] = it.witness;
        items.push_back(j);
    }
    return json{{"pass", c.pass}, {"N_v", c.N_v}, {"bound", c.bound}, {"items", items}};
}

namespace detail {

std::optional<mpq_class> exact_sqrt(const mpq_class& x) {
    if (x < 0) return std::nullopt;
    const mpz_class& p = x.get_num();
    const mpz_class& q = x.get_den();
    if (!mpz_perfect_square_p(p.get_mpz_t()) || !mpz_perfect_square_p(q.get_mpz_t())) return std::nullopt;
    mpz_class a, b;
    mpz_sqrt(a.get_mpz_t(), p.get_mpz_t());
    mpz_sqrt(b.get_mpz_t(), q.get_mpz_t());
    return mpq_class(a, b);
}

namespace {

using Interval = std::pair<double, double>;  // open

std::optional<Interval> meet(const Interval& a, const Interval& b) {
    const double lo = std::max(a.first, b.first), hi = std::min(a.second, b.second);
    if (lo < hi) return Interval{lo, hi};
    return std::nullopt;
}

Interval shift(const Interval& a, double s) { return {a.first + s, a.second + s}; }

// Do three open arcs on a circle of circumference L share a point?
bool arcs_meet(const std::array<Interval, 3>& arc, double L) {
    for (int k2 = -2; k2 <= 2; ++k2) {
        auto m12 = meet(arc[0], shift(arc[1], k2 * L));
        if (!m12) continue;
        for (int k3 = -2; k3 <= 2; ++k3)
            if (meet(*m12, shift(arc[2], k3 * L))) return true;
    }
    return false;
}

// Do the open arcs cover the circle?
bool arcs_cover_circle(const std::array<Interval, 3>& arc, double L) {
    std::vector<Interval> pool;
    for (const auto& a : arc)
        for (int k = -2; k <= 2; ++k) pool.push_back(shift(a, k * L));
    const double start = arc[0].first;
    double reach = start;
    for (;;) {
        double best = reach;
        for (const auto& p : pool)
            if (p.first < reach && p.second > best) best = p.second;
        if (best <= reach) return false;
        reach = best;
        if (reach > start + L) return true;
    }
}

}  // namespace

NestedCoveringSpec build_covering_impl(const std::vector<double>& modulus, const std::vector<mpq_class>* modulus_q,
                                       const mpq_class& delta, const std::vector<mpq_class>& r1) {
    if (delta <= 0) throw std::invalid_argument("delta must be > 0");
    NestedCoveringSpec c;
    c.n = static_cast<int>(modulus.size());
    c.delta = delta.get_d();
    c.modulus = modulus;
    c.exact = modulus_q != nullptr;
    if (c.exact) c.modulus_q = *modulus_q;
    const double d = c.delta;
    c.arcs_cover = true;
    for (int j = 0; j < c.n; ++j) {
        const mpq_class& base = r1[static_cast<size_t>(j)];
        if (base <= delta) throw std::invalid_argument("radii must exceed delta");
        const double mod = modulus[static_cast<size_t>(j)];
        const double ex = 1.0 / mod;
        std::array<double, 4> r{};
        r[0] = base.get_d();
        if (c.exact) {
            mpq_class r4 = base / (*modulus_q)[static_cast<size_t>(j)];
            c.r1_q.push_back(base);
            c.r4_q.push_back(r4);
            r[3] = r4.get_d();
        } else {
            r[3] = r[0] * ex;
        }
        r[1] = r[0] * std::cbrt(ex);
        r[2] = r[0] * std::cbrt(ex * ex);
        c.radii.push_back(r);
        c.expansion.push_back(ex);
        for (int i = 0; i < 3; ++i)
            if (!((r[static_cast<size_t>(i)] + d) * mod < r[static_cast<size_t>(i)] - d))
                throw std::invalid_argument("|alpha_" + std::to_string(j + 1) + "| too close to 1 for delta");
        const double L = std::log(ex);
        std::array<Interval, 3> arc;
        for (int i = 0; i < 3; ++i)
            arc[static_cast<size_t>(i)] = {std::log(r[static_cast<size_t>(i)] - d), std::log(r[static_cast<size_t>(i)] + d)};
        if (arcs_meet(arc, L)) throw std::invalid_argument("delta too large: U_1, U_2, U_3 images meet for j = " + std::to_string(j + 1));
        c.arcs_cover = c.arcs_cover && arcs_cover_circle(arc, L);
    }
    c.common_outer = true;
    for (int j = 1; j < c.n; ++j) {
        if (c.exact) c.common_outer = c.common_outer && c.r4_q[static_cast<size_t>(j)] == c.r4_q[0];
        else c.common_outer = c.common_outer && std::abs(c.radii[static_cast<size_t>(j)][3] - c.radii[0][3]) <= kHopfTol * c.radii[0][3];
    }
    return c;
}

}  // namespace detail

json covering_json(const NestedCoveringSpec& c) {
    json pieces = json::array();
    for (int j = 0; j < c.n; ++j) {
        const auto& r = c.radii[static_cast<size_t>(j)];
        json e{{"j", j + 1},
               {"r", json::array({format_double(r[0]), format_double(r[1]), format_double(r[2]), format_double(r[3])})},
               {"modulus", format_double(c.modulus[static_cast<size_t>(j)])},
               {"expansion", format_double(c.expansion[static_cast<size_t>(j)])}};
        if (c.exact) {
            e["r1_exact"] = format_rational(c.r1_q[static_cast<size_t>(j)]);
            e["r4_exact"] = format_rational(c.r4_q[static_cast<size_t>(j)]);
            e["r4_times_modulus_equals_r1"] = c.r4_q[static_cast<size_t>(j)] * c.modulus_q[static_cast<size_t>(j)] == c.r1_q[static_cast<size_t>(j)];
        }
        pieces.push_back(e);
    }
    return json{{"delta", format_double(c.delta)},
                {"exact", c.exact},
                {"arcs_cover", c.arcs_cover},
                {"common_outer", c.common_outer},
                {"covering_certified", c.covering_certified()},
                {"pieces", pieces}};
}

CoverCheck monte_carlo_cover(const NestedCoveringSpec& c, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> logr(-8.0, 8.0);
    std::bernoulli_distribution zero(0.1);
    const double d = c.delta;
    CoverCheck out;
    out.points = points;
    const int n = c.n;
    std::vector<double> lz(static_cast<size_t>(n)), lm(static_cast<size_t>(n));
    for (int l = 0; l < n; ++l) lm[static_cast<size_t>(l)] = std::log(c.modulus[static_cast<size_t>(l)]);
    for (int p = 0; p < points; ++p) {
        bool any = false;
        for (int l = 0; l < n; ++l) {
            const bool z = zero(rng);
            const double v = logr(rng);
            lz[static_cast<size_t>(l)] = z ? -INFINITY : v;
            any = any || !z;
        }
        if (!any) lz[0] = logr(rng);
        bool covered = false, triple = false;
        for (int j = 0; j < n; ++j) {
            if (lz[static_cast<size_t>(j)] == -INFINITY) continue;
            const auto& r = c.radii[static_cast<size_t>(j)];
            const double L = -lm[static_cast<size_t>(j)];
            const double outer = std::log(r[3] + d / 2);
            const int klo = static_cast<int>(std::floor((lz[static_cast<size_t>(j)] - std::log(r[2] + d)) / L)) - 1;
            const int khi = static_cast<int>(std::ceil((lz[static_cast<size_t>(j)] - std::log(r[0] - d)) / L)) + 1;
            std::array<bool, 3> hit{};
            for (int k = klo; k <= khi; ++k) {
                bool others = true;
                for (int l = 0; l < n && others; ++l)
                    if (l != j) others = lz[static_cast<size_t>(l)] + k * lm[static_cast<size_t>(l)] < outer;
                if (!others) continue;
                const double w = lz[static_cast<size_t>(j)] + k * lm[static_cast<size_t>(j)];
                for (int i = 0; i < 3; ++i)
                    if (std::log(r[static_cast<size_t>(i)] - d) < w && w < std::log(r[static_cast<size_t>(i)] + d)) hit[static_cast<size_t>(i)] = true;
            }
            covered = covered || hit[0] || hit[1] || hit[2];
            triple = triple || (hit[0] && hit[1] && hit[2]);
        }
        if (!covered) ++out.uncovered;
        if (triple) ++out.triple;
    }
    return out;
}

void TransitionGraph::validate() const {
    for (const auto& e : edges) {
        if (e.from < 0 || e.to < 0 || e.from >= static_cast<int>(nodes.size()) || e.to >= static_cast<int>(nodes.size()))
            throw std::invalid_argument("edge endpoint out of range");
        bool found = false;
        for (const auto& f : edges)
            if (f.from == e.to && f.to == e.from && std::abs(e.l * f.l - CD(1, 0)) <= kHopfTol) found = true;
        if (!found) throw std::invalid_argument("every edge needs a reverse edge with l_ji = 1/l_ij");
    }
}

TransitionGraph covering_graph(int n, CD beta) {
    if (beta == CD(0, 0)) throw std::invalid_argument("beta must be nonzero");
    TransitionGraph g;
    for (int j = 1; j <= n; ++j)
        for (int i = 1; i <= 3; ++i) g.nodes.push_back("U_" + std::to_string(i) + "^" + std::to_string(j));
    const int N = 3 * n;
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) {
            if (a == b) continue;
            CD l(1, 0);
            if (a / 3 == b / 3) {
                if (a % 3 == 2 && b % 3 == 0) l = beta;
                if (a % 3 == 0 && b % 3 == 2) l = CD(1, 0) / beta;
            }
            g.edges.push_back({a, b, l});
        }
    return g;
}

bool ChainResult::all_found() const {
    for (const auto& c : chains)
        if (!c) return false;
    return true;
}

bool ChainResult::none_found() const {
    for (const auto& c : chains)
        if (c) return false;
    return true;
}

ChainResult transition_chain_search(const TransitionGraph& g) {
    const int N = static_cast<int>(g.nodes.size());
    std::vector<std::vector<TransitionEdge>> adj(static_cast<size_t>(N));
    for (const auto& e : g.edges) adj[static_cast<size_t>(e.from)].push_back(e);
    for (auto& a : adj) std::stable_sort(a.begin(), a.end(), [](const auto& x, const auto& y) { return x.to < y.to; });
    ChainResult res;
    for (int s = 0; s < N; ++s) {
        std::vector<int> parent(static_cast<size_t>(N), -2);
        std::deque<int> queue{s};
        parent[static_cast<size_t>(s)] = -1;
        std::optional<std::vector<int>> chain;
        while (!queue.empty() && !chain) {
            const int u = queue.front();
            queue.pop_front();
            for (const auto& e : adj[static_cast<size_t>(u)])
                if (std::abs(e.l) < 1 - kHopfTol) {
                    std::vector<int> path{e.to};
                    for (int x = u; x != -1; x = parent[static_cast<size_t>(x)]) path.push_back(x);
                    std::reverse(path.begin(), path.end());
                    chain = path;
                    break;
                }
            if (chain) break;
            for (const auto& e : adj[static_cast<size_t>(u)])
                if (std::abs(e.l) <= 1 + kHopfTol && parent[static_cast<size_t>(e.to)] == -2) {
                    parent[static_cast<size_t>(e.to)] = u;
                    queue.push_back(e.to);
                }
        }
        res.chains.push_back(chain);
    }
    return res;
}

json chain_json(const TransitionGraph& g, const ChainResult& r) {
    json out = json::array();
    for (size_t s = 0; s < r.chains.size(); ++s) {
        json c = nullptr;
        if (r.chains[s]) {
            c = json::array();
            for (int x : *r.chains[s]) c.push_back(g.nodes[static_cast<size_t>(x)]);
        }
        out.push_back(json{{"start", g.nodes[s]}, {"chain", c}});
    }
    return json{{"all_found", r.all_found()}, {"none_found", r.none_found()}, {"chains", out}};
}

ShilovPiece covering_piece(const NestedCoveringSpec& c, int j, int i) {
    if (j < 1 || j > c.n || i < 1 || i > 3) throw std::out_of_range("covering piece index");
    ShilovPiece p;
    const auto& r = c.radii[static_cast<size_t>(j - 1)];
    for (int k = 1; k <= c.n; ++k) {
        if (k == j) p.radii.push_back({r[static_cast<size_t>(i - 1)] - c.delta, r[static_cast<size_t>(i - 1)] + c.delta});
        else p.radii.push_back({r[3] + c.delta / 2});
    }
    return p;
}

std::vector<std::vector<CD>> field_matrix(const std::vector<CD>& z, FieldKind kind, CD alpha) {
    const size_t n = z.size();
    std::vector<std::vector<CD>> g(n, std::vector<CD>(n, CD(0, 0)));
    for (size_t i = 0; i < n; ++i) {
        if (kind == FieldKind::Diagonal) {
            g[i][i] = z[i];
        } else {
            g[i][i] = alpha * z[i];
            if (i + 1 < n) g[i][i + 1] = z[i + 1];
        }
    }
    return g;
}

namespace {

// ||g^{-1}||_inf from the moduli |z_k|; for the bidiagonal case
// |(g^{-1})_{ik}| = prod_{l=i}^{k-1} |z_{l+1}| / prod_{l=i}^{k} |alpha z_l|.
double inverse_inf_norm(const std::vector<double>& r, FieldKind kind, double a) {
    const size_t n = r.size();
    double best = 0;
    for (size_t i = 0; i < n; ++i) {
        double row = 0;
        if (kind == FieldKind::Diagonal) {
            row = 1.0 / r[i];
        } else {
            double term = 1.0 / (a * r[i]);
            row = term;
            for (size_t k = i + 1; k < n; ++k) {
                term *= r[k] / (a * r[k]);
                row += term;
            }
        }
        best = std::max(best, row);
    }
    return best;
}

}  // namespace

ShilovResult shilov_constant(const ShilovPiece& piece, FieldKind kind, CD alpha) {
    if (piece.radii.empty()) throw std::invalid_argument("Shilov piece needs at least one coordinate");
    for (const auto& rs : piece.radii) {
        if (rs.empty()) throw std::invalid_argument("every coordinate needs a Shilov radius");
        for (double r : rs)
            if (!(r > 0)) throw std::invalid_argument("Shilov radii must be positive");
    }
    const double a = std::abs(alpha);
    if (kind == FieldKind::Jordan && !(a > 0)) throw std::invalid_argument("Jordan fields need alpha != 0");
    ShilovResult res;
    std::vector<double> cur(piece.radii.size());
    auto rec = [&](auto&& self, size_t k) -> void {
        if (k == piece.radii.size()) {
            const double c = inverse_inf_norm(cur, kind, a);
            if (c > res.C) {
                res.C = c;
                res.argmax_radii = cur;
            }
            return;
        }
        for (double r : piece.radii[k]) {
            cur[k] = r;
            self(self, k + 1);
        }
    };
    rec(rec, 0);
    return res;
}

}  // namespace germlin
