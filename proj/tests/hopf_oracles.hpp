#pragma once

// Brute-force references for the Hopf toolkit: full exponent-box enumeration, transitive
// closure for chains, dense inversion for Shilov constants.

#include <Eigen/Dense>

#include <numbers>
#include <optional>
#include <random>

#include "germlin/hopf.hpp"

namespace germlin::testing {

// Smallest |v|_1 then lexicographic v in [-B, B]^n with |v|_1 <= B and alpha^v == target.
template <class C>
std::optional<std::vector<int>> brute_member(const C& target, const std::vector<C>& alpha, int B) {
    const size_t n = alpha.size();
    std::optional<std::vector<int>> best;
    int best_norm = 0;
    std::vector<int> v(n, -B);
    for (;;) {
        int norm = 0;
        for (int x : v) norm += std::abs(x);
        if (norm <= B && (!best || norm < best_norm)) {
            C p = scalar_traits<C>::one();
            for (size_t l = 0; l < n; ++l) p *= ipow(alpha[l], v[l]);
            if (hopf_equal(p, target)) {
                best = v;
                best_norm = norm;
            }
        }
        size_t k = n;
        while (k > 0) {
            --k;
            if (v[k] < B) {
                ++v[k];
                break;
            }
            v[k] = -B;
            if (k == 0) return best;
        }
    }
}

// Some v != 0 with |v+|_1 <= B, |v-|_1 <= B and alpha^{v+} == alpha^{v-}?
template <class C>
bool brute_relation(const std::vector<C>& alpha, int B) {
    const size_t n = alpha.size();
    std::vector<int> v(n, -B);
    for (;;) {
        int pos = 0, neg = 0;
        for (int x : v) (x > 0 ? pos : neg) += std::abs(x);
        if (pos + neg > 0 && pos <= B && neg <= B) {
            C l = scalar_traits<C>::one(), r = scalar_traits<C>::one();
            for (size_t i = 0; i < n; ++i) {
                if (v[i] > 0) l *= ipow(alpha[i], v[i]);
                if (v[i] < 0) r *= ipow(alpha[i], -v[i]);
            }
            if (hopf_equal(l, r)) return true;
        }
        size_t k = n;
        while (k > 0) {
            --k;
            if (v[k] < B) {
                ++v[k];
                break;
            }
            v[k] = -B;
            if (k == 0) return false;
        }
    }
}

// Random eigenvalues with moduli in (0.1, 0.95), sorted by modulus.
inline std::vector<CD> random_alpha(std::mt19937_64& rng, int n) {
    std::uniform_real_distribution<double> mod(0.1, 0.95), ph(0.0, 2 * std::numbers::pi);
    std::vector<CD> a;
    for (int i = 0; i < n; ++i) a.push_back(std::polar(mod(rng), ph(rng)));
    std::sort(a.begin(), a.end(), [](CD x, CD y) { return std::abs(x) < std::abs(y); });
    return a;
}

inline std::vector<int> random_exponent(std::mt19937_64& rng, int n, int norm) {
    std::vector<int> v(static_cast<size_t>(n), 0);
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::bernoulli_distribution sign(0.5);
    for (int s = 0; s < norm; ++s) {
        auto& x = v[static_cast<size_t>(pick(rng))];
        if (x == 0) x = sign(rng) ? 1 : -1;
        else x += x > 0 ? 1 : -1;
    }
    return v;
}

template <class C>
C power_product(const std::vector<C>& alpha, const std::vector<int>& v) {
    C p = scalar_traits<C>::one();
    for (size_t l = 0; l < alpha.size(); ++l) p *= ipow(alpha[l], v[l]);
    return p;
}

// Does a chain exist from every start? Floyd-Warshall reachability over |l| <= 1 edges.
inline std::vector<bool> closure_chain_exists(const TransitionGraph& g) {
    const size_t N = g.nodes.size();
    std::vector<std::vector<bool>> reach(N, std::vector<bool>(N, false));
    std::vector<bool> strict(N, false);
    for (size_t i = 0; i < N; ++i) reach[i][i] = true;
    for (const auto& e : g.edges) {
        if (std::abs(e.l) <= 1 + kHopfTol) reach[static_cast<size_t>(e.from)][static_cast<size_t>(e.to)] = true;
        if (std::abs(e.l) < 1 - kHopfTol) strict[static_cast<size_t>(e.from)] = true;
    }
    for (size_t k = 0; k < N; ++k)
        for (size_t i = 0; i < N; ++i)
            for (size_t j = 0; j < N; ++j)
                if (reach[i][k] && reach[k][j]) reach[i][j] = true;
    std::vector<bool> out(N, false);
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j)
            if (reach[i][j] && strict[j]) out[i] = true;
    return out;
}

// max over sampled torus points of ||g^{-1}||_inf by dense LU inversion.
inline double dense_shilov(const ShilovPiece& piece, FieldKind kind, CD alpha, int samples, std::mt19937_64& rng) {
    const size_t n = piece.radii.size();
    std::uniform_real_distribution<double> ph(0.0, 2 * std::numbers::pi);
    double best = 0;
    for (int s = 0; s < samples; ++s) {
        std::vector<CD> z(n);
        // bit k of s picks the circle of an annulus factor
        for (size_t k = 0; k < n; ++k) {
            const auto& rs = piece.radii[k];
            z[k] = std::polar(((s >> k) & 1) ? rs.back() : rs.front(), ph(rng));
        }
        const auto g = field_matrix(z, kind, alpha);
        Eigen::MatrixXcd M(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = g[i][k];
        const Eigen::MatrixXcd inv = M.inverse();
        best = std::max(best, inv.cwiseAbs().rowwise().sum().maxCoeff());
    }
    return best;
}

}  // namespace germlin::testing
