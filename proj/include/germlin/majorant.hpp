#pragma once

// Majorant certificates: the eta_m recursion, the scalar functional systems for A(t), B(t),
// and the per-degree domination check of a linearization on the shrinking domain ladder.

#include <vector>

#include "germlin/grid.hpp"
#include "germlin/json_util.hpp"
#include "germlin/linearizer.hpp"

namespace germlin {

struct EtaResult {
    std::vector<double> log_eta;  // index m = 1..M (index 0 unused)
    double log_D = 0.0;           // max over m of log(eta_m) / m
    double D_growth() const { return std::exp(log_D); }
    double eta(int m) const { return std::exp(log_eta[static_cast<size_t>(m)]); }
};

// eta_1 = 1, eta_m = (C1 / eta^(tau+nu)) 2^(m(tau+nu)) max prod eta_{m_i}, over p >= 1 parts
// 1 <= m_i <= m-1 with sum <= m. Evaluated in the log domain.
EtaResult eta_sequence(double C1, double eta_margin, double tau, double nu, int M);

struct MajorantConstants {
    double R1 = 1.0;     // R'
    double C = 1.0, Cp = 1.0, Cpp = 1.0, nu = 1.0;
    int n_h = 1;         // n - a - b
    int d = 1;
    int q = 1;
    double Mden = 1.0;   // M in h(t)
    bool full_h_from_zero = false;  // opt-in: start h(t) at |P| >= 0
};

struct MajorantSeries {
    std::vector<double> A;               // index 0..M
    std::vector<std::vector<double>> B;  // 2q series in order +e_1, -e_1, +e_2, ...
};

// Number of multi-indices in N^n with |Q| = k.
double multi_index_count(int n, int k);

// Vertical: A = G(t,A) + (C/C''^nu)(A + sum B)((1 - C' G(t,A)/C'')^{-(n-a-b)} - 1), same for each B
// with G(t, B); G(t,U) = sum_{|Q|>=2} R'^|Q| (t+U)^|Q|. Full: A = g h. Solved degree by degree.
MajorantSeries majorant_functional_solve(LinMode mode, const MajorantConstants& k, int M);

struct MajorantCert {
    LinMode mode = LinMode::Vertical;
    EtaResult eta;
    MajorantSeries series;
    double C1 = 0, eta_margin = 0, tau = 0;
    MajorantConstants constants;
};

json majorant_json(const MajorantCert& cert);

// Domain ladder: r_m = r_1 e^{-sum_{k<m} 2^{-k}}, eps_m = eps_1 (1 - sum_{k<m} eta/(2^k kappa)).
struct Ladder {
    GridSpec base;  // m = 1
    double kappa = 1.0, eta_margin = 0.25;

    double rho(int m) const;
    double eps_ratio(int m) const;  // eps_m / eps_1
    GridSpec grid(int m) const;
};

// Grid image under tau_hat_i^s (radii scaled by |lam|^s, |mu|^s).
template <class C>
GridSpec deck_image(const GridSpec& g, const Decks<C>& dk, int i, int s) {
    GridSpec out = g;
    for (size_t k = 0; k < out.h_radii.size(); ++k)
        for (auto& r : out.h_radii[k]) r *= std::pow(scalar_traits<C>::abs(dk.lam[static_cast<size_t>(i)][k]), s);
    for (size_t j = 0; j < out.v_radius.size(); ++j)
        out.v_radius[j] *= std::pow(scalar_traits<C>::abs(dk.mu[static_cast<size_t>(i)][j]), s);
    return out;
}

struct DominationRow {
    int m = 0;
    double sup = 0, bound = 0;
    double sup_B = 0, bound_B = 0;  // worst B ratio side (vertical mode)
    bool pass = true;
};

struct DominationReport {
    bool pass = true;
    int first_fail = -1;
    std::vector<DominationRow> rows;
};

// For m = 2..min(M, N_v): sup |[phi]_m| on the m-th ladder grid (and its deck images in vertical mode)
// against A_m eta_m and B_m eta_m.
template <class C>
DominationReport certify_domination(const VSeries<C>& phi, int N_v, const MajorantCert& cert, const Ladder& ladder,
                                    const Decks<C>& decks) {
    DominationReport rep;
    const int M = static_cast<int>(cert.series.A.size()) - 1;
    const int top = std::min(M, N_v);
    for (int m = 2; m <= top; ++m) {
        DominationRow row;
        row.m = m;
        const VSeries<C> part = homogeneous_part(phi, m);
        const GridSpec g = ladder.grid(m);
        const double eta_m = cert.eta.eta(m);
        row.bound = cert.series.A[static_cast<size_t>(m)] * eta_m;
        if (cert.mode == LinMode::Full) {
            row.sup = grid_sup_norm(part, g);
        } else {
            row.sup = grid_sup_norm(part, g);
            for (int i = 0; i < decks.q(); ++i)
                for (int s : {1, -1}) row.sup = std::max(row.sup, grid_sup_norm(part, deck_image(g, decks, i, s)));
            double worst = -1;
            for (int i = 0; i < decks.q(); ++i)
                for (int side = 0; side < 2; ++side) {
                    const int s = side == 0 ? 1 : -1;
                    double sb = std::max(grid_sup_norm(part, deck_image(g, decks, i, s)),
                                         grid_sup_norm(part, deck_image(g, decks, i, 2 * s)));
                    double bb = cert.series.B[static_cast<size_t>(2 * i + side)][static_cast<size_t>(m)] * eta_m;
                    double ratio = sb == 0 ? 0 : (bb > 0 ? sb / bb : INFINITY);
                    if (ratio > worst) {
                        worst = ratio;
                        row.sup_B = sb;
                        row.bound_B = bb;
                    }
                }
        }
        row.pass = row.sup <= row.bound && row.sup_B <= row.bound_B;
        if (!row.pass && rep.pass) {
            rep.pass = false;
            rep.first_fail = m;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

json domination_json(const DominationReport& rep);

// Constants from the data: R' from sup norms of the homogeneous parts of tau* on the first ladder
// grid (vertical mode: also on its deck images under tau_hat_i^{+-1}, tau_hat_i^{+-2}, where the B bounds
// are evaluated), ||[tau*]_k|| <= count(d, k) R'^k; C1 from bound_verify on the degree-2 solve between the
// first two ladder grids. C, C', C'', M are left at the supplied values.
template <class C>
MajorantCert fit_certificate(const DeckPerturbation<C>& p, LinMode mode, double tau, const Ladder& ladder, int M,
                             double nu, MajorantConstants base = {}) {
    const GridSpec g1 = ladder.grid(1), g2 = ladder.grid(2);
    std::vector<GridSpec> fit_grids{g1};
    if (mode == LinMode::Vertical)
        for (int i = 0; i < p.q(); ++i)
            for (int s : {1, -1, 2, -2}) fit_grids.push_back(deck_image(g1, p.decks, i, s));
    double R1 = 0;
    std::vector<VSeries<C>> F;
    for (const auto& t : p.tau_star) {
        for (int k = 2; k <= p.trunc.N_v; ++k) {
            const VSeries<C> part = homogeneous_part(t, k);
            for (const auto& g : fit_grids) {
                const double nk = grid_sup_norm(part, g);
                if (nk > 0) R1 = std::max(R1, std::pow(nk / multi_index_count(p.d, k), 1.0 / k));
            }
        }
        F.push_back(homogeneous_part(mode == LinMode::Vertical ? v_block(t, p.n_h) : t, 2));
    }
    const Block block = mode == LinMode::Vertical ? Block::Vertical : Block::Total;
    const VSeries<C> G = solve_family(CochainSystem<C>{F, block, false, p.decks});
    const BoundReport br = bound_verify(G, F, tau, nu, g1, g2, ladder.eta_margin / 2, ladder.rho(2));
    MajorantCert cert;
    cert.mode = mode;
    cert.C1 = br.C1 > 0 ? br.C1 : 1.0;
    cert.eta_margin = ladder.eta_margin;
    cert.tau = tau;
    cert.constants = base;
    cert.constants.R1 = R1 > 0 ? R1 : 1e-6;
    cert.constants.nu = nu;
    cert.constants.n_h = p.n_h;
    cert.constants.d = p.d;
    cert.constants.q = p.q();
    cert.eta = eta_sequence(cert.C1, cert.eta_margin, tau, nu, M);
    cert.series = majorant_functional_solve(mode, cert.constants, M);
    return cert;
}

}  // namespace germlin
