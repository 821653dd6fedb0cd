#pragma once

// Period and gluing data of a toroidal group, standard coordinates, domain
// membership, and the two geometric margins (kappa0, eta).

#include <optional>
#include <vector>

#include "germlin/json_util.hpp"
#include "germlin/scalar.hpp"

namespace germlin {

using RMat = std::vector<std::vector<double>>;
using CMat = std::vector<std::vector<CD>>;

struct ToroidalSpec {
    int n = 0, a = 0, b = 0, q = 0;
    RMat R1, R2;  // k x q, k = n-q-a-b
    CMat R3;      // k x k (complex: completes the real basis)
    CMat P0;      // q x q
    CMat P1;      // q x k

    int m() const { return n - a - b; }
    int k() const { return n - q - a - b; }
    void validate_shape() const;
};

ToroidalSpec toroidal_spec_from_json(const json& j);

struct LatticeBasis {
    CMat gamma;        // 2m columns, each of length m
    CMat gamma_std;    // same columns in standard coordinates
    CMat gamma_prime;  // q columns [R2 - R1 P0; P0]
};

struct DomainSpec {
    double epsilon = 0.1;
    double Rcap = 1.0;
    std::vector<std::pair<double, double>> r_table;  // (R, r(R)), r nonincreasing

    void validate() const;
    double r_of(double R) const;
};

struct IrrationalityResult {
    bool pass = true;
    int bound = 0;
    std::vector<int> witness;
};

IrrationalityResult validate_irrationality(const ToroidalSpec& spec, int height_bound);

// Columns of [[I, R1, R2, R3], [0, I, P0, P1]].
CMat toroidal_columns(const ToroidalSpec& spec);
LatticeBasis shear_to_standard(const ToroidalSpec& spec);
// Inverse shear applied to standard-coordinate columns.
CMat unshear(const ToroidalSpec& spec, const CMat& cols);

struct DeckLinearData {
    CMat lambda;  // q x m
    CMat mu;      // q x d
};

DeckLinearData deck_linear_parts(const LatticeBasis& basis, const CMat& mu);

// Real coordinates w of log(point)/(2 pi i) in the standard real basis; angular ones reduced mod 1.
std::vector<double> real_coordinates(const std::vector<CD>& point, const LatticeBasis& basis, int q);
bool domain_membership(const std::vector<CD>& point, const ToroidalSpec& spec, const LatticeBasis& basis,
                       const DomainSpec& dom);
std::vector<CD> point_from_coordinates(const std::vector<double>& w, const LatticeBasis& basis);

struct Kappa0Result {
    std::vector<double> Q, Q1, Q2;  // Q = Q1 (slab part) + Q2 (R part)
    double kappa0 = 0.0;
    long grid_points = 0;
};

// gamma_im: Im of the m real directions; the first q are slab directions.
Kappa0Result kappa0_estimate(const RMat& gamma_im, int q, double epsilon, double epsilon_prime,
                             const std::vector<int>& P, double Rcap, int grid_points = 1000);

// Q' grid over the closure of the (eps', R) parameter box, vertices included.
RMat kappa0_grid(const RMat& gamma_im, int q, double epsilon_prime, double Rcap, int grid_points);

// Largest eta in [0, eps] (bisection) with the +-t translates of the widened
// box [-eps-eta, 1+eps+eta]^q inside the hull of the box translated by 0, +-t, +-2t.
double eta_for_translates(int q, double epsilon, const RMat& translates, int depth = 30);
double convex_extension_eta(const ToroidalSpec& spec, const DomainSpec& dom, int depth = 30);

}  // namespace germlin
