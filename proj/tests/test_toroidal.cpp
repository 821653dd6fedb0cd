#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>
#include <random>

#include "germlin/simplex.hpp"
#include "germlin/toroidal.hpp"

using namespace germlin;

namespace {

const CD I(0, 1);

// n = 2, q = 1 example with gluing (a, b) and P0 = i, completed by R3 = i, P1 = 0.
ToroidalSpec basic_example(double a, double b) {
    ToroidalSpec s;
    s.n = 2;
    s.q = 1;
    s.R1 = {{a}};
    s.R2 = {{b}};
    s.R3 = {{I}};
    s.P0 = {{I}};
    s.P1 = {{0.0}};
    return s;
}

bool close(const CD& x, const CD& y, double tol = 1e-12) { return std::abs(x - y) <= tol; }

ToroidalSpec random_spec(std::mt19937_64& rng, int n, int q) {
    std::uniform_real_distribution<double> u(-1, 1);
    ToroidalSpec s;
    s.n = n;
    s.q = q;
    const int k = n - q;
    s.R1.assign(k, std::vector<double>(q));
    s.R2.assign(k, std::vector<double>(q));
    s.R3.assign(k, std::vector<CD>(k));
    s.P0.assign(q, std::vector<CD>(q));
    s.P1.assign(q, std::vector<CD>(k));
    for (auto& r : s.R1)
        for (auto& x : r) x = u(rng);
    for (auto& r : s.R2)
        for (auto& x : r) x = u(rng);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) s.R3[i][j] = CD(u(rng), (i == j ? 2.0 : 0.0) + 0.3 * u(rng));
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) s.P0[i][j] = CD(u(rng), (i == j ? 2.0 : 0.0) + 0.3 * u(rng));
    for (auto& r : s.P1)
        for (auto& x : r) x = CD(0.2 * u(rng), 0.2 * u(rng));
    return s;
}

}  // namespace

TEST_CASE("irrationality scan") {
    auto s = basic_example(std::sqrt(2.0), std::sqrt(3.0));
    auto r = validate_irrationality(s, 50);
    CHECK(r.pass);
    CHECK(r.bound == 50);

    s = basic_example(0.5, 1.0 / 3.0);
    r = validate_irrationality(s, 6);
    CHECK_FALSE(r.pass);
    CHECK(r.witness == std::vector<int>{6});
    CHECK(validate_irrationality(s, 5).pass);

    ToroidalSpec z;
    z.n = 3;
    z.q = 1;
    z.R1 = {{0.0}, {0.0}};
    z.R2 = {{0.0}, {0.0}};
    z.R3 = {{I, 0.0}, {0.0, I}};
    z.P0 = {{I}};
    z.P1 = {{0.0, 0.0}};
    r = validate_irrationality(z, 3);
    CHECK_FALSE(r.pass);
    CHECK(r.witness == std::vector<int>{1, 0});
}

TEST_CASE("irrationality pass agrees with brute force over the box") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> den(2, 9), num(1, 8);
    for (int trial = 0; trial < 20; ++trial) {
        ToroidalSpec s = basic_example(1.0 * num(rng) / den(rng), 1.0 * num(rng) / den(rng));
        const int B = 5;
        auto r = validate_irrationality(s, B);
        bool any = false;
        for (int sig = -B; sig <= B; ++sig) {
            if (sig == 0) continue;
            double x = sig * s.R1[0][0], y = sig * s.R2[0][0];
            if (std::abs(x - std::round(x)) <= 1e-9 && std::abs(y - std::round(y)) <= 1e-9) any = true;
        }
        CHECK(r.pass == !any);
    }
}

TEST_CASE("shear to standard coordinates") {
    const double a = 0.37, b = 0.81;
    auto lb = shear_to_standard(basic_example(a, b));
    REQUIRE(lb.gamma_std.size() == 4);
    CHECK(close(lb.gamma_std[0][0], 1.0));
    CHECK(close(lb.gamma_std[0][1], 0.0));
    CHECK(close(lb.gamma_std[1][0], 0.0));
    CHECK(close(lb.gamma_std[1][1], 1.0));
    CHECK(close(lb.gamma_std[2][0], CD(b, -a)));
    CHECK(close(lb.gamma_std[2][1], I));
    REQUIRE(lb.gamma_prime.size() == 1);
    CHECK(close(lb.gamma_prime[0][0], CD(b, -a)));

    auto zero = basic_example(0.0, b);
    auto lz = shear_to_standard(zero);
    for (size_t c = 0; c < lz.gamma.size(); ++c)
        for (size_t r = 0; r < 2; ++r) CHECK(lz.gamma[c][r] == lz.gamma_std[c][r]);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        auto s = random_spec(rng, 4, 2);
        auto basis = shear_to_standard(s);
        auto back = unshear(s, basis.gamma_std);
        for (size_t c = 0; c < back.size(); ++c)
            for (size_t r = 0; r < back[c].size(); ++r) CHECK(close(back[c][r], basis.gamma[c][r]));
    }

    auto bad = basic_example(a, b);
    bad.R3 = {{0.0}};
    CHECK_THROWS_AS(shear_to_standard(bad), std::invalid_argument);
}

TEST_CASE("deck linear parts") {
    const double a = 0.2, b = 0.3;
    auto lb = shear_to_standard(basic_example(a, b));
    auto d = deck_linear_parts(lb, {{0.5}});
    CHECK(std::abs(d.lambda[0][0]) == doctest::Approx(std::exp(2 * std::numbers::pi * a)).epsilon(1e-12));
    CHECK(std::abs(d.lambda[0][1]) == doctest::Approx(std::exp(-2 * std::numbers::pi)).epsilon(1e-12));
    CHECK(close(d.lambda[0][0], std::exp(2 * std::numbers::pi * I * CD(b, -a)), 1e-9));

    LatticeBasis zb;
    zb.gamma_prime = {{0.0, 0.0}};
    auto dz = deck_linear_parts(zb, {{0.5}});
    CHECK(dz.lambda[0][0] == CD(1, 0));
    LatticeBasis rb;
    rb.gamma_prime = {{0.3}};
    auto dr = deck_linear_parts(rb, {{0.5}});
    CHECK(std::abs(dr.lambda[0][0]) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::arg(dr.lambda[0][0]) == doctest::Approx(2 * std::numbers::pi * 0.3).epsilon(1e-12));
}

TEST_CASE("domain membership") {
    auto s = basic_example(0.37, 0.81);
    auto lb = shear_to_standard(s);
    DomainSpec dom;
    dom.epsilon = 0.2;
    dom.Rcap = 1.5;
    CHECK(domain_membership({1.0, 1.0}, s, lb, dom));
    CHECK_FALSE(domain_membership(point_from_coordinates({0.1, 0.2, 1 + 2 * dom.epsilon, 0.0}, lb), s, lb, dom));

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> ang(0, 1), slab(-dom.epsilon + 1e-6, 1 + dom.epsilon - 1e-6),
        rr(-dom.Rcap + 1e-6, dom.Rcap - 1e-6), out_slab(1 + dom.epsilon + 1e-3, 3), out_r(dom.Rcap + 1e-3, 4);
    for (int t = 0; t < 100; ++t) {
        auto p = point_from_coordinates({ang(rng), ang(rng), slab(rng), rr(rng)}, lb);
        CHECK(domain_membership(p, s, lb, dom));
        // Reinhardt: rotating a coordinate keeps membership
        auto rot = p;
        rot[0] *= std::polar(1.0, 2 * std::numbers::pi * ang(rng));
        rot[1] *= std::polar(1.0, 2 * std::numbers::pi * ang(rng));
        CHECK(domain_membership(rot, s, lb, dom));
        bool which = t % 2 == 0;
        double sl = which ? (t % 4 == 0 ? out_slab(rng) : -out_slab(rng) + 1) : slab(rng);
        double r = which ? rr(rng) : (t % 4 == 1 ? out_r(rng) : -out_r(rng));
        CHECK_FALSE(domain_membership(point_from_coordinates({ang(rng), ang(rng), sl, r}, lb), s, lb, dom));
    }
}

TEST_CASE("kappa0 on the standard box") {
    RMat box = {{1, 0}, {0, 1}};
    auto r = kappa0_estimate(box, 1, 0.3, 0.1, {1, 0}, 2.0);
    CHECK(r.kappa0 == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.Q[0] == doctest::Approx(1.3));
    CHECK(r.grid_points >= 1000);
    auto same = kappa0_estimate(box, 1, 0.3, 0.3, {1, 0}, 2.0);
    CHECK(same.kappa0 == 0.0);
    CHECK_THROWS(kappa0_estimate({{1, 0}, {2, 0}}, 1, 0.3, 0.1, {1, 0}, 2.0));
    CHECK_THROWS(kappa0_estimate(box, 1, 0.3, 0.1, {0, 0}, 2.0));
}

TEST_CASE("kappa0 inequality on random 2-D slabs") {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(-1, 1), e(0.05, 0.5);
    std::uniform_int_distribution<int> pd(-5, 5);
    int checked = 0;
    for (int t = 0; t < 100; ++t) {
        RMat g = {{1 + 0.3 * u(rng), 0.3 * u(rng)}, {0.3 * u(rng), 1 + 0.3 * u(rng)}};
        std::vector<int> P = {pd(rng), pd(rng)};
        if (P[0] == 0 && P[1] == 0) P[0] = 1;
        double eps = e(rng), epsp = eps * 0.5 * (1 + u(rng)) * 0.5;
        auto r = kappa0_estimate(g, 1, eps, epsp, P, 1.0);
        double p1 = std::abs(P[0]) + std::abs(P[1]);
        // closed form: only the slab direction contributes its full margin
        double ap = g[0][0] * P[0] + g[0][1] * P[1];
        CHECK(r.kappa0 <= std::abs(ap) / p1 + 1e-12);
        // independent Q' samples: random interior plus the vertices of the closure
        std::uniform_real_distribution<double> s(-epsp, 1 + epsp), rr(-1, 1);
        std::vector<std::pair<double, double>> samples;
        for (int k = 0; k < 1000; ++k) samples.emplace_back(s(rng), rr(rng));
        for (double a : {-epsp, 1 + epsp})
            for (double b : {-1.0, 1.0}) samples.emplace_back(a, b);
        for (auto [a, b] : samples) {
            double dot = 0;
            for (int c = 0; c < 2; ++c) dot += (a * g[0][c] + b * g[1][c] - r.Q[c]) * P[c];
            ++checked;
            CHECK(dot <= -r.kappa0 * (eps - epsp) * p1);
        }
    }
    CHECK(checked == 100 * 1004);
}

TEST_CASE("convex hull membership") {
    RMat tri = {{0, 0}, {1, 0}, {0, 1}};
    CHECK(in_convex_hull(tri, {0.2, 0.2}));
    CHECK(in_convex_hull(tri, {0.5, 0.5}));
    CHECK_FALSE(in_convex_hull(tri, {0.6, 0.6}));
    CHECK_FALSE(in_convex_hull(tri, {-0.1, 0.2}));
}

TEST_CASE("convex extension eta") {
    // one slab direction: the union is an interval, so the cap eps is reached
    CHECK(eta_for_translates(1, 0.2, {{1.0}}) == 0.2);
    // two directions: the hull edge x + y = 4 + 2 eps limits eta to 1/2
    CHECK(eta_for_translates(2, 0.3, {{1, 0}, {0, 1}}) == 0.3);
    CHECK(eta_for_translates(2, 0.8, {{1, 0}, {0, 1}}) == doctest::Approx(0.5).epsilon(1e-7));
    CHECK(eta_for_translates(1, 0.2, {{0.0}}) == 0.0);
    double prev = 0;
    for (double eps : {0.01, 0.05, 0.2, 0.6, 0.9}) {
        double e = eta_for_translates(2, eps, {{1, 0}, {0, 1}});
        CHECK(e >= prev);
        CHECK(e <= eps);
        prev = e;
    }
    CHECK_THROWS(eta_for_translates(1, 0.0, {{1.0}}));

    auto s = basic_example(0.37, 0.81);
    DomainSpec dom;
    dom.epsilon = 0.25;
    CHECK(convex_extension_eta(s, dom) == 0.25);
}

TEST_CASE("toroidal spec JSON") {
    json j = json::parse(R"({"n": 2, "a": 0, "b": 0, "q": 1,
        "R1": [["0.5"]], "R2": [["0.25"]], "R3": [[["0", "1"]]],
        "P0": [[["0", "1"]]], "P1": [["0"]]})");
    auto s = toroidal_spec_from_json(j);
    CHECK(s.R1[0][0] == 0.5);
    CHECK(s.R3[0][0] == I);
    j["R1"] = json::parse(R"([["1", "2"]])");
    CHECK_THROWS(toroidal_spec_from_json(j));
    j["R1"] = json::parse(R"([[["1", "1"]]])");
    CHECK_THROWS(toroidal_spec_from_json(j));
}
