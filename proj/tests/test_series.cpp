#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "germlin/grid.hpp"
#include "germlin/series_io.hpp"
#include "support.hpp"

using namespace germlin;
using germlin::testing::random_series;

namespace {

const Trunc T{8, 6};

Series<QC> mono(std::vector<int> P, std::vector<int> Q, QC c = QC(1), Trunc t = T) {
    int nh = static_cast<int>(P.size()), nv = static_cast<int>(Q.size());
    return monomial<QC>(nh, nv, t, std::move(P), std::move(Q), c);
}

// Independent convolution: sum over all pairs whose exponents add to target.
QC brute_coeff(const Series<QC>& f, const Series<QC>& g, const Key& target) {
    QC acc;
    for (const auto& [a, ca] : f.terms)
        for (const auto& [b, cb] : g.terms) {
            bool hit = true;
            for (size_t i = 0; i < target.P.size(); ++i) hit = hit && a.P[i] + b.P[i] == target.P[i];
            for (size_t j = 0; j < target.Q.size(); ++j) hit = hit && a.Q[j] + b.Q[j] == target.Q[j];
            if (hit) acc += ca * cb;
        }
    return acc;
}

}  // namespace

TEST_CASE("ring ops: identities and exponent addition") {
    std::mt19937_64 rng(1);
    auto g = random_series(rng, 2, 2, T, 12, 2, 0, 3);
    Series<QC> zero(2, 2, T);
    CHECK(add(zero, g).terms == g.terms);

    auto p = mul(mono({1}, {2}), mono({-1}, {2}));
    REQUIRE(p.terms.size() == 1);
    CHECK(p.coeff(Key{{0}, {4}}) == QC(1));
}

TEST_CASE("mul matches brute-force convolution") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_series(rng, 2, 2, Trunc{8, 6}, 15, 2, 0, 3);
        auto g = random_series(rng, 2, 2, Trunc{8, 6}, 15, 2, 0, 3);
        auto fg = mul(f, g);
        // every product key, plus a few keys that are absent
        std::vector<Key> keys;
        for (const auto& [a, ca] : f.terms)
            for (const auto& [b, cb] : g.terms) keys.push_back(key_sum(a, b));
        keys.push_back(Key{{9, 9}, {0, 0}});
        for (const auto& k : keys) CHECK(fg.coeff(k) == brute_coeff(f, g, k));
    }
}

TEST_CASE("exact ring laws") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        auto f = random_series(rng, 1, 2, T, 8, 2, 0, 3);
        auto g = random_series(rng, 1, 2, T, 8, 2, 0, 3);
        auto h = random_series(rng, 1, 2, T, 8, 2, 0, 3);
        CHECK(mul(f, g).terms == mul(g, f).terms);
        CHECK(mul(mul(f, g), h).terms == mul(f, mul(g, h)).terms);
        CHECK(mul(f, add(g, h)).terms == add(mul(f, g), mul(f, h)).terms);
        CHECK(add(f, g).terms == add(g, f).terms);
    }
}

TEST_CASE("serial and parallel mul kernels agree bitwise") {
    std::mt19937_64 rng(5);
    auto f = testing::to_float(random_series(rng, 2, 2, Trunc{12, 8}, 60, 3, 0, 4));
    auto g = testing::to_float(random_series(rng, 2, 2, Trunc{12, 8}, 60, 3, 0, 4));
    auto a = kernels::serial::mul(f, g, Trunc{12, 8});
    auto b = kernels::omp::mul(f, g, Trunc{12, 8});
    REQUIRE(a.terms.size() == b.terms.size());
    auto it = b.terms.begin();
    for (const auto& [k, c] : a.terms) {
        CHECK(k == it->first);
        CHECK(c.real() == it->second.real());
        CHECK(c.imag() == it->second.imag());
        ++it;
    }
}

TEST_CASE("ring op errors") {
    CHECK_THROWS_AS(add(mono({1}, {1}), mono({1, 0}, {1})), std::invalid_argument);
    auto a = mono({0}, {0}, QC(1), Trunc{0, 0});
    CHECK_THROWS_AS(mul(a, a), std::invalid_argument);
    Series<QC> f(1, 1, Trunc{2, 4});
    CHECK_THROWS_AS(f.add_term(Key{{3}, {0}}, QC(1)), TruncationError);
    f.add_term(Key{{0}, {5}}, QC(1));
    CHECK(f.empty());
}

TEST_CASE("homogeneous parts") {
    Series<QC> f(2, 2, T);
    f.add_term(Key{{0, 0}, {2, 0}}, QC(1));
    f.add_term(Key{{0, 1}, {1, 1}}, QC(1));
    f.add_term(Key{{0, 0}, {3, 0}}, QC(1));
    auto f2 = homogeneous_part(f, 2);
    CHECK(f2.terms.size() == 2);
    CHECK(f2.coeff(Key{{0, 1}, {1, 1}}) == QC(1));
    CHECK(homogeneous_part(f, 9).empty());

    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_series(rng, 2, 2, T, 20, 2, 0, 6);
        Series<QC> sum(2, 2, T);
        for (int k = 0; k <= T.N_v; ++k) sum = add(sum, homogeneous_part(g, k));
        CHECK(sum.terms == g.terms);
        auto once = homogeneous_part(g, 3);
        CHECK(homogeneous_part(once, 3).terms == once.terms);
    }
}

TEST_CASE("substitute_shift examples") {
    std::mt19937_64 rng(2);
    auto f = random_series(rng, 1, 1, T, 10, 2, 0, 4);
    VSeries<QC> zh{Series<QC>(1, 1, T)}, zv{Series<QC>(1, 1, T)};
    CHECK(substitute_shift(f, zh, zv, 6).terms == f.terms);

    auto v = mono({0}, {1});
    auto r = substitute_shift(v, zh, VSeries<QC>{mono({0}, {2})}, 6);
    CHECK(r.terms == add(mono({0}, {1}), mono({0}, {2})).terms);

    // h^-1 v^2 at h + h v^2 is h^-1 v^2 (1 + v^2)^-1
    auto g = mono({-1}, {2});
    auto s = substitute_shift(g, VSeries<QC>{mono({1}, {2})}, zv, 6);
    Series<QC> expect(1, 1, T);
    expect.add_term(Key{{-1}, {2}}, QC(1));
    expect.add_term(Key{{-1}, {4}}, QC(-1));
    expect.add_term(Key{{-1}, {6}}, QC(1));
    CHECK(s.terms == expect.terms);

    CHECK_THROWS_AS(substitute_shift(g, VSeries<QC>{mono({1}, {1})}, zv, 6), std::invalid_argument);
}

TEST_CASE("substitute_shift undone by the truncated inverse") {
    std::mt19937_64 rng(17);
    const Trunc t{16, 6};
    for (int trial = 0; trial < 5; ++trial) {
        VSeries<QC> phi;
        phi.push_back(random_series(rng, 1, 1, t, 3, 1, 2, 3));
        phi.push_back(random_series(rng, 1, 1, t, 3, 1, 2, 3));
        auto psi = invert_near_identity(phi, 1, 6);
        // (Id + psi) o (Id + phi) = Id
        for (size_t c = 0; c < 2; ++c) {
            auto back = add(phi[c], substitute_shift(psi[c], h_block(phi, 1), v_block(phi, 1), 6));
            CHECK(back.empty());
        }
        auto f = random_series(rng, 1, 1, t, 8, 2, 0, 6);
        auto there = substitute_shift(f, h_block(phi, 1), v_block(phi, 1), 6);
        auto again = substitute_shift(there, h_block(psi, 1), v_block(psi, 1), 6);
        CHECK(again.terms == f.terms);
    }
}

TEST_CASE("grid sup norm") {
    GridSpec g;
    g.h_radii = {{0.5, 2.0}};
    g.v_radius = {0.5};
    Series<QC> zero(1, 1, T);
    CHECK(grid_sup_norm(zero, g) == 0.0);
    CHECK(grid_sup_norm(mono({0}, {0}, QC(3, 4)), g) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(grid_sup_norm(mono({1}, {0}), g) == doctest::Approx(2.0).epsilon(1e-15));

    GridSpec bad = g;
    bad.h_radii = {{}};
    CHECK_THROWS(grid_sup_norm(zero, bad));
    bad = g;
    bad.n_angle = 3;
    CHECK_THROWS(grid_sup_norm(zero, bad));

    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_series(rng, 1, 1, T, 8, 2, 0, 3);
        auto coarse = g, fine = g;
        coarse.n_angle = 8;
        fine.n_angle = 16;
        CHECK(grid_sup_norm(f, fine) >= grid_sup_norm(f, coarse));
        CHECK(kernels::serial::sup_abs(kernels::flatten(f), fine) ==
              kernels::omp::sup_abs(kernels::flatten(f), fine));
    }
}

TEST_CASE("grid sup norm of f times its torus conjugate") {
    GridSpec g;
    g.h_radii = {{1.0}};
    g.v_radius = {1.0};
    g.n_angle = 16;
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_series(rng, 1, 1, Trunc{8, 3}, 6, 2, 0, 0);
        Series<QC> fstar(1, 1, Trunc{8, 3});
        for (const auto& [k, c] : f.terms) fstar.add_term(Key{{-k.P[0]}, k.Q}, scalar_traits<QC>::conj(c));
        double s = grid_sup_norm(f, g);
        CHECK(grid_sup_norm(mul(f, fstar), g) == doctest::Approx(s * s).epsilon(1e-12));
    }
}

TEST_CASE("cauchy bound check") {
    GridSpec g;
    g.h_radii = {{1.0}};
    g.v_radius = {0.5};
    g.n_angle = 64;
    auto rep = cauchy_bound_check(mono({0}, {2}), g);
    CHECK(rep.pass);
    CHECK(rep.worst_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(cauchy_bound_check(Series<QC>(1, 1, T), g).pass);

    std::mt19937_64 rng(4);
    g.h_radii = {{0.5, 1.0, 1.5}};
    for (int trial = 0; trial < 10; ++trial) {
        auto f = random_series(rng, 1, 1, T, 10, 2, 0, 6);
        CHECK(cauchy_bound_check(f, g, 1e-9).pass);
    }
}

TEST_CASE("series JSON round trip") {
    std::mt19937_64 rng(8);
    auto f = random_series(rng, 2, 1, T, 12, 2, 0, 5);
    auto back = series_from_json<QC>(json::parse(series_to_json(f).dump()));
    CHECK(back.terms == f.terms);
    CHECK(back.trunc.N_h == f.trunc.N_h);
    auto ff = testing::to_float(f);
    auto fb = series_from_json<CD>(json::parse(series_to_json(ff).dump()));
    CHECK(fb.terms == ff.terms);
    CHECK_THROWS(series_from_json<CD>(series_to_json(f)));
}
