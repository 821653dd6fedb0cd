#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "germlin/linearizer.hpp"

using namespace germlin;

namespace {

bool same(const VSeries<QC>& a, const VSeries<QC>& b) {
    if (a.size() != b.size()) return false;
    for (size_t k = 0; k < a.size(); ++k)
        if (a[k].terms != b[k].terms) return false;
    return true;
}

bool all_zero(const std::vector<double>& v) {
    for (double x : v)
        if (x != 0.0) return false;
    return true;
}

GenOptions vertical_only() {
    GenOptions o;
    o.horizontal = false;
    return o;
}

}  // namespace

TEST_CASE("generator: zero phi0 gives linear decks") {
    GenOptions o;
    o.nterms = 0;
    auto g = generate_commuting_decks<QC>(1, 1, 1, 2, 5, GenProfile::Coboundary, o);
    for (const auto& t : g.pert.tau_star)
        for (const auto& s : t) CHECK(s.empty());
    CHECK(check_commutation(g.pert, 5) == 0.0);
    CHECK_THROWS(generate_commuting_decks<QC>(1, 1, 1, 2, 5, GenProfile::Coboundary, GenOptions{4, 1, 7}));
}

TEST_CASE("generator: phi0 = (0, v^2) expansion") {
    const QC mu(mpq_class(1, 3));
    Decks<QC> dk{{{QC(mpq_class(3, 5), mpq_class(4, 5))}}, {{mu}}};
    const Trunc t{8, 4};
    VSeries<QC> phi0{Series<QC>(1, 1, t), monomial<QC>(1, 1, t, {0}, {2}, QC(1))};
    auto p = conjugate_decks(dk, phi0, 4, t);
    CHECK(p.tau_star[0][0].empty());
    // Phi0 (mu Phi0^{-1}(v)) = mu v + (mu^2 - mu) v^2 + ...
    CHECK(p.tau_star[0][1].coeff(Key{{0}, {2}}) == mu * mu - mu);
    // v^3: Phi0^{-1} = v - v^2 + 2v^3, so mu(2v^3) + 2 mu^2 (v)(-v^2)
    CHECK(p.tau_star[0][1].coeff(Key{{0}, {3}}) == QC(2) * mu - QC(2) * mu * mu);
}

TEST_CASE("commutation check") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        auto g = generate_commuting_decks<QC>(seed, 1, 1, 2, 5, GenProfile::Coboundary);
        CHECK(check_commutation(g.pert, 5) == 0.0);
    }
    // add v^2 to the vertical part of tau_1 only
    GenOptions o;
    o.nterms = 0;
    auto g = generate_commuting_decks<QC>(9, 1, 1, 2, 4, GenProfile::Coboundary, o);
    g.pert.tau_star[0][1].add_term(Key{{0}, {2}}, QC(1));
    const QC mu2 = g.pert.decks.mu[1][0];
    double expect = scalar_traits<QC>::abs(mu2 * mu2 - mu2);
    CHECK(check_commutation(g.pert, 4) == doctest::Approx(expect).epsilon(1e-15));
}

TEST_CASE("vertical linearization") {
    GenOptions zero;
    zero.nterms = 0;
    auto lin = generate_commuting_decks<QC>(2, 1, 1, 2, 5, GenProfile::Coboundary, zero);
    auto r0 = vertical_linearize(lin.pert, 5);
    for (const auto& s : r0.phi) CHECK(s.empty());

    for (std::uint64_t seed = 11; seed <= 13; ++seed) {
        const int N = 6;
        auto g = generate_commuting_decks<QC>(seed, 1, 1, 2, N, GenProfile::Coboundary, vertical_only());
        auto rep = diophantine_scan(g.pert.decks, N + 2, ScanMode::Vertical);
        REQUIRE_FALSE(rep.resonant());
        auto r = vertical_linearize(g.pert, N, &rep);
        VSeries<QC> expect = v_block(g.phi0, 1);
        for (size_t j = 0; j < expect.size(); ++j) CHECK(r.phi[j].terms == expect[j].terms);
        CHECK(all_zero(r.residual));

        // degree 2 is the cohomological solve of [tau*^v]_2
        std::vector<VSeries<QC>> F;
        for (const auto& t : g.pert.tau_star) F.push_back(homogeneous_part(v_block(t, 1), 2));
        auto G2 = solve_family(CochainSystem<QC>{F, Block::Vertical, false, g.pert.decks});
        CHECK(homogeneous_part(r.phi[0], 2).terms == G2[0].terms);

        auto ri = vertical_linearize(g.pert, N, nullptr, true);
        CHECK(same(ri.phi, r.phi));
    }
}

TEST_CASE("vertical linearization with a horizontal perturbation") {
    for (std::uint64_t seed = 21; seed <= 22; ++seed) {
        auto g = generate_commuting_decks<QC>(seed, 1, 1, 2, 6, GenProfile::Generic);
        CHECK(g.phi0.empty());
        auto r = vertical_linearize(g.pert, 6);
        CHECK(all_zero(r.residual));
        CHECK(same(vertical_linearize(g.pert, 6, nullptr, true).phi, r.phi));
    }
    // two vertical directions, one deck
    auto g = generate_commuting_decks<QC>(5, 1, 2, 1, 5, GenProfile::Generic);
    CHECK(all_zero(vertical_linearize(g.pert, 5).residual));
}

TEST_CASE("full linearization") {
    GenOptions zero;
    zero.nterms = 0;
    auto lin = generate_commuting_decks<QC>(3, 1, 1, 2, 5, GenProfile::Coboundary, zero);
    for (const auto& s : full_linearize(lin.pert, 5).phi) CHECK(s.empty());

    for (std::uint64_t seed = 31; seed <= 33; ++seed) {
        auto g = generate_commuting_decks<QC>(seed, 1, 1, 2, 6, GenProfile::Coboundary);
        auto rep = diophantine_scan(g.pert.decks, 8, ScanMode::Full);
        auto r = full_linearize(g.pert, 6, &rep);
        CHECK(same(r.phi, g.phi0));
        CHECK(all_zero(r.residual));
        CHECK(same(full_linearize(g.pert, 6, nullptr, true).phi, r.phi));
        auto vrep = diophantine_scan(g.pert.decks, 8, ScanMode::Vertical);
        CHECK_THROWS_AS(full_linearize(g.pert, 6, &vrep), std::invalid_argument);
    }

    GenOptions h_only;
    h_only.vertical = false;
    auto g = generate_commuting_decks<QC>(40, 2, 1, 2, 5, GenProfile::Coboundary, h_only);
    auto r = full_linearize(g.pert, 5);
    CHECK(r.phi[2].empty());
    CHECK(r.phi[0].terms == g.phi0[0].terms);
    CHECK(r.phi[1].terms == g.phi0[1].terms);
}

TEST_CASE("full linearization in float mode") {
    GenOptions o;
    o.scale = mpq_class(1, 10);
    auto g = generate_commuting_decks<CD>(7, 1, 1, 2, 6, GenProfile::Coboundary, o);
    auto r = full_linearize(g.pert, 6);
    for (size_t c = 0; c < r.phi.size(); ++c) {
        CHECK(r.phi[c].terms.size() == g.phi0[c].terms.size());
        for (const auto& [k, v] : g.phi0[c].terms) CHECK(std::abs(r.phi[c].coeff(k) - v) <= 1e-12);
    }
    for (double x : r.residual) CHECK(x <= 1e-12);
}

TEST_CASE("conjugacy residual sensitivity") {
    GenOptions zero;
    zero.nterms = 0;
    auto lin = generate_commuting_decks<QC>(4, 1, 1, 1, 4, GenProfile::Coboundary, zero);
    const Trunc t = lin.pert.work_trunc(4);
    VSeries<QC> id(2, Series<QC>(1, 1, t));
    CHECK(all_zero(conjugacy_residual(id, lin.pert, 4, LinMode::Full)));

    auto g = generate_commuting_decks<QC>(8, 1, 1, 2, 5, GenProfile::Coboundary);
    auto r = full_linearize(g.pert, 5);
    auto bumped = r.phi;
    bumped[1].add_term(Key{{0}, {3}}, QC(1));
    auto res = conjugacy_residual(bumped, g.pert, 5, LinMode::Full);
    CHECK(res[2] == 0.0);
    CHECK(res[3] > 0.0);
}

TEST_CASE("perturbation JSON round trip") {
    auto g = generate_commuting_decks<QC>(6, 1, 1, 2, 4, GenProfile::Generic);
    auto back = perturbation_from_json<QC>(json::parse(perturbation_json(g.pert).dump()));
    REQUIRE(back.q() == 2);
    for (int i = 0; i < 2; ++i) CHECK(same(back.tau_star[i], g.pert.tau_star[i]));
    CHECK(back.decks.mu == g.pert.decks.mu);
}
