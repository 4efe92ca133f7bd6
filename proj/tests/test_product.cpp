#include <cmath>

#include "carleson/errors.hpp"
#include "carleson/product.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace carleson;
using Fixture = testutil::ProductFixture;

TEST_CASE("shift map: containment, scale gap, uniqueness") {
    const Fixture fx(10);
    int defined = 0;
    for (const Cube& q : fx.d1.cubes) {
        const int s = fx.frame.f1.shift[static_cast<std::size_t>(q.id)];
        if (s < 0) continue;
        ++defined;
        const Cube& sq = fx.d1p.cube(s);
        CHECK(sq.gen == q.gen - fx.frame.f1.r);
        CHECK(fx.d1p.subset_external(q.members, s));
        // uniqueness: no other cube of that generation contains Q
        for (int other : fx.d1p.level(sq.gen))
            if (other != s) CHECK_FALSE(fx.d1p.subset_external(q.members, other));
    }
    CHECK(defined > 0);
}

TEST_CASE("square function: zero, single coefficient, constant function") {
    const Fixture fx(20);
    CHECK(s1_norm(fx.frame, {}) == 0.0);

    const auto key = fx.usable_key();
    ProductField c;
    c[key] = 1.0;
    const auto res = square_function(fx.frame, c);
    const auto& [q1, u1, q2, u2] = key;
    const int s1c = fx.frame.f1.shifted(q1);
    const int s2c = fx.frame.f2.shifted(q2);
    const double m = fx.d1p.cube(s1c).mass * fx.d2p.cube(s2c).mass;
    // S = chi_{S(R)} / sqrt(mu(S(R))), so |S|_1 = sqrt(mu(S(R)))
    CHECK(res.l1 == doctest::Approx(std::sqrt(m)).epsilon(1e-10));
    for (PointId p1 = 0; p1 < fx.frame.n1(); ++p1)
        for (PointId p2 = 0; p2 < fx.frame.n2(); ++p2) {
            const double expect = fx.d1p.contains(s1c, p1) && fx.d2p.contains(s2c, p2)
                                      ? 1.0 / std::sqrt(m)
                                      : 0.0;
            CHECK(res.values[cell_index(fx.frame, p1, p2)] == doctest::Approx(expect));
        }

    // coefficients of the constant function vanish, so S(lift(1)) == 0
    std::vector<double> ones(fx.frame.cells(), 1.0);
    const auto c1 = lift(fx.frame, ones);
    for (const auto& [k2, v] : c1) CHECK(std::abs(v) <= 1e-10);
}

TEST_CASE("square function rejects bad-cube entries") {
    const Fixture fx(30);
    int bad_cube = -1;
    for (const Cube& q : fx.d1.cubes)
        if (!fx.frame.f1.usable(q.id) && fx.b1.at(q.id).num_haar() >= 1) bad_cube = q.id;
    if (bad_cube >= 0) {
        ProductField c;
        const auto key = fx.usable_key();
        c[{bad_cube, 1, std::get<2>(key), std::get<3>(key)}] = 1.0;
        CHECK_THROWS_AS(square_function(fx.frame, c), Error);
    }
}

TEST_CASE("bmo norm: single unit coefficient against its own rectangle") {
    const Fixture fx(40);
    CHECK(bmo_prod_norm(fx.frame, {}, {AdmissibleOpenSet::single(fx.d1p.level(-1)[0],
                                                                 fx.d2p.level(-1)[0])}) == 0.0);
    const auto key = fx.usable_key();
    ProductField c;
    c[key] = 1.0;
    const int s1c = fx.frame.f1.shifted(std::get<0>(key));
    const int s2c = fx.frame.f2.shifted(std::get<2>(key));
    const double m = fx.d1p.cube(s1c).mass * fx.d2p.cube(s2c).mass;
    const double norm = bmo_prod_norm(fx.frame, c, {AdmissibleOpenSet::single(s1c, s2c)});
    CHECK(norm == doctest::Approx(1.0 / std::sqrt(m)).epsilon(1e-12));
}

TEST_CASE("bmo norm over pruned singles equals exhaustive single-rectangle scan") {
    const Fixture fx(50);
    const auto c = fx.random_field(7, 25);
    const double fast = bmo_prod_norm(fx.frame, c, canonical_candidates(fx.frame, c));

    double brute = 0.0;
    for (const Cube& a : fx.d1p.cubes)
        for (const Cube& b : fx.d2p.cubes) {
            double sum = 0.0;
            for (const auto& [key, v] : c) {
                const int sa = fx.frame.f1.shifted(std::get<0>(key));
                const int sb = fx.frame.f2.shifted(std::get<2>(key));
                if (fx.d1p.subset(sa, a.id) && fx.d2p.subset(sb, b.id)) sum += v * v;
            }
            const double m = a.mass * b.mass;
            if (sum > 0.0 && m > 0.0) brute = std::max(brute, sum / m);
        }
    CHECK(fast == doctest::Approx(std::sqrt(brute)).epsilon(1e-12));
}

TEST_CASE("s1/s2/t1 norms: one-term evaluations") {
    const Fixture fx(60);
    const auto key = fx.usable_key();
    ProductField c;
    c[key] = 1.0;
    const int s1c = fx.frame.f1.shifted(std::get<0>(key));
    const int s2c = fx.frame.f2.shifted(std::get<2>(key));
    const double m = fx.d1p.cube(s1c).mass * fx.d2p.cube(s2c).mass;
    CHECK(s1_norm(fx.frame, c) == doctest::Approx(std::sqrt(m)).epsilon(1e-12));
    CHECK(s2_norm(fx.frame, c) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(t1_norm(fx.frame, c, canonical_candidates(fx.frame, c)) ==
          doctest::Approx(1.0 / std::sqrt(m)).epsilon(1e-12));
}

TEST_CASE("duality pairing and its bound") {
    const Fixture fx(70);
    ProductField a, b;
    const auto key = fx.usable_key();
    a[key] = 1.0;
    b[key] = 1.0;
    CHECK(duality_pairing(a, b) == doctest::Approx(1.0));
    // orthogonal supports pair to zero
    ProductField c = fx.random_field(1, 10);
    ProductField d;
    for (const auto& [k2, v] : fx.random_field(2, 10))
        if (c.find(k2) == c.end()) d[k2] = v;
    CHECK(duality_pairing(c, d) == 0.0);

    // |<s,t>| <= C ||s||_s1 ||t||_t1 across random pairs with one suite constant
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 40; ++i) {
        const auto s = fx.random_field(100 + i, 20);
        const auto t = fx.random_field(200 + i, 20);
        const double p = std::abs(duality_pairing(s, t));
        if (p == 0.0) continue;
        const double ns = s1_norm(fx.frame, s);
        const double nt =
            t1_norm(fx.frame, t, canonical_candidates(fx.frame, t, proof_level_sets(fx.frame, s)));
        if (ns > 0.0 && nt > 0.0) worst = std::max(worst, p / (ns * nt));
    }
    MESSAGE("duality suite constant ", worst);
    CHECK(worst <= 10.0);
}

TEST_CASE("strong maximal function bounds and oracle") {
    const Fixture fx(80);
    // f == 1: averages never exceed 1 because mu(R') <= mu(5R')
    std::vector<double> ones(fx.frame.cells(), 1.0);
    const auto m1 = strong_maximal(fx.frame, ones);
    for (double v : m1) CHECK(v <= 1.0 + 1e-12);

    // indicator of a rectangle: on the rectangle the value is at least
    // mu(R')/mu(5R') since that rectangle is a candidate
    const Cube& qa = fx.d1p.cube(fx.d1p.level(0)[0]);
    const Cube& qb = fx.d2p.cube(fx.d2p.level(0)[0]);
    std::vector<double> f(fx.frame.cells(), 0.0);
    for (PointId p1 : qa.members)
        for (PointId p2 : qb.members) f[cell_index(fx.frame, p1, p2)] = 1.0;
    const double m5 = ball_mass(fx.s1, {qa.center, 5.0 * cube_outer_constant(1.0) * qa.side}) *
                      ball_mass(fx.s2, {qb.center, 5.0 * cube_outer_constant(1.0) * qb.side});
    const auto mf = strong_maximal(fx.frame, f);
    const double expect = qa.mass * qb.mass / m5;
    for (PointId p1 : qa.members)
        for (PointId p2 : qb.members)
            CHECK(mf[cell_index(fx.frame, p1, p2)] >= expect * (1.0 - 1e-12));

    // brute-force rectangle scan oracle + L2 bound, random f
    double worst = 0.0;
    for (std::uint64_t fs = 0; fs < 5; ++fs) {
        std::vector<double> g(fx.frame.cells());
        Rng rng(mix_seed(fs, 77));
        for (auto& v : g) v = rng.uniform(-1.0, 1.0);
        const auto mg = strong_maximal(fx.frame, g);
        // oracle: direct max over rectangles at a sample of cells
        for (PointId p1 = 0; p1 < fx.frame.n1(); p1 += 7)
            for (PointId p2 = 0; p2 < fx.frame.n2(); p2 += 7) {
                double best = 0.0;
                for (const Cube& a : fx.d1p.cubes) {
                    if (!fx.d1p.contains(a.id, p1)) continue;
                    const double m5a =
                        ball_mass(fx.s1, {a.center, 5.0 * cube_outer_constant(1.0) * a.side});
                    for (const Cube& b : fx.d2p.cubes) {
                        if (!fx.d2p.contains(b.id, p2)) continue;
                        const double m5b =
                            ball_mass(fx.s2, {b.center, 5.0 * cube_outer_constant(1.0) * b.side});
                        double integral = 0.0;
                        for (PointId z1 : a.members)
                            for (PointId z2 : b.members)
                                integral += std::abs(g[cell_index(fx.frame, z1, z2)]) *
                                            fx.frame.weight(z1, z2);
                        if (m5a * m5b > 0.0) best = std::max(best, integral / (m5a * m5b));
                    }
                }
                CHECK(mg[cell_index(fx.frame, p1, p2)] == doctest::Approx(best).epsilon(1e-12));
            }
        const double ratio = product_norm_l2(fx.frame, mg) / product_norm_l2(fx.frame, g);
        worst = std::max(worst, ratio);
    }
    MESSAGE("strong maximal L2 constant ", worst);
    CHECK(worst < 100.0);
}

TEST_CASE("lift and project: unit coefficients and the projection identity") {
    const Fixture fx(90);
    const auto key = fx.usable_key();
    const auto& [q1, u1, q2, u2] = key;
    const auto h = tensor_haar(fx.frame, q1, u1, q2, u2);
    const auto c = lift(fx.frame, h);
    for (const auto& [k2, v] : c) {
        if (k2 == key)
            CHECK(v == doctest::Approx(1.0).epsilon(1e-10));
        else
            CHECK(std::abs(v) <= 1e-10);
    }

    // project(lift(phi)) equals phi for phi in the spanned subspace
    const auto c0 = fx.random_field(31, 30);
    const auto phi = project(fx.frame, c0);
    const auto round = project(fx.frame, lift(fx.frame, phi));
    for (std::size_t i = 0; i < phi.size(); ++i) CHECK(std::abs(phi[i] - round[i]) <= 1e-10);

    // Parseval-type identities of the lifting
    CHECK(s1_norm(fx.frame, lift(fx.frame, phi)) ==
          doctest::Approx(square_function(fx.frame, lift(fx.frame, phi)).l1));
    const auto cands = canonical_candidates(fx.frame, c0);
    CHECK(bmo_prod_norm(fx.frame, lift(fx.frame, phi), cands) ==
          doctest::Approx(bmo_prod_norm(fx.frame, c0, cands)).epsilon(1e-9));
    // projection contracts t1 into BMO over matching candidates (constant 1)
    CHECK(bmo_prod_norm(fx.frame, lift(fx.frame, project(fx.frame, c0)), cands) <=
          t1_norm(fx.frame, c0, cands) * (1.0 + 1e-9));
}
