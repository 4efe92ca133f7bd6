#include <cmath>
#include <set>

#include "carleson/errors.hpp"
#include "carleson/space.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace carleson;

namespace {

PointSpace line_space() {
    return PointSpace::euclidean({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0});
}

}  // namespace

TEST_CASE("line space with Lebesgue-type dominator validates cleanly") {
    const PointSpace space = line_space();
    const auto dom = DominatingFunction::power(2.0, 1.0);
    const auto rep = validate_space(space, dom, default_radius_grid(space));
    CHECK_MESSAGE(rep.ok(), rep.str());
}

TEST_CASE("broken triangle inequality is witnessed") {
    // distances as the line space except rho(0,2) = 5
    std::vector<double> rho = {0, 1, 5, 1, 0, 1, 5, 1, 0};
    const PointSpace space({{0.0}, {1.0}, {2.0}}, {1.0, 1.0, 1.0}, rho, 1.0);
    const auto dom = DominatingFunction::power(8.0, 1.0);
    const auto rep = validate_space(space, dom, default_radius_grid(space));
    CHECK(rep.has("QuasitriangleViolation"));
}

TEST_CASE("random planar space with fitted square dominator validates") {
    const PointSpace space = testutil::random_space(64, 7, 2, true, /*sup=*/true);
    const auto dom = fit_power_dominator(space, 2.0);
    const auto rep = validate_space(space, dom, default_radius_grid(space));
    CHECK_MESSAGE(rep.ok(), rep.str());

    // brute-force exhaustive triple check mirrors the report
    bool quasi_ok = true;
    for (int x = 0; x < 64 && quasi_ok; ++x)
        for (int y = 0; y < 64 && quasi_ok; ++y)
            for (int z = 0; z < 64; ++z)
                if (space.rho(x, z) > space.rho(x, y) + space.rho(y, z) + 1e-12) {
                    quasi_ok = false;
                    break;
                }
    CHECK(quasi_ok);
}

TEST_CASE("validate_space rejects empty and negative-weight input") {
    CHECK_THROWS_AS(PointSpace({}, {}, {}, 1.0), Error);
    CHECK_THROWS_AS(PointSpace::euclidean({{0.0}, {1.0}}, {1.0, -0.5}), Error);
}

TEST_CASE("regularity table is stored and sanity-checked") {
    PointSpace space = line_space();
    space.set_regularity([](double eps) { return 1.0 + 1.0 / eps; });
    const auto dom = DominatingFunction::power(2.0, 1.0);
    CHECK(validate_space(space, dom, default_radius_grid(space)).ok());
    CHECK(space.regularity()(2.0) == doctest::Approx(1.5));

    space.set_regularity([](double) { return 0.25; });  // A(eps) below 1
    const auto rep = validate_space(space, dom, default_radius_grid(space));
    CHECK(rep.has("RegularityBelowOne"));
}

TEST_CASE("validation is order independent") {
    const PointSpace a = testutil::random_space(24, 3);
    // same points listed in reverse
    std::vector<std::vector<double>> coords(a.coords().rbegin(), a.coords().rend());
    std::vector<double> weights(a.weights().rbegin(), a.weights().rend());
    const PointSpace b = PointSpace::euclidean(std::move(coords), std::move(weights));
    const auto dom_a = fit_power_dominator(a, 2.0);
    const auto dom_b = fit_power_dominator(b, 2.0);
    CHECK(validate_space(a, dom_a, default_radius_grid(a)).ok() ==
          validate_space(b, dom_b, default_radius_grid(b)).ok());
    CHECK(dom_a.power_scale() == doctest::Approx(dom_b.power_scale()));
}

TEST_CASE("ball membership") {
    const PointSpace space = line_space();
    CHECK(ball_members(space, {1, 1.5}) == std::vector<PointId>{0, 1, 2});
    CHECK(ball_members(space, {1, 0.5}) == std::vector<PointId>{1});
    CHECK_THROWS_AS(ball_members(space, {7, 1.0}), Error);

    const PointSpace rnd = testutil::random_space(64, 11);
    Rng rng(42);
    for (int t = 0; t < 100; ++t) {
        const PointId c = rng.uniform_int(0, 63);
        const double r = rng.uniform(0.01, 1.2);
        std::set<PointId> oracle;
        for (PointId y = 0; y < 64; ++y)
            if (rnd.rho(c, y) < r) oracle.insert(y);
        const auto got = ball_members(rnd, {c, r});
        CHECK(std::set<PointId>(got.begin(), got.end()) == oracle);
    }
}

TEST_CASE("tail integral: ball covering everything gives an empty sum") {
    const PointSpace space = line_space();
    const auto dom = DominatingFunction::power(2.0, 1.0);
    CHECK(tail_integral(space, dom, 1, 10.0, 1.0) == 0.0);
}

TEST_CASE("tail integral on dyadic shells matches the geometric closed form") {
    // points at distance 2^j from the centre, weight 2^j, lambda(x,r) = r
    std::vector<std::vector<double>> coords{{0.0}};
    std::vector<double> weights{1.0};
    for (int j = 1; j <= 10; ++j) {
        coords.push_back({std::pow(2.0, j)});
        weights.push_back(std::pow(2.0, j));
    }
    const PointSpace space = PointSpace::euclidean(std::move(coords), std::move(weights));
    const auto dom = DominatingFunction::power(1.0, 1.0);
    // sum over j of 2^j * 2^-j / 2^j = 1023/1024
    CHECK(tail_integral(space, dom, 0, 2.0, 1.0) == doctest::Approx(1023.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("tail integral bound holds on valid spaces") {
    const PointSpace space = testutil::random_space(128, 23);
    const auto dom = fit_power_dominator(space, 2.0);
    REQUIRE(validate_space(space, dom, default_radius_grid(space)).ok());
    const double eps = 0.5;
    for (double r_b : default_radius_grid(space)) {
        for (PointId c = 0; c < space.size(); c += 17) {
            const double v = tail_integral(space, dom, c, r_b, eps);
            CHECK(v <= tail_integral_bound(dom, r_b, eps) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("mu(B) <= lambda on the grid for valid spaces") {
    const PointSpace space = testutil::random_space(48, 5);
    const auto dom = fit_power_dominator(space, 2.0);
    for (double r : default_radius_grid(space))
        for (PointId x = 0; x < space.size(); ++x)
            CHECK(ball_mass(space, {x, r}) <= dom(x, r) * (1.0 + 1e-12));
}
