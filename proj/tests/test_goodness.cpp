#include <cmath>
#include <limits>

#include "carleson/errors.hpp"
#include "carleson/goodness.hpp"
#include "carleson/rng.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace carleson;

namespace {

// direct reimplementation of the bad-cube definition from the member lists
GoodnessMask brute_classify(const DyadicSystem& d, const DyadicSystem& dp, const PointSpace& space,
                            const GoodnessParams& params) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    GoodnessMask mask;
    mask.good.assign(d.cubes.size(), true);
    for (const Cube& q : d.cubes) {
        for (const Cube& qp : dp.cubes) {
            if (q.gen < qp.gen + params.r) continue;
            const double thr = d.delta * params.c_script * std::pow(q.side, params.gamma) *
                               std::pow(qp.side, 1.0 - params.gamma);
            double near = inf;
            for (PointId a : q.members)
                for (PointId b : qp.members) near = std::min(near, space.rho(a, b));
            double far = inf;
            if (static_cast<int>(qp.members.size()) < space.size()) {
                for (PointId a : q.members)
                    for (PointId b = 0; b < space.size(); ++b)
                        if (!dp.contains(qp.id, b)) far = std::min(far, space.rho(a, b));
            }
            if (near <= thr && far <= thr) {
                mask.good[static_cast<std::size_t>(q.id)] = false;
                break;
            }
        }
    }
    return mask;
}

}  // namespace

TEST_CASE("huge r makes the scale condition vacuous: everything is good") {
    const PointSpace space = testutil::random_space(48, 2);
    const auto d = testutil::small_system(space, 1);
    const auto dp = testutil::small_system(space, 2);
    const auto params = GoodnessParams::make(1.0, 2.0, space.a0(), 2.0, /*r=*/50);
    const auto mask = classify(d, dp, space, params);
    CHECK(mask.bad_count() == 0);
}

TEST_CASE("single cube per generation: complement is empty, cube is good") {
    const PointSpace space = PointSpace::euclidean({{0.0}, {0.001}}, {1.0, 1.0});
    const auto d = build_system(space, 1.0 / 96.0, -1, 2, {1});
    const auto dp = build_system(space, 1.0 / 96.0, -1, 2, {2});
    const auto params = GoodnessParams::make(1.0, 1.0, 1.0, 2.0, 1);
    const auto mask = classify(d, dp, space, params);
    // the whole-space cubes of D sit inside whole-space cubes of D' whose
    // complement is empty; the nearness branch alone must not flag them
    for (const Cube& q : d.cubes)
        if (q.members.size() == 2) CHECK(mask.is_good(q.id));
}

TEST_CASE("classify matches a brute-force reading of the definition") {
    int bad_seen = 0;
    for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const PointSpace space = seed % 2 == 0 ? testutil::lattice_space(256, 80 + seed)
                                               : testutil::cluster_space(4, 3, 80 + seed);
        const double delta = default_delta(1.0);
        const auto d = build_system(space, delta, -1, 2, {seed + 1});
        const auto dp = build_system(space, delta, -1, 2, {seed + 100});
        const auto params = GoodnessParams::make(0.7, 2.0, space.a0(), 1.5, 1);
        const auto fast = classify(d, dp, space, params);
        const auto slow = brute_classify(d, dp, space, params);
        CHECK(fast.good == slow.good);
        bad_seen += fast.bad_count();
    }
    CHECK(bad_seen > 0);  // the comparison must not be vacuous
}

TEST_CASE("classify is monotone in r") {
    const PointSpace space = testutil::lattice_space(300, 10);
    const auto d = build_system(space, 1.0 / 128.0, -1, 2, {3});
    const auto dp = build_system(space, 1.0 / 128.0, -1, 2, {4});
    GoodnessMask prev;
    for (int r = 1; r <= 3; ++r) {
        const auto params = GoodnessParams::make(0.7, 2.0, space.a0(), 1.5, r);
        const auto mask = classify(d, dp, space, params);
        if (r > 1) {
            // increasing r can only turn bad cubes good
            for (std::size_t i = 0; i < mask.good.size(); ++i)
                if (!prev.good[i]) continue;
                else CHECK(mask.good[i]);
        }
        prev = mask;
    }
}

TEST_CASE("mismatched delta is rejected") {
    const PointSpace space = testutil::random_space(16, 3);
    const auto d = build_system(space, 1.0 / 128.0, 0, 2, {1});
    const auto dp = build_system(space, 1.0 / 256.0, 0, 2, {2});
    const auto params = GoodnessParams::make(1.0, 2.0, 1.0, 2.0, 1);
    CHECK_THROWS_AS(classify(d, dp, space, params), Error);
}

TEST_CASE("badness probability: one trial reproduces classify") {
    const PointSpace space = testutil::lattice_space(192, 30);
    const auto params = GoodnessParams::make(0.7, 2.0, space.a0(), 1.5, 1);
    const std::uint64_t seed = 17;
    const auto rep = badness_probability(space, 1.0 / 128.0, -1, 2, params, 1, seed);
    const auto fixed = build_system(space, 1.0 / 128.0, -1, 2, {seed});
    const auto dp = build_system(space, 1.0 / 128.0, -1, 2, {mix_seed(seed, 0xbad0)});
    const auto mask = classify(fixed, dp, space, params);
    for (std::size_t i = 0; i < rep.frequency.size(); ++i)
        CHECK(rep.frequency[i] == (mask.good[i] ? 0.0 : 1.0));
}

TEST_CASE("all-good configuration has zero frequency") {
    const PointSpace space = testutil::random_space(32, 44);
    const auto params = GoodnessParams::make(1.0, 2.0, space.a0(), 2.0, 40);
    const auto rep = badness_probability(space, default_delta(1.0), 0, 3, params, 5, 3);
    CHECK(rep.mean_frequency == 0.0);
}

TEST_CASE("empirical badness decays with r") {
    const PointSpace space = testutil::lattice_space(384, 50);
    std::vector<double> mean, se;
    for (int r = 1; r <= 3; ++r) {
        const auto params = GoodnessParams::make(0.7, 2.0, space.a0(), 1.5, r);
        const auto rep = badness_probability(space, 1.0 / 128.0, -1, 2, params, 40, 5);
        mean.push_back(rep.mean_frequency);
        se.push_back(rep.stderr_mean);
    }
    CHECK(mean[0] > 0.0);  // non-vacuous
    CHECK(mean[1] <= mean[0] + 2.0 * (se[0] + se[1]));
    CHECK(mean[2] <= mean[1] + 2.0 * (se[1] + se[2]));
}

TEST_CASE("calibrated default r reaches the badness target") {
    const PointSpace space = testutil::lattice_space(256, 71);
    const auto proto = GoodnessParams::make(0.7, 1.0, space.a0(), 1.5, 1);
    const int r = calibrate_r(space, 1.0 / 128.0, -1, 2, proto, 25, 4);
    CHECK(r >= 1);
    GoodnessParams chosen = proto;
    chosen.r = r;
    const auto rep = badness_probability(space, 1.0 / 128.0, -1, 2, chosen, 25, 4);
    CHECK(rep.mean_frequency < 0.1);
}

TEST_CASE("split_good_bad partitions the field") {
    ProductField c;
    Rng rng(9);
    for (int i = 0; i < 40; ++i)
        c[{rng.uniform_int(0, 5), rng.uniform_int(1, 3), rng.uniform_int(0, 5),
           rng.uniform_int(1, 3)}] = rng.uniform(-1, 1);
    GoodnessMask all_good, all_bad, mixed;
    all_good.good.assign(6, true);
    all_bad.good.assign(6, false);
    mixed.good = {true, false, true, true, false, true};

    auto [g1, b1] = split_good_bad(c, all_good, all_good);
    CHECK(g1.size() == c.size());
    CHECK(b1.empty());
    auto [g2, b2] = split_good_bad(c, all_bad, all_good);
    CHECK(g2.empty());
    CHECK(b2.size() == c.size());

    auto [g3, b3] = split_good_bad(c, mixed, all_good);
    double total = 0.0, parts = 0.0;
    for (const auto& [k, v] : c) total += v * v;
    for (const auto& [k, v] : g3) parts += v * v;
    for (const auto& [k, v] : b3) parts += v * v;
    CHECK(parts == doctest::Approx(total).epsilon(1e-12));
    CHECK(l2_norm(b3) <= l2_norm(c) + 1e-12);
    for (const auto& [k, v] : g3) CHECK(c.at(k) == v);
}
