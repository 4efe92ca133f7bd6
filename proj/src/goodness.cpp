#include "carleson/goodness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carleson/errors.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GoodnessParams GoodnessParams::make(double alpha, double t_lambda, double a0, double c_k, int r) {
    GoodnessParams p;
    p.r = r;
    p.gamma = alpha / (2.0 * (alpha + t_lambda));
    p.c_script = 2.0 * a0 * cube_outer_constant(a0) * c_k;
    return p;
}

int GoodnessMask::bad_count() const {
    int n = 0;
    for (bool g : good)
        if (!g) ++n;
    return n;
}

GoodnessMask classify(const DyadicSystem& sys_d, const DyadicSystem& sys_dp,
                      const PointSpace& space, const GoodnessParams& params) {
    if (sys_d.delta != sys_dp.delta)
        throw Error(errc::mismatched_delta, "grids built with different delta");
    const double delta = sys_d.delta;
    const double a0 = space.a0();
    const double big_c_q = cube_outer_constant(a0);

    GoodnessMask mask;
    mask.good.assign(sys_d.cubes.size(), true);

    for (const Cube& q : sys_d.cubes) {
        const double lq = q.side;
        bool bad = false;
        for (int gp = sys_dp.gen_min; gp < sys_dp.gen_max && !bad; ++gp) {
            if (q.gen < gp + params.r) continue;  // need l(Q) <= delta^r l(Q')
            const double lqp = sys_dp.side(gp);
            const double thr =
                delta * params.c_script * std::pow(lq, params.gamma) * std::pow(lqp, 1.0 - params.gamma);
            for (int qp : sys_dp.level(gp)) {
                // center-based lower bound on the set distance prunes far pairs:
                // rho(Q,Q') >= [rho(centers) - A0 C_Q l(Q) - A0^2 C_Q l(Q')] / A0^2
                const double dc = space.rho(q.center, sys_dp.cube(qp).center);
                const double lower =
                    (dc - a0 * big_c_q * lq - a0 * a0 * big_c_q * lqp) / (a0 * a0);
                if (lower > thr) continue;

                const bool q_in_qp = sys_dp.subset_external(q.members, qp);
                double d_near, d_far;
                if (q_in_qp) {
                    d_near = 0.0;  // Q inside Q'
                    // min over members of Q of the precomputed distance to X \ Q'
                    d_far = kInf;
                    for (PointId p : q.members) {
                        d_far = std::min(d_far, sys_dp.point_complement_distance(qp, p));
                        if (d_far <= thr) break;
                    }
                } else if (sys_dp.overlaps_external(q.members, qp)) {
                    d_near = 0.0;  // shares a point with Q'
                    d_far = 0.0;   // and has a point outside Q'
                } else {
                    d_far = 0.0;  // disjoint: Q lies in the complement
                    d_near = kInf;
                    for (PointId p : q.members) {
                        for (PointId w : sys_dp.cube(qp).members) {
                            d_near = std::min(d_near, space.rho(p, w));
                            if (d_near <= thr) break;
                        }
                        if (d_near <= thr) break;
                    }
                }
                if (d_near <= thr && d_far <= thr) {
                    bad = true;
                    break;
                }
            }
        }
        if (bad) mask.good[static_cast<std::size_t>(q.id)] = false;
    }
    return mask;
}

BadnessReport badness_probability(const PointSpace& space, double delta, int gen_min, int gen_max,
                                  const GoodnessParams& params, int trials, std::uint64_t seed) {
    if (trials < 1) throw Error(errc::bad_config, "trials must be >= 1");
    const DyadicSystem fixed = build_system(space, delta, gen_min, gen_max, {seed});

    BadnessReport rep;
    rep.trials = trials;
    rep.cube_ids.reserve(fixed.cubes.size());
    for (const Cube& q : fixed.cubes) rep.cube_ids.push_back(q.id);
    std::vector<int> bad_counts(fixed.cubes.size(), 0);

    for (int t = 0; t < trials; ++t) {
        const DyadicSystem dp =
            build_system(space, delta, gen_min, gen_max, {mix_seed(seed, 0xbad0 + static_cast<std::uint64_t>(t))});
        const GoodnessMask mask = classify(fixed, dp, space, params);
        for (std::size_t i = 0; i < fixed.cubes.size(); ++i)
            if (!mask.good[i]) bad_counts[i]++;
    }

    rep.frequency.resize(fixed.cubes.size());
    double mean = 0.0;
    for (std::size_t i = 0; i < fixed.cubes.size(); ++i) {
        rep.frequency[i] = static_cast<double>(bad_counts[i]) / trials;
        mean += rep.frequency[i];
    }
    mean /= static_cast<double>(fixed.cubes.size());
    rep.mean_frequency = mean;
    double var = 0.0;
    for (double f : rep.frequency) var += (f - mean) * (f - mean);
    var /= static_cast<double>(fixed.cubes.size());
    rep.stderr_mean = std::sqrt(var / static_cast<double>(fixed.cubes.size()));
    return rep;
}

int calibrate_r(const PointSpace& space, double delta, int gen_min, int gen_max,
                const GoodnessParams& proto, int trials, std::uint64_t seed, double target,
                int r_max) {
    for (int r = 1; r <= r_max; ++r) {
        GoodnessParams p = proto;
        p.r = r;
        const auto rep = badness_probability(space, delta, gen_min, gen_max, p, trials, seed);
        if (rep.mean_frequency < target) return r;
    }
    return r_max;
}

std::pair<ProductField, ProductField> split_good_bad(const ProductField& c,
                                                     const GoodnessMask& mask1,
                                                     const GoodnessMask& mask2) {
    ProductField good, bad;
    for (const auto& [key, v] : c) {
        const auto& [q1, u1, q2, u2] = key;
        if (mask1.is_good(q1) && mask2.is_good(q2))
            good[key] = v;
        else
            bad[key] = v;
    }
    return {std::move(good), std::move(bad)};
}

double l2_norm(const ProductField& c) {
    double s = 0.0;
    for (const auto& [key, v] : c) s += v * v;
    return std::sqrt(s);
}

}  // namespace carleson
