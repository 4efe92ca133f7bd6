#pragma once

#include <cstdint>
#include <map>
#include <tuple>
#include <vector>

#include "carleson/dyadic.hpp"

namespace carleson {

struct GoodnessParams {
    int r = 2;               // separation-in-scale parameter
    double gamma = 0.25;     // alpha / (2 (alpha + t_lambda))
    double c_script = 0.0;   // 2 A0 C_Q C_K

    static GoodnessParams make(double alpha, double t_lambda, double a0, double c_k, int r);
};

struct GoodnessMask {
    std::vector<bool> good;  // by cube id of the classified system

    bool is_good(int cube_id) const { return good[static_cast<std::size_t>(cube_id)]; }
    int bad_count() const;
};

// Q in sys_d is bad iff some Q' in sys_dp with l(Q) <= delta^r l(Q') has both
// rho(Q,Q') and rho(Q, X \ Q') below delta * C * l(Q)^gamma * l(Q')^{1-gamma}
// (distance to an empty set is +inf).
GoodnessMask classify(const DyadicSystem& sys_d, const DyadicSystem& sys_dp,
                      const PointSpace& space, const GoodnessParams& params);

struct BadnessReport {
    std::vector<int> cube_ids;        // cubes of the fixed system
    std::vector<double> frequency;    // empirical P(bad) per cube
    int trials = 0;
    double mean_frequency = 0.0;
    double stderr_mean = 0.0;
};

// Fixed grid from `seed`, `trials` independent grids D' from derived seeds.
BadnessReport badness_probability(const PointSpace& space, double delta, int gen_min, int gen_max,
                                  const GoodnessParams& params, int trials, std::uint64_t seed);

// default separation parameter: the smallest r in [1, r_max] whose empirical
// mean badness over a calibration run stays below `target` (r_max when none)
int calibrate_r(const PointSpace& space, double delta, int gen_min, int gen_max,
                const GoodnessParams& proto, int trials, std::uint64_t seed, double target = 0.1,
                int r_max = 6);

// Two-parameter coefficient field keyed (cube1, u1, cube2, u2).
using ProductKey = std::tuple<int, int, int, int>;
using ProductField = std::map<ProductKey, double>;

// good part keeps entries where both cubes are good; parts sum to the input
std::pair<ProductField, ProductField> split_good_bad(const ProductField& c,
                                                     const GoodnessMask& mask1,
                                                     const GoodnessMask& mask2);

double l2_norm(const ProductField& c);

}  // namespace carleson
