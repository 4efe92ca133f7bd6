#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carleson/kernels.hpp"
#include "carleson/product.hpp"

namespace carleson {

struct TestingCondition {
    std::string name;
    double constant = 0.0;  // smallest C making the inequality hold on the family
    int family_size = 0;
    double budget = 0.0;    // 0 = unbudgeted
    bool pass = true;
};

struct TestingReport {
    std::vector<TestingCondition> conditions;

    bool all_pass() const {
        for (const auto& c : conditions)
            if (!c.pass) return false;
        return true;
    }
    const TestingCondition* find(const std::string& name) const {
        for (const auto& c : conditions)
            if (c.name == name) return &c;
        return nullptr;
    }
};

struct BallPair {
    Ball b1, b2;
};

// Full weak boundedness and the partial x BMO conditions (plus their
// regularized-bump and point-mass variants) over a family of ball pairs.
TestingReport weak_boundedness(const TruncatedOperator& op, double lambda_dilation,
                               const std::vector<BallPair>& family, double bump_eps = 0.5);

struct PairingDiagnostics {
    double a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0;
    double total() const { return a1 + a2 + a3 + a4; }
};

// <T1, h_{u1}^{Q1} x h_{u2}^{Q2}> = A1+A2+A3+A4 through the balls U, V;
// requires C_K B(Q_i) c U, V (BallTooSmall otherwise).
double t1_pairing(const TruncatedOperator& op, const ProductFrame& fr, int q1, int u1, int q2,
                  int u2, const Ball& u_ball, const Ball& v_ball,
                  PairingDiagnostics* diag = nullptr);

// coefficient field <S1, h x h> over usable rectangles for one of the four
// operators, evaluated through t1_pairing with whole-space balls
ProductField s1_coefficients(const TruncatedOperator& op, const ProductFrame& fr,
                             OperatorVariant variant);

double s1_bmo_norm(const TruncatedOperator& op, const ProductFrame& fr, OperatorVariant variant,
                   const std::vector<AdmissibleOpenSet>& candidates);

// per variant: smallest C with int |S(1_Omega)|^2 dmu <= C mu(Omega)
TestingReport global_testing(const TruncatedOperator& op, const ProductFrame& fr,
                             const std::vector<AdmissibleOpenSet>& family);

struct SchurMatrices {
    // rows indexed by cubes of the Haar grid, columns by cubes of the shift grid
    std::vector<std::vector<double>> a_sep;
    std::vector<std::vector<double>> a_in;
    double sep_norm = 0.0;
    double in_norm = 0.0;
    bool converged = true;
};

// A^sep over separated pairs and A^in over nested pairs of (grid, shift_grid),
// with their l^2 operator norms by power iteration
SchurMatrices schur_matrices(const PointSpace& space, const DominatingFunction& dom,
                             const DyadicSystem& grid, const DyadicSystem& shift_grid,
                             double alpha, const GoodnessParams& params);

struct SurgerySets {
    std::vector<PointId> delta;        // Q cap Q'
    std::vector<PointId> delta_q;      // near the boundary of Q (whole space)
    std::vector<PointId> delta_qp;     // near the boundary of Q'
    std::vector<PointId> q_b, qp_b;    // near some adjacent-scale boundary
    std::vector<PointId> q_s, qp_s;    // separated parts
    std::vector<PointId> q_d, qp_d;    // boundary parts
    std::vector<PointId> delta_tilde;  // interior of the intersection
};

// decomposition Q = Q_s u Q_d u Delta for adjacent-scale cubes Q in grid,
// Q' in shift grid; NotAdjacentScales unless delta^r l(Q') <= l(Q) <= l(Q')
SurgerySets surgery(const PointSpace& space, const DyadicSystem& grid,
                    const DyadicSystem& shift_grid, int q, int qp, double eps, int r);

struct SurgeryProbabilityReport {
    std::vector<double> frequency;  // per point: empirical P(x in delta_Q)
    double mean = 0.0;
    double stderr_mean = 0.0;
    int trials = 0;
};

// over `trials` random grids: frequency of each point lying within eps*l(Q)
// of the complement of its generation-`gen` cube
SurgeryProbabilityReport surgery_probability(const PointSpace& space, double delta, int gen_min,
                                             int gen_max, int gen, double eps, int trials,
                                             std::uint64_t seed);

struct BallCovering {
    std::vector<Ball> balls;
    double coverage = 0.0;   // mu-fraction covered
    double separation = 0.0; // required minimum set distance c(theta,upsilon) theta^k
    int retries = 0;
    bool achieved = false;   // MaxRetries when false
};

// greedy randomized packing at scale theta^k with radii in
// [c(theta,upsilon), C] * theta^k; retried across derived seeds until the
// covered mass reaches 1 - upsilon
BallCovering ball_covering(const PointSpace& space, double theta, int k, double upsilon,
                           std::uint64_t seed, int max_retries = 20);

}  // namespace carleson
