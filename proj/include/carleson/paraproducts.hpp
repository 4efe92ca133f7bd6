#pragma once

#include <map>
#include <vector>

#include "carleson/product.hpp"

namespace carleson {

// ||a||_{BMO_kappa^2(mu)} over the canonical ball family (sandwich balls of
// every cube of `ball_source`); the optimal b_B is the mu-average, so the
// evaluation is exact per ball.
double bmo_kappa2_norm(const PointSpace& space, const std::vector<double>& a, double kappa,
                       const DyadicSystem& ball_source);

// 2-atoms on a ball: mean zero, supported in B, ||.||_2 <= mu(B)^{-1/2};
// point-pair and sub-indicator differences, normalized to the sharp bound
std::vector<std::vector<double>> make_atoms(const PointSpace& space, const Ball& b,
                                            int max_atoms = 8);

// one-parameter paraproduct (fixed u2 != 0):
//   Pi_a w = sum over good Q2 with S(Q2) defined of <w>_{S(Q2)} <a,h_{u2}^{Q2}> h_{u2}^{Q2}
std::vector<double> pi_one(const FactorFrame& f2, const std::vector<double>& a,
                           const std::vector<double>& omega, int u2);
// adjoint, assembled independently:
//   Pi* v = sum <v, h_{u2}^{Q2}> <a,h_{u2}^{Q2}> chi_{S(Q2)} / mu(S(Q2))
std::vector<double> pi_one_adjoint(const FactorFrame& f2, const std::vector<double>& a,
                                   const std::vector<double>& v, int u2);

// alpha_Q = mu(Q)^{-1} sum_{good Q2, S(Q2)=Q} |<a, h_{u2}^{Q2}>|^2, by shift-grid cube
std::map<int, double> carleson_boxes(const FactorFrame& f2, const std::vector<double>& a, int u2);

// smallest C with sum_{Q c Q'} alpha_Q mu(Q) <= C mu(Q') ||a||^2 over all top cubes
double carleson_box_constant(const FactorFrame& f2, const std::vector<double>& a, int u2,
                             double symbol_norm);

struct RatioReport {
    double empirical_norm = 0.0;   // max over samples of |Pi w| / |w|
    double operator_norm = 0.0;    // refined by power iteration
    double symbol_norm = 0.0;      // BMO-type norm of the symbol
    double ratio = 0.0;            // operator_norm / symbol_norm (0 when symbol 0)
    double box_constant = 0.0;     // Carleson-box constant (one-parameter case)
    bool converged = true;
};

RatioReport pi_one_norm_check(const FactorFrame& f2, const std::vector<double>& a, int u2,
                              const std::vector<std::vector<double>>& samples, double kappa);

// full paraproduct (fixed u1, u2):
//   Pi_b w = sum over good pairs <w>_{S(Q1) x S(Q2)} b_{Q1,u1,Q2,u2} h_{u1}^{Q1} x h_{u2}^{Q2}
std::vector<double> pi_full(const ProductFrame& fr, const ProductField& b,
                            const std::vector<double>& w, int u1, int u2);
std::vector<double> pi_full_adjoint(const ProductFrame& fr, const ProductField& b,
                                    const std::vector<double>& v, int u1, int u2);

RatioReport pi_full_norm_check(const ProductFrame& fr, const ProductField& b, int u1, int u2,
                               const std::vector<std::vector<double>>& samples);

// mixed paraproduct on a frame whose factor 2 swaps the grid roles
// (f2.grid = D2', shifted into D2):
//   Pi w = sum <w, h_{u1}^{Q1} x chi_{Q2}/mu(Q2)> b_{Q1,u1,Q2',u2'}
//              chi_{S(Q1)}/mu(S(Q1)) x h_{u2'}^{Q2'},   Q2 = S(Q2')
std::vector<double> pi_mixed(const ProductFrame& mixed_fr, const ProductField& b,
                             const std::vector<double>& w, int u1, int u2p);

RatioReport pi_mixed_bound_check(
    const ProductFrame& mixed_fr, const ProductField& b, int u1, int u2p,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& samples);

}  // namespace carleson
