#pragma once

#include <complex>
#include <vector>

#include "carleson/dyadic.hpp"
#include "carleson/space.hpp"

namespace carleson {

struct BidiscPoint {
    std::complex<double> z1, z2;
    double mass = 0.0;
};

using DiscreteBidiscMeasure = std::vector<BidiscPoint>;

// truncated factor kernel K^s_lambda(z) = sum_{n=0}^{N} (n+1)^{-s} (conj(lambda) z)^n
std::complex<double> kernel_factor_eval(double s, std::complex<double> lambda,
                                        std::complex<double> z, int n_max);

// product kernel on the bidisc; OutsideBidisc unless |lambda_i|, |z_i| < 1
std::complex<double> kernel_eval(double s1, double s2, std::complex<double> l1,
                                 std::complex<double> l2, std::complex<double> z1,
                                 std::complex<double> z2, int n_max);

// largest eigenvalue of the quadratic form f -> int |f|^2 dmu relative to the
// J_s norm on degree-<=N polynomials; exact at the truncation level
double embedding_constant(const DiscreteBidiscMeasure& mu, double s1, double s2, int n_max);

struct TMuSResult {
    std::vector<std::vector<double>> matrix;  // Re K^s_{z_i}(z_j)
    double norm_re = 0.0;                     // L2(mu) norm of the Re-kernel operator
    double norm_complex = 0.0;                // norm of the complex-kernel operator
    bool converged = true;
};

TMuSResult t_mu_s(const DiscreteBidiscMeasure& mu, double s1, double s2, int n_max);

// factor coordinates as planar point spaces with the induced Euclidean metric
struct BidiscInstance {
    DiscreteBidiscMeasure measure;
    PointSpace x1, x2;                              // distinct factor coordinates
    std::vector<std::pair<int, int>> factor_index;  // per measure point
    bool product_form = false;                      // mass matrix is rank one
};

BidiscInstance make_bidisc_instance(const DiscreteBidiscMeasure& mu);

// global testing of the four T_{mu,s} variants over rectangle unions of the
// factor grids; constants int |S 1_Omega|^2 dmu / mu(Omega)
struct BidiscTestingReport {
    double c_t = 0.0, c_tstar = 0.0, c_t1 = 0.0, c_t1star = 0.0;
    double max_constant() const;
};

BidiscTestingReport bidisc_global_testing(const BidiscInstance& inst, double s1, double s2,
                                          int n_max, const DyadicSystem& grid1,
                                          const DyadicSystem& grid2,
                                          const std::vector<std::vector<std::pair<int, int>>>& omegas);

// Journe maximal rectangles of an open set over a product grid
struct JourneReport {
    std::vector<std::pair<int, int>> m1, m2, m;  // maximal rectangle families
    std::vector<int> i2_hat;                     // per rect of m1: enlarged cube in grid2
    double covering_sum = 0.0;                   // sum mu(R) w(l(I2)/l(I2hat)), w(x) = sqrt(x)
    double omega_mass = 0.0;
    double constant = 0.0;                       // covering_sum / omega_mass
};

JourneReport journe_rectangles(const PointSpace& space1, const PointSpace& space2,
                               const DyadicSystem& grid1, const DyadicSystem& grid2,
                               const std::vector<std::pair<int, int>>& omega_rects);

// radial-angular sample of the disc of radius rmax (< 1)
std::vector<std::complex<double>> disc_grid(int rings, int sectors, double rmax);

// planar point space over complex coordinates, Euclidean metric, A0 = 1
PointSpace disc_space(const std::vector<std::complex<double>>& pts,
                      const std::vector<double>& weights);

}  // namespace carleson
