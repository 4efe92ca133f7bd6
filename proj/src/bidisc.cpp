#include "carleson/bidisc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/Dense>

#include "carleson/errors.hpp"
#include "carleson/kernels.hpp"

namespace carleson {

std::complex<double> kernel_factor_eval(double s, std::complex<double> lambda,
                                        std::complex<double> z, int n_max) {
    const std::complex<double> q = std::conj(lambda) * z;
    std::complex<double> sum = 0.0;
    std::complex<double> pw = 1.0;
    for (int n = 0; n <= n_max; ++n) {
        sum += std::pow(static_cast<double>(n + 1), -s) * pw;
        pw *= q;
    }
    return sum;
}

std::complex<double> kernel_eval(double s1, double s2, std::complex<double> l1,
                                 std::complex<double> l2, std::complex<double> z1,
                                 std::complex<double> z2, int n_max) {
    if (std::abs(l1) >= 1.0 || std::abs(l2) >= 1.0 || std::abs(z1) >= 1.0 || std::abs(z2) >= 1.0)
        throw Error(errc::outside_bidisc, "kernel arguments must lie strictly inside the bidisc");
    return kernel_factor_eval(s1, l1, z1, n_max) * kernel_factor_eval(s2, l2, z2, n_max);
}

namespace {

// moment matrix M[(n),(m)] = int z^n conj(z)^m dmu over the truncated range
Eigen::MatrixXcd moment_matrix(const DiscreteBidiscMeasure& mu, int n_max) {
    const int d = n_max + 1;
    const int dim = d * d;
    // V[(n1,n2)][p] = z1_p^{n1} z2_p^{n2}
    Eigen::MatrixXcd v(dim, static_cast<int>(mu.size()));
    for (int p = 0; p < static_cast<int>(mu.size()); ++p) {
        std::complex<double> pw1 = 1.0;
        for (int n1 = 0; n1 < d; ++n1) {
            std::complex<double> pw2 = 1.0;
            for (int n2 = 0; n2 < d; ++n2) {
                v(n1 * d + n2, p) = pw1 * pw2;
                pw2 *= mu[static_cast<std::size_t>(p)].z2;
            }
            pw1 *= mu[static_cast<std::size_t>(p)].z1;
        }
    }
    Eigen::VectorXd masses(static_cast<int>(mu.size()));
    for (int p = 0; p < static_cast<int>(mu.size()); ++p)
        masses(p) = mu[static_cast<std::size_t>(p)].mass;
    return v * masses.asDiagonal() * v.adjoint();
}

Eigen::VectorXd js_weights(double s1, double s2, int n_max) {
    const int d = n_max + 1;
    Eigen::VectorXd b(d * d);
    for (int n1 = 0; n1 < d; ++n1)
        for (int n2 = 0; n2 < d; ++n2)
            b(n1 * d + n2) = std::pow(static_cast<double>(n1 + 1), s1) *
                             std::pow(static_cast<double>(n2 + 1), s2);
    return b;
}

}  // namespace

double embedding_constant(const DiscreteBidiscMeasure& mu, double s1, double s2, int n_max) {
    if (n_max < 0) throw Error(errc::bad_config, "n_max must be >= 0");
    if (mu.empty()) return 0.0;
    for (const auto& p : mu)
        if (std::abs(p.z1) >= 1.0 || std::abs(p.z2) >= 1.0)
            throw Error(errc::outside_bidisc, "measure point outside the bidisc");
    const Eigen::MatrixXcd a = moment_matrix(mu, n_max);
    const Eigen::VectorXd b = js_weights(s1, s2, n_max);
    Eigen::VectorXd binvsq = b.array().rsqrt();
    Eigen::MatrixXcd scaled = binvsq.asDiagonal() * a * binvsq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(scaled);
    return std::max(0.0, es.eigenvalues().maxCoeff());
}

TMuSResult t_mu_s(const DiscreteBidiscMeasure& mu, double s1, double s2, int n_max) {
    TMuSResult res;
    const int p = static_cast<int>(mu.size());
    if (p == 0) return res;
    Eigen::MatrixXcd a(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j)
            a(i, j) = kernel_eval(s1, s2, mu[static_cast<std::size_t>(i)].z1,
                                  mu[static_cast<std::size_t>(i)].z2,
                                  mu[static_cast<std::size_t>(j)].z1,
                                  mu[static_cast<std::size_t>(j)].z2, n_max);
    res.matrix.assign(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(p)));
    // L2(mu) norm: scale by sqrt of the masses on both sides
    std::vector<std::vector<double>> scaled_re(static_cast<std::size_t>(p),
                                               std::vector<double>(static_cast<std::size_t>(p)));
    Eigen::MatrixXcd scaled_c(p, p);
    for (int i = 0; i < p; ++i) {
        const double wi = std::sqrt(mu[static_cast<std::size_t>(i)].mass);
        for (int j = 0; j < p; ++j) {
            const double wj = std::sqrt(mu[static_cast<std::size_t>(j)].mass);
            res.matrix[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = a(i, j).real();
            scaled_re[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                wi * a(i, j).real() * wj;
            scaled_c(i, j) = wi * a(i, j) * wj;
        }
    }
    const auto nrm = matrix_l2_norm(scaled_re, 20000, 1e-12);
    res.norm_re = nrm.value;
    res.converged = nrm.converged;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(scaled_c);
    res.norm_complex = std::max(std::abs(es.eigenvalues().minCoeff()),
                                std::abs(es.eigenvalues().maxCoeff()));
    return res;
}

BidiscInstance make_bidisc_instance(const DiscreteBidiscMeasure& mu) {
    BidiscInstance inst;
    inst.measure = mu;
    std::map<std::pair<double, double>, int> ix1, ix2;
    std::vector<std::complex<double>> pts1, pts2;
    for (const auto& p : mu) {
        const auto k1 = std::make_pair(p.z1.real(), p.z1.imag());
        if (ix1.find(k1) == ix1.end()) {
            ix1[k1] = static_cast<int>(pts1.size());
            pts1.push_back(p.z1);
        }
        const auto k2 = std::make_pair(p.z2.real(), p.z2.imag());
        if (ix2.find(k2) == ix2.end()) {
            ix2[k2] = static_cast<int>(pts2.size());
            pts2.push_back(p.z2);
        }
    }
    std::vector<double> w1(pts1.size(), 0.0), w2(pts2.size(), 0.0);
    std::vector<std::vector<double>> mass_grid(pts1.size(), std::vector<double>(pts2.size(), 0.0));
    for (const auto& p : mu) {
        const int i = ix1[{p.z1.real(), p.z1.imag()}];
        const int j = ix2[{p.z2.real(), p.z2.imag()}];
        inst.factor_index.push_back({i, j});
        w1[static_cast<std::size_t>(i)] += p.mass;
        w2[static_cast<std::size_t>(j)] += p.mass;
        mass_grid[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] += p.mass;
    }
    inst.x1 = disc_space(pts1, w1);
    inst.x2 = disc_space(pts2, w2);
    // product form: all 2x2 minors of the mass grid vanish
    inst.product_form = true;
    for (std::size_t i = 0; i < pts1.size() && inst.product_form; ++i)
        for (std::size_t ip = i + 1; ip < pts1.size() && inst.product_form; ++ip)
            for (std::size_t j = 0; j < pts2.size() && inst.product_form; ++j)
                for (std::size_t jp = j + 1; jp < pts2.size(); ++jp) {
                    const double det = mass_grid[i][j] * mass_grid[ip][jp] -
                                       mass_grid[i][jp] * mass_grid[ip][j];
                    const double scale = std::max({mass_grid[i][j] * mass_grid[ip][jp],
                                                   mass_grid[i][jp] * mass_grid[ip][j], 1e-300});
                    if (std::abs(det) > 1e-9 * scale) {
                        inst.product_form = false;
                        break;
                    }
                }
    return inst;
}

double BidiscTestingReport::max_constant() const {
    return std::max(std::max(c_t, c_tstar), std::max(c_t1, c_t1star));
}

BidiscTestingReport bidisc_global_testing(const BidiscInstance& inst, double s1, double s2,
                                          int n_max, const DyadicSystem& grid1,
                                          const DyadicSystem& grid2,
                                          const std::vector<std::vector<std::pair<int, int>>>& omegas) {
    const int p = static_cast<int>(inst.measure.size());
    // factor kernel matrices over the measure points
    std::vector<std::vector<std::complex<double>>> a1(static_cast<std::size_t>(p)),
        a2(static_cast<std::size_t>(p));
    for (int i = 0; i < p; ++i) {
        a1[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(p));
        a2[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(p));
        for (int j = 0; j < p; ++j) {
            a1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = kernel_factor_eval(
                s1, inst.measure[static_cast<std::size_t>(i)].z1,
                inst.measure[static_cast<std::size_t>(j)].z1, n_max);
            a2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = kernel_factor_eval(
                s2, inst.measure[static_cast<std::size_t>(i)].z2,
                inst.measure[static_cast<std::size_t>(j)].z2, n_max);
        }
    }
    // T has kernel Re(K1 K2); the partial adjoint conjugates the first factor
    const auto kernel_entry = [&](int variant, int i, int j) {
        const auto& k1 = a1[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        const auto& k2 = a2[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        switch (variant) {
            case 0: return (k1 * k2).real();             // T
            case 1: return (k1 * k2).real();             // T* (symmetric kernel)
            case 2: return (std::conj(k1) * k2).real();  // T1
            default: return (std::conj(k1) * k2).real(); // T1* (symmetric)
        }
    };

    BidiscTestingReport rep;
    double* slots[4] = {&rep.c_t, &rep.c_tstar, &rep.c_t1, &rep.c_t1star};
    for (int variant = 0; variant < 4; ++variant) {
        double worst = 0.0;
        for (const auto& omega : omegas) {
            // membership of each measure point in the rectangle union
            std::vector<bool> inside(static_cast<std::size_t>(p), false);
            double omega_mass = 0.0;
            for (int t = 0; t < p; ++t) {
                const auto [i1, i2] = inst.factor_index[static_cast<std::size_t>(t)];
                for (const auto& [c1, c2] : omega)
                    if (grid1.contains(c1, i1) && grid2.contains(c2, i2)) {
                        inside[static_cast<std::size_t>(t)] = true;
                        break;
                    }
                if (inside[static_cast<std::size_t>(t)])
                    omega_mass += inst.measure[static_cast<std::size_t>(t)].mass;
            }
            if (omega_mass <= 0.0) continue;
            double lhs = 0.0;
            for (int i = 0; i < p; ++i) {
                double sf = 0.0;
                for (int j = 0; j < p; ++j)
                    if (inside[static_cast<std::size_t>(j)])
                        sf += kernel_entry(variant, i, j) *
                              inst.measure[static_cast<std::size_t>(j)].mass;
                lhs += sf * sf * inst.measure[static_cast<std::size_t>(i)].mass;
            }
            worst = std::max(worst, lhs / omega_mass);
        }
        *slots[variant] = worst;
    }
    return rep;
}

JourneReport journe_rectangles(const PointSpace& space1, const PointSpace& space2,
                               const DyadicSystem& grid1, const DyadicSystem& grid2,
                               const std::vector<std::pair<int, int>>& omega_rects) {
    if (omega_rects.empty()) throw Error(errc::not_rect_union, "empty rectangle list");
    const int n1 = space1.size();
    const int n2 = space2.size();
    for (const auto& [a, b] : omega_rects)
        if (a < 0 || a >= static_cast<int>(grid1.cubes.size()) || b < 0 ||
            b >= static_cast<int>(grid2.cubes.size()))
            throw Error(errc::not_rect_union, "rectangle refers to unknown cubes");

    std::vector<bool> covered(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2), false);
    for (const auto& [a, b] : omega_rects)
        for (PointId p1 : grid1.cube(a).members)
            for (PointId p2 : grid2.cube(b).members)
                covered[static_cast<std::size_t>(p1) * static_cast<std::size_t>(n2) +
                        static_cast<std::size_t>(p2)] = true;

    const auto cell_covered = [&](PointId p1, PointId p2) {
        return covered[static_cast<std::size_t>(p1) * static_cast<std::size_t>(n2) +
                       static_cast<std::size_t>(p2)];
    };
    const auto rect_inside = [&](int a, int b) {
        for (PointId p1 : grid1.cube(a).members)
            for (PointId p2 : grid2.cube(b).members)
                if (!cell_covered(p1, p2)) return false;
        return true;
    };
    const auto rect_omega_mass = [&](int a, int b) {
        double s = 0.0;
        for (PointId p1 : grid1.cube(a).members) {
            const double w1 = space1.weight(p1);
            if (w1 == 0.0) continue;
            for (PointId p2 : grid2.cube(b).members)
                if (cell_covered(p1, p2)) s += w1 * space2.weight(p2);
        }
        return s;
    };

    double omega_mass = 0.0;
    for (PointId p1 = 0; p1 < n1; ++p1)
        for (PointId p2 = 0; p2 < n2; ++p2)
            if (cell_covered(p1, p2)) omega_mass += space1.weight(p1) * space2.weight(p2);

    JourneReport rep;
    rep.omega_mass = omega_mass;
    for (const Cube& q1 : grid1.cubes) {
        for (const Cube& q2 : grid2.cubes) {
            if (!rect_inside(q1.id, q2.id)) continue;
            const bool max1 = q1.parent < 0 || !rect_inside(q1.parent, q2.id);
            const bool max2 = q2.parent < 0 || !rect_inside(q1.id, q2.parent);
            if (max1) rep.m1.push_back({q1.id, q2.id});
            if (max2) rep.m2.push_back({q1.id, q2.id});
            if (max1 && max2) rep.m.push_back({q1.id, q2.id});
        }
    }

    // enlargement: coarsest ancestor of I2 with mu((I1 x I2hat) cap Omega) > mu/2
    for (const auto& [a, b] : rep.m1) {
        int best = b;
        for (int anc = b; anc >= 0; anc = grid2.cube(anc).parent) {
            const double m = grid1.cube(a).mass * grid2.cube(anc).mass;
            if (m > 0.0 && rect_omega_mass(a, anc) > 0.5 * m) best = anc;
        }
        rep.i2_hat.push_back(best);
        const double mr = grid1.cube(a).mass * grid2.cube(b).mass;
        const double ratio = grid2.cube(b).side / grid2.cube(best).side;
        rep.covering_sum += mr * std::sqrt(ratio);
    }
    rep.constant = omega_mass > 0.0 ? rep.covering_sum / omega_mass : 0.0;
    return rep;
}

std::vector<std::complex<double>> disc_grid(int rings, int sectors, double rmax) {
    std::vector<std::complex<double>> pts;
    pts.push_back(0.0);
    for (int r = 1; r <= rings; ++r) {
        const double rad = rmax * static_cast<double>(r) / rings;
        for (int s = 0; s < sectors; ++s) {
            const double th = 2.0 * 3.14159265358979323846 * s / sectors;
            pts.push_back(std::polar(rad, th));
        }
    }
    return pts;
}

PointSpace disc_space(const std::vector<std::complex<double>>& pts,
                      const std::vector<double>& weights) {
    std::vector<std::vector<double>> coords;
    for (const auto& z : pts) coords.push_back({z.real(), z.imag()});
    return PointSpace::euclidean(std::move(coords), weights);
}

}  // namespace carleson
