#include "carleson/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "carleson/errors.hpp"
#include "carleson/rng.hpp"

namespace carleson {

FactorKernel inv_lambda_kernel(const PointSpace& space, const DominatingFunction& dom,
                               double alpha, double c_k) {
    FactorKernel k;
    const PointSpace* sp = &space;
    const DominatingFunction d = dom;
    k.eval = [sp, d](PointId x, PointId y) {
        const double r = sp->rho(x, y);
        return r > 0.0 ? 1.0 / d(x, r) : 0.0;
    };
    k.alpha = alpha;
    k.c_k = c_k;
    k.size_c = 32.0 * std::pow(2.0, dom.t_lambda());
    k.label = "inv_lambda";
    return k;
}

KernelSpec product_kernel(const FactorKernel& k1, const FactorKernel& k2) {
    KernelSpec k;
    k.product_form = true;
    k.k1 = k1;
    k.k2 = k2;
    k.size_c = k1.size_c * k2.size_c;
    k.alpha1 = k1.alpha;
    k.alpha2 = k2.alpha;
    k.c_k = std::max(k1.c_k, k2.c_k);
    auto e1 = k1.eval;
    auto e2 = k2.eval;
    k.eval = [e1, e2](PointId x1, PointId x2, PointId y1, PointId y2) {
        return e1(x1, y1) * e2(x2, y2);
    };
    return k;
}

TruncatedOperator make_operator(const KernelSpec& k, const PointSpace& s1, const PointSpace& s2,
                                double tau) {
    TruncatedOperator op;
    op.kernel = k;
    op.space1 = &s1;
    op.space2 = &s2;
    op.tau = tau;
    return op;
}

double TruncatedOperator::entry(PointId x1, PointId x2, PointId y1, PointId y2) const {
    if (x1 == y1 || x2 == y2) return 0.0;  // diagonal convention
    if (space1->rho(x1, y1) <= tau || space2->rho(x2, y2) <= tau) return 0.0;
    switch (variant) {
        case OperatorVariant::T:
            return kernel.eval(x1, x2, y1, y2);
        case OperatorVariant::TStar:
            return kernel.eval(y1, y2, x1, x2);
        case OperatorVariant::T1:
            return kernel.eval(y1, x2, x1, y2);
        case OperatorVariant::T1Star:
            return kernel.eval(x1, y2, y1, x2);
    }
    return 0.0;
}

double TruncatedOperator::factor1_entry(PointId x1, PointId y1) const {
    if (x1 == y1 || space1->rho(x1, y1) <= tau) return 0.0;
    const bool transpose = variant == OperatorVariant::TStar || variant == OperatorVariant::T1;
    return transpose ? kernel.k1.eval(y1, x1) : kernel.k1.eval(x1, y1);
}

double TruncatedOperator::factor2_entry(PointId x2, PointId y2) const {
    if (x2 == y2 || space2->rho(x2, y2) <= tau) return 0.0;
    const bool transpose = variant == OperatorVariant::TStar || variant == OperatorVariant::T1Star;
    return transpose ? kernel.k2.eval(y2, x2) : kernel.k2.eval(x2, y2);
}

std::vector<double> apply(const TruncatedOperator& op, const ProductFrame& fr,
                          const std::vector<double>& f) {
    const int n1 = fr.n1();
    const int n2 = fr.n2();
    std::vector<double> out(fr.cells(), 0.0);
    if (op.product_fast_path()) {
        // G(x1, y2) = sum_{y1} A(x1,y1) w1(y1) f(y1,y2)
        std::vector<double> g(static_cast<std::size_t>(n1) * static_cast<std::size_t>(n2), 0.0);
        for (PointId x1 = 0; x1 < n1; ++x1) {
            for (PointId y1 = 0; y1 < n1; ++y1) {
                const double a = op.factor1_entry(x1, y1) * fr.f1.space->weight(y1);
                if (a == 0.0) continue;
                const std::size_t rx = static_cast<std::size_t>(x1) * static_cast<std::size_t>(n2);
                const std::size_t ry = static_cast<std::size_t>(y1) * static_cast<std::size_t>(n2);
                for (PointId y2 = 0; y2 < n2; ++y2)
                    g[rx + static_cast<std::size_t>(y2)] += a * f[ry + static_cast<std::size_t>(y2)];
            }
        }
        for (PointId x1 = 0; x1 < n1; ++x1) {
            const std::size_t rx = static_cast<std::size_t>(x1) * static_cast<std::size_t>(n2);
            for (PointId x2 = 0; x2 < n2; ++x2) {
                double s = 0.0;
                for (PointId y2 = 0; y2 < n2; ++y2) {
                    const double b = op.factor2_entry(x2, y2) * fr.f2.space->weight(y2);
                    if (b != 0.0) s += b * g[rx + static_cast<std::size_t>(y2)];
                }
                out[rx + static_cast<std::size_t>(x2)] = s;
            }
        }
        return out;
    }
    for (PointId x1 = 0; x1 < n1; ++x1)
        for (PointId x2 = 0; x2 < n2; ++x2) {
            double s = 0.0;
            for (PointId y1 = 0; y1 < n1; ++y1) {
                const double w1 = fr.f1.space->weight(y1);
                if (w1 == 0.0) continue;
                for (PointId y2 = 0; y2 < n2; ++y2) {
                    const double k = op.entry(x1, x2, y1, y2);
                    if (k != 0.0)
                        s += k * f[cell_index(fr, y1, y2)] * w1 * fr.f2.space->weight(y2);
                }
            }
            out[cell_index(fr, x1, x2)] = s;
        }
    return out;
}

double pair_tensor(const TruncatedOperator& op, const std::vector<double>& f1,
                   const std::vector<double>& f2, const std::vector<double>& g1,
                   const std::vector<double>& g2) {
    const int n1 = op.space1->size();
    const int n2 = op.space2->size();
    if (op.product_fast_path()) {
        double s1 = 0.0;
        for (PointId x1 = 0; x1 < n1; ++x1) {
            const double gx = g1[static_cast<std::size_t>(x1)] * op.space1->weight(x1);
            if (gx == 0.0) continue;
            for (PointId y1 = 0; y1 < n1; ++y1) {
                const double a = op.factor1_entry(x1, y1);
                if (a != 0.0)
                    s1 += a * gx * f1[static_cast<std::size_t>(y1)] * op.space1->weight(y1);
            }
        }
        double s2 = 0.0;
        for (PointId x2 = 0; x2 < n2; ++x2) {
            const double gx = g2[static_cast<std::size_t>(x2)] * op.space2->weight(x2);
            if (gx == 0.0) continue;
            for (PointId y2 = 0; y2 < n2; ++y2) {
                const double b = op.factor2_entry(x2, y2);
                if (b != 0.0)
                    s2 += b * gx * f2[static_cast<std::size_t>(y2)] * op.space2->weight(y2);
            }
        }
        return s1 * s2;
    }
    double s = 0.0;
    for (PointId x1 = 0; x1 < n1; ++x1) {
        const double gx1 = g1[static_cast<std::size_t>(x1)] * op.space1->weight(x1);
        if (gx1 == 0.0) continue;
        for (PointId x2 = 0; x2 < n2; ++x2) {
            const double gx2 = g2[static_cast<std::size_t>(x2)] * op.space2->weight(x2);
            if (gx2 == 0.0) continue;
            for (PointId y1 = 0; y1 < n1; ++y1) {
                const double fy1 = f1[static_cast<std::size_t>(y1)] * op.space1->weight(y1);
                if (fy1 == 0.0) continue;
                for (PointId y2 = 0; y2 < n2; ++y2) {
                    const double k = op.entry(x1, x2, y1, y2);
                    if (k != 0.0)
                        s += k * gx1 * gx2 * fy1 * f2[static_cast<std::size_t>(y2)] *
                             op.space2->weight(y2);
                }
            }
        }
    }
    return s;
}

namespace {

OperatorVariant adjoint_of(OperatorVariant v) {
    switch (v) {
        case OperatorVariant::T: return OperatorVariant::TStar;
        case OperatorVariant::TStar: return OperatorVariant::T;
        case OperatorVariant::T1: return OperatorVariant::T1Star;
        case OperatorVariant::T1Star: return OperatorVariant::T1;
    }
    return OperatorVariant::TStar;
}

std::vector<double> deterministic_start(std::size_t n) {
    std::vector<double> v(n);
    std::uint64_t h = 0x12345678u;
    for (std::size_t i = 0; i < n; ++i) {
        h = mix_seed(h, i);
        v[i] = 1.0 + 0.25 * static_cast<double>(h % 1024) / 1024.0;
    }
    return v;
}

}  // namespace

OperatorNormResult operator_norm(const TruncatedOperator& op, const ProductFrame& fr,
                                 int max_iters, double tol) {
    OperatorNormResult res;
    const TruncatedOperator adj = op.with_variant(adjoint_of(op.variant));
    std::vector<double> v = deterministic_start(fr.cells());
    const double vn = product_norm_l2(fr, v);
    if (vn == 0.0) return res;
    for (auto& x : v) x /= vn;

    double prev = -1.0;
    int stable = 0;
    for (int it = 1; it <= max_iters; ++it) {
        std::vector<double> u = apply(op, fr, v);
        const double sigma = product_norm_l2(fr, u);
        res.iterations = it;
        if (sigma == 0.0) {
            res.value = 0.0;
            res.converged = true;
            return res;
        }
        res.value = sigma;
        std::vector<double> w = apply(adj, fr, u);
        const double wn = product_norm_l2(fr, w);
        if (wn == 0.0) {
            res.converged = true;
            return res;
        }
        for (auto& x : w) x /= wn;
        v = std::move(w);
        if (prev >= 0.0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-300)) {
            if (++stable >= 3) {
                res.converged = true;
                return res;
            }
        } else {
            stable = 0;
        }
        prev = sigma;
    }
    return res;  // NoConvergence: flagged, best estimate kept
}

OperatorNormResult matrix_l2_norm(const std::vector<std::vector<double>>& a, int max_iters,
                                  double tol) {
    OperatorNormResult res;
    if (a.empty() || a.front().empty()) {
        res.converged = true;
        return res;
    }
    const std::size_t rows = a.size();
    const std::size_t cols = a.front().size();
    std::vector<double> v = deterministic_start(cols);
    double nv = 0.0;
    for (double x : v) nv += x * x;
    nv = std::sqrt(nv);
    for (auto& x : v) x /= nv;

    std::vector<double> u(rows), w(cols);
    double prev = -1.0;
    int stable = 0;
    for (int it = 1; it <= max_iters; ++it) {
        for (std::size_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols; ++j) s += a[i][j] * v[j];
            u[i] = s;
        }
        double sigma = 0.0;
        for (double x : u) sigma += x * x;
        sigma = std::sqrt(sigma);
        res.iterations = it;
        res.value = sigma;
        if (sigma == 0.0) {
            res.converged = true;
            return res;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows; ++i) s += a[i][j] * u[i];
            w[j] = s;
        }
        double wn = 0.0;
        for (double x : w) wn += x * x;
        wn = std::sqrt(wn);
        if (wn == 0.0) {
            res.converged = true;
            return res;
        }
        for (std::size_t j = 0; j < cols; ++j) v[j] = w[j] / wn;
        if (prev >= 0.0 && std::abs(sigma - prev) <= tol * std::max(sigma, 1e-300)) {
            if (++stable >= 3) {
                res.converged = true;
                return res;
            }
        } else {
            stable = 0;
        }
        prev = sigma;
    }
    return res;
}

namespace {

struct SampleCheck {
    ValidationReport* rep;
    double slack = 1.0 + 1e-9;

    void expect(bool ok, const char* code, const std::string& witness) {
        if (!ok && !rep->has(code)) rep->add(code, witness);
    }
};

std::string tuple_str(PointId a, PointId b, PointId c, PointId d) {
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + "," +
           std::to_string(d) + ")";
}

}  // namespace

AssumptionReport validate_assumptions(const KernelSpec& k, const PointSpace& space1,
                                      const PointSpace& space2, const DominatingFunction& dom1,
                                      const DominatingFunction& dom2, int samples,
                                      std::uint64_t seed) {
    if (samples < 1) throw Error(errc::bad_config, "samples must be >= 1");
    AssumptionReport out;
    ValidationReport& rep = out.violations;
    SampleCheck chk{&rep};
    Rng rng(mix_seed(seed, 0x4e7));
    const int n1 = space1.size();
    const int n2 = space2.size();

    const auto kv = [&](OperatorVariant v, PointId x1, PointId x2, PointId y1, PointId y2) {
        switch (v) {
            case OperatorVariant::T: return k.eval(x1, x2, y1, y2);
            case OperatorVariant::TStar: return k.eval(y1, y2, x1, x2);
            case OperatorVariant::T1: return k.eval(y1, x2, x1, y2);
            case OperatorVariant::T1Star: return k.eval(x1, y2, y1, x2);
        }
        return 0.0;
    };
    const OperatorVariant variants[] = {OperatorVariant::T, OperatorVariant::TStar,
                                        OperatorVariant::T1, OperatorVariant::T1Star};
    const char* names[] = {"T", "T*", "T1", "T1*"};

    for (int s = 0; s < samples; ++s) {
        const PointId x1 = rng.uniform_int(0, n1 - 1);
        const PointId y1 = rng.uniform_int(0, n1 - 1);
        const PointId y1p = rng.uniform_int(0, n1 - 1);
        const PointId x2 = rng.uniform_int(0, n2 - 1);
        const PointId y2 = rng.uniform_int(0, n2 - 1);
        const PointId y2p = rng.uniform_int(0, n2 - 1);
        const double r1 = space1.rho(x1, y1);
        const double r2 = space2.rho(x2, y2);
        if (r1 <= 0.0 || r2 <= 0.0) continue;
        const double lam1 = dom1(x1, r1);
        const double lam2 = dom2(x2, r2);
        const bool guard1 = space1.rho(y1, y1p) > 0.0 && r1 >= k.c_k * space1.rho(y1, y1p) &&
                            y1p != x1;
        const bool guard2 = space2.rho(y2, y2p) > 0.0 && r2 >= k.c_k * space2.rho(y2, y2p) &&
                            y2p != x2;

        for (int vi = 0; vi < 4; ++vi) {
            const OperatorVariant v = variants[vi];
            // size
            chk.expect(std::abs(kv(v, x1, x2, y1, y2)) <= k.size_c / (lam1 * lam2) * chk.slack,
                       "SizeConditionViolation",
                       std::string(names[vi]) + " at " + tuple_str(x1, x2, y1, y2));
            // full Hoelder
            if (guard1 && guard2) {
                const double lhs = std::abs(kv(v, x1, x2, y1, y2) - kv(v, x1, x2, y1, y2p) -
                                            kv(v, x1, x2, y1p, y2) + kv(v, x1, x2, y1p, y2p));
                const double rhs = k.size_c *
                                   std::pow(space1.rho(y1, y1p) / r1, k.alpha1) / lam1 *
                                   std::pow(space2.rho(y2, y2p) / r2, k.alpha2) / lam2;
                chk.expect(lhs <= rhs * chk.slack, "HoelderConditionViolation",
                           std::string(names[vi]) + " at " + tuple_str(x1, x2, y1, y2));
            }
            // mixed Hoelder and size
            if (guard1) {
                const double lhs = std::abs(kv(v, x1, x2, y1, y2) - kv(v, x1, x2, y1p, y2));
                const double rhs =
                    k.size_c * std::pow(space1.rho(y1, y1p) / r1, k.alpha1) / lam1 / lam2;
                chk.expect(lhs <= rhs * chk.slack, "MixedConditionViolation",
                           std::string(names[vi]) + " at " + tuple_str(x1, x2, y1, y2));
            }
        }

        // partial conditions through the factor kernels (product form)
        if (k.product_form) {
            chk.expect(std::abs(k.k1.eval(x1, y1)) <= k.k1.size_c / lam1 * chk.slack,
                       "PartialSizeViolation1", tuple_str(x1, 0, y1, 0));
            chk.expect(std::abs(k.k2.eval(x2, y2)) <= k.k2.size_c / lam2 * chk.slack,
                       "PartialSizeViolation2", tuple_str(0, x2, 0, y2));
            if (guard1) {
                const double lhs = std::abs(k.k1.eval(x1, y1) - k.k1.eval(x1, y1p));
                const double rhs =
                    k.k1.size_c * std::pow(space1.rho(y1, y1p) / r1, k.k1.alpha) / lam1;
                chk.expect(lhs <= rhs * chk.slack, "PartialHoelderViolation1",
                           tuple_str(x1, 0, y1, y1p));
                // x-side regularity with roles of x1 and y1p swapped
                if (space1.rho(x1, y1p) > 0.0 && r1 >= k.c_k * space1.rho(x1, y1p)) {
                    const double lhs2 = std::abs(k.k1.eval(x1, y1) - k.k1.eval(y1p, y1));
                    const double rhs2 =
                        k.k1.size_c * std::pow(space1.rho(x1, y1p) / r1, k.k1.alpha) / lam1;
                    chk.expect(lhs2 <= rhs2 * chk.slack, "PartialHoelderViolation1x",
                               tuple_str(x1, 0, y1, y1p));
                }
            }
            if (guard2) {
                const double lhs = std::abs(k.k2.eval(x2, y2) - k.k2.eval(x2, y2p));
                const double rhs =
                    k.k2.size_c * std::pow(space2.rho(y2, y2p) / r2, k.k2.alpha) / lam2;
                chk.expect(lhs <= rhs * chk.slack, "PartialHoelderViolation2",
                           tuple_str(0, x2, y2, y2p));
            }
        }
    }

    // C(f2,g2) <= C ||f2|| ||g2|| on sampled pairs, surfaced as a fit constant
    if (k.product_form) {
        double fit = 0.0;
        for (int s = 0; s < std::min(samples, 64); ++s) {
            std::vector<double> f2(static_cast<std::size_t>(n2)), g2(static_cast<std::size_t>(n2));
            for (auto& x : f2) x = rng.uniform(-1.0, 1.0);
            for (auto& x : g2) x = rng.uniform(-1.0, 1.0);
            double c = 0.0;
            for (PointId a = 0; a < n2; ++a)
                for (PointId b = 0; b < n2; ++b)
                    if (a != b)
                        c += k.k2.eval(a, b) * g2[static_cast<std::size_t>(a)] *
                             f2[static_cast<std::size_t>(b)] * space2.weight(a) * space2.weight(b);
            double nf = 0.0, ng = 0.0;
            for (PointId a = 0; a < n2; ++a) {
                nf += f2[static_cast<std::size_t>(a)] * f2[static_cast<std::size_t>(a)] *
                      space2.weight(a);
                ng += g2[static_cast<std::size_t>(a)] * g2[static_cast<std::size_t>(a)] *
                      space2.weight(a);
            }
            if (nf > 0.0 && ng > 0.0) fit = std::max(fit, std::abs(c) / std::sqrt(nf * ng));
        }
        out.partial_bound_fit = fit;
    }
    return out;
}

}  // namespace carleson
