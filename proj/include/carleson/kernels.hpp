#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "carleson/product.hpp"
#include "carleson/report.hpp"
#include "carleson/space.hpp"

namespace carleson {

// One-parameter standard kernel on a PointSpace: evaluator plus constants.
struct FactorKernel {
    std::function<double(PointId, PointId)> eval;  // defined off the diagonal
    double size_c = 1.0;
    double alpha = 1.0;
    double c_k = 2.0;
    std::string label;
};

// K(x1,y1) = 1 / lambda(x1, rho(x1,y1)); size condition holds with C = 1.
FactorKernel inv_lambda_kernel(const PointSpace& space, const DominatingFunction& dom,
                               double alpha, double c_k);

// Scalar bi-parameter kernel with the full set of constants. When
// product-form, the factor kernels stay available for the partial checks.
struct KernelSpec {
    std::function<double(PointId, PointId, PointId, PointId)> eval;  // K(x1,x2;y1,y2)
    double size_c = 1.0;
    double alpha1 = 1.0;
    double alpha2 = 1.0;
    double c_k = 2.0;
    bool product_form = false;
    FactorKernel k1, k2;  // set when product_form

    double operator()(PointId x1, PointId x2, PointId y1, PointId y2) const {
        return eval(x1, x2, y1, y2);
    }
};

KernelSpec product_kernel(const FactorKernel& k1, const FactorKernel& k2);

// Which of {T, T*, T_1, T_1*} to realize: index permutations of the kernel.
enum class OperatorVariant { T, TStar, T1, T1Star };

// Discrete operator: (Tf)(x) = sum_y K(x,y) f(y) w(y), with entries killed on
// the truncated region rho_i <= tau (tau = 0 keeps everything but the exact
// diagonals x1 = y1 or x2 = y2, which are always zeroed).
struct TruncatedOperator {
    KernelSpec kernel;
    const PointSpace* space1 = nullptr;
    const PointSpace* space2 = nullptr;
    double tau = 0.0;
    OperatorVariant variant = OperatorVariant::T;

    TruncatedOperator with_variant(OperatorVariant v) const {
        TruncatedOperator t = *this;
        t.variant = v;
        return t;
    }

    // kernel entry after the variant permutation and truncation mask
    double entry(PointId x1, PointId x2, PointId y1, PointId y2) const;
    bool product_fast_path() const { return kernel.product_form; }
    // factor entries for the fast path (only valid when product_form)
    double factor1_entry(PointId x1, PointId y1) const;
    double factor2_entry(PointId x2, PointId y2) const;
};

TruncatedOperator make_operator(const KernelSpec& k, const PointSpace& s1, const PointSpace& s2,
                                double tau = 0.0);

// (Tf)(x) over product cells; O(n^2 m + n m^2) for product kernels
std::vector<double> apply(const TruncatedOperator& op, const ProductFrame& fr,
                          const std::vector<double>& f);

// <T(f1 x f2), g1 x g2>
double pair_tensor(const TruncatedOperator& op, const std::vector<double>& f1,
                   const std::vector<double>& f2, const std::vector<double>& g1,
                   const std::vector<double>& g2);

struct OperatorNormResult {
    double value = 0.0;
    int iterations = 0;
    bool converged = false;  // NoConvergence: best estimate is still returned
};

// L^2(mu) -> L^2(mu) norm by power iteration on T*T with the weighted inner
// product; deterministic start vector.
OperatorNormResult operator_norm(const TruncatedOperator& op, const ProductFrame& fr,
                                 int max_iters = 2000, double tol = 1e-10);

struct AssumptionReport {
    ValidationReport violations;
    // best observed C(f2,g2) / (||f2|| ||g2||) for product-form kernels
    double partial_bound_fit = 0.0;

    bool ok() const { return violations.ok(); }
};

// Samples the displayed size / Hoelder / mixed inequalities (and the partial
// conditions through the factor kernels for product form) on random tuples
// obeying the C_K guards; every violated inequality is witnessed.
AssumptionReport validate_assumptions(const KernelSpec& k, const PointSpace& space1,
                                      const PointSpace& space2, const DominatingFunction& dom1,
                                      const DominatingFunction& dom2, int samples,
                                      std::uint64_t seed);

// generic dense-matrix operator norm on l^2 (used by the Schur machinery)
OperatorNormResult matrix_l2_norm(const std::vector<std::vector<double>>& a, int max_iters = 2000,
                                  double tol = 1e-10);

}  // namespace carleson
