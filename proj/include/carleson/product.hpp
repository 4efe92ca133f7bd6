#pragma once

#include <utility>
#include <vector>

#include "carleson/goodness.hpp"
#include "carleson/haar.hpp"

namespace carleson {

// One factor of the bi-parameter setup: a Haar-bearing grid D, the reference
// grid D' it is good/shifted against, and the shift map S (per good cube Q
// the unique D'-cube with Q c S(Q), gen(S(Q)) = gen(Q) - r).
struct FactorFrame {
    const PointSpace* space = nullptr;
    const DyadicSystem* grid = nullptr;
    const DyadicSystem* shift_grid = nullptr;
    const HaarBasis* basis = nullptr;
    GoodnessMask mask;
    int r = 1;
    std::vector<int> shift;  // by cube id of grid; -1 when undefined

    bool usable(int cube_id) const {
        return mask.is_good(cube_id) && shift[static_cast<std::size_t>(cube_id)] >= 0;
    }
    int shifted(int cube_id) const { return shift[static_cast<std::size_t>(cube_id)]; }
};

FactorFrame make_factor_frame(const PointSpace& space, const DyadicSystem& grid,
                              const DyadicSystem& shift_grid, const HaarBasis& basis,
                              const GoodnessParams& params);

struct ProductFrame {
    FactorFrame f1, f2;

    int n1() const { return f1.space->size(); }
    int n2() const { return f2.space->size(); }
    std::size_t cells() const {
        return static_cast<std::size_t>(n1()) * static_cast<std::size_t>(n2());
    }
    double weight(PointId p1, PointId p2) const {
        return f1.space->weight(p1) * f2.space->weight(p2);
    }
    double total_mass() const { return f1.space->total_mass() * f2.space->total_mass(); }
};

// product functions are row-major vectors of size n1*n2
inline std::size_t cell_index(const ProductFrame& fr, PointId p1, PointId p2) {
    return static_cast<std::size_t>(p1) * static_cast<std::size_t>(fr.n2()) +
           static_cast<std::size_t>(p2);
}

double product_inner(const ProductFrame& fr, const std::vector<double>& f,
                     const std::vector<double>& g);
double product_norm_l2(const ProductFrame& fr, const std::vector<double>& f);
double product_norm_l1(const ProductFrame& fr, const std::vector<double>& f);

// union of dyadic rectangles R' = Q1' x Q2' of the shift grids
struct AdmissibleOpenSet {
    std::vector<std::pair<int, int>> rects;  // (cube id in D1', cube id in D2')

    static AdmissibleOpenSet single(int q1p, int q2p) { return {{{q1p, q2p}}}; }
};

// covered-cell indicator and mass of the union
std::vector<bool> open_set_cells(const ProductFrame& fr, const AdmissibleOpenSet& omega);
double open_set_mass(const ProductFrame& fr, const AdmissibleOpenSet& omega);

struct SquareFunctionResult {
    std::vector<double> values;  // pointwise S phi over product cells
    double l1 = 0.0;             // H^1_prod norm
    double l2 = 0.0;             // s^2-type norm of the same expression
};

// S(x) = sqrt( sum over entries |c_R|^2 chi_{S(R)}(x) / mu(S(R)) ); rejects
// entries on bad cubes or cubes without a shift (BadCubeEntry).
SquareFunctionResult square_function(const ProductFrame& fr, const ProductField& c);

double s1_norm(const ProductFrame& fr, const ProductField& c);
double s2_norm(const ProductFrame& fr, const ProductField& c);

// sup over candidate sets of (mu(Omega)^{-1} sum_{S(R) c Omega} |c_R|^2)^{1/2}
double bmo_prod_norm(const ProductFrame& fr, const ProductField& c,
                     const std::vector<AdmissibleOpenSet>& candidates);
double t1_norm(const ProductFrame& fr, const ProductField& c,
               const std::vector<AdmissibleOpenSet>& candidates);

double duality_pairing(const ProductField& s, const ProductField& t);

// strong maximal function over the rectangles of (D1', D2') with the mu(5R')
// normalization (5R' = 5-fold sandwich-ball dilates of the factor cubes)
std::vector<double> strong_maximal(const ProductFrame& fr, const std::vector<double>& f);

// rectangles R' whose mu(5R')-average of chi_E exceeds `threshold`; realizes
// the level set {M_{D'} chi_E > threshold} as a rectangle union
AdmissibleOpenSet maximal_level_set(const ProductFrame& fr, const std::vector<bool>& cells,
                                    double threshold);

// every single rectangle that contains some support rectangle of c (zero-value
// singles never attain the sup), plus the given union sets
std::vector<AdmissibleOpenSet> canonical_candidates(const ProductFrame& fr, const ProductField& c,
                                                    const std::vector<AdmissibleOpenSet>& unions = {});

ProductField lift(const ProductFrame& fr, const std::vector<double>& phi);
std::vector<double> project(const ProductFrame& fr, const ProductField& c);

// tensor h_{u1}^{Q1} x h_{u2}^{Q2} as a product function
std::vector<double> tensor_haar(const ProductFrame& fr, int q1, int u1, int q2, int u2);

// dyadic level sets Omega_k = {S_c > 2^k} realized through the maximal level
// sets of the proof; used as t^1 candidates
std::vector<AdmissibleOpenSet> proof_level_sets(const ProductFrame& fr, const ProductField& c);

}  // namespace carleson
