#pragma once

#include <compare>
#include <map>
#include <vector>

#include "carleson/dyadic.hpp"
#include "carleson/space.hpp"

namespace carleson {

// One cell of a cube: a child cube, or a single point at the finest
// generation (the finest cubes subdivide into their member points).
struct HaarCell {
    bool is_point = false;
    int ref = -1;  // child cube id, or point id
    std::vector<PointId> members;
    double mass = 0.0;
};

// All Haar data of one cube: cells ordered by descending mass (ties by id),
// h_0 = mu(Q)^{-1/2} chi_Q, h_u = a_u chi_{cell u-1} - b_u chi_{cells u..M-1}.
struct CubeHaar {
    int cube = -1;
    double mass = 0.0;
    bool zero_mass = false;  // ZeroMassCube: basis kept with h == 0
    std::vector<HaarCell> cells;
    std::vector<double> a;     // index u-1 for u = 1..M-1
    std::vector<double> b;
    std::vector<bool> zero;    // h_u identically zero (zero-mass tail)

    int num_children() const { return static_cast<int>(cells.size()); }
    int num_haar() const { return std::max(0, num_children() - 1); }  // cancellative count
};

struct HaarIndex {
    int cube = -1;
    int u = 0;
    auto operator<=>(const HaarIndex&) const = default;
};

// Sparse one-parameter coefficient field (Q, u) -> value.
using CoefficientField = std::map<HaarIndex, double>;

class HaarBasis {
public:
    HaarBasis() = default;
    const DyadicSystem& system() const { return *sys_; }
    const PointSpace& space() const { return *space_; }

    // re-point at relocated owners (containers that move their members)
    void rebind(const DyadicSystem& sys, const PointSpace& space) {
        sys_ = &sys;
        space_ = &space;
    }

    const CubeHaar& at(int cube_id) const { return data_[static_cast<std::size_t>(cube_id)]; }
    bool has_u(int cube_id, int u) const;

    // value of h_u^Q at a point (0 outside Q); u = 0 is the normalized indicator
    double value(int cube_id, int u, PointId p) const;

    // <f, h_u^Q> in L^2(mu)
    double coefficient(int cube_id, int u, const std::vector<double>& f) const;

    // L^p norm of h_u^Q, p in {1, 2, inf}
    double norm_l1(int cube_id, int u) const;
    double norm_l2(int cube_id, int u) const;
    double norm_linf(int cube_id, int u) const;

    // cell index of p within the cube, -1 if outside
    int cell_of(int cube_id, PointId p) const;

    std::vector<int> zero_mass_cubes() const;

    friend HaarBasis build_haar(const DyadicSystem& sys, const PointSpace& space);

private:
    const DyadicSystem* sys_ = nullptr;
    const PointSpace* space_ = nullptr;
    std::vector<CubeHaar> data_;                 // by cube id
    std::vector<std::vector<int>> point_cell_;   // [cube][point] -> cell index or -1
};

HaarBasis build_haar(const DyadicSystem& sys, const PointSpace& space);

// Coefficients <f, h_u^Q> for gen in [m,k), u >= 1, plus <f, h_0^Q> at gen m.
CoefficientField expand(const std::vector<double>& f, const HaarBasis& basis, int m, int k);

// Synthesis; inverse of expand on the spanned subspace.
std::vector<double> reconstruct(const CoefficientField& c, const HaarBasis& basis);

// <f, g> = sum f g w over points
double inner(const PointSpace& space, const std::vector<double>& f, const std::vector<double>& g);
double norm_l2(const PointSpace& space, const std::vector<double>& f);

}  // namespace carleson
