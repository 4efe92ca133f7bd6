#pragma once

#include <functional>
#include <string>
#include <vector>

#include "carleson/report.hpp"

namespace carleson {

using PointId = int;

// Finite weighted point set (X, rho, mu). Distances are kept as a dense
// symmetric table; everything downstream is a weighted sum over points.
class PointSpace {
public:
    PointSpace() = default;
    PointSpace(std::vector<std::vector<double>> coords, std::vector<double> weights,
               std::vector<double> rho_flat, double a0);

    static PointSpace euclidean(std::vector<std::vector<double>> coords,
                                std::vector<double> weights, double a0 = 1.0);
    static PointSpace sup_metric(std::vector<std::vector<double>> coords,
                                 std::vector<double> weights, double a0 = 1.0);
    // rho' = rho^snowflake_power applied to the euclidean distance; power p
    // gives quasitriangle constant 2^{p-1}.
    static PointSpace snowflake(std::vector<std::vector<double>> coords,
                                std::vector<double> weights, double power);

    int size() const { return static_cast<int>(weights_.size()); }
    bool empty() const { return weights_.empty(); }

    double rho(PointId x, PointId y) const { return rho_[idx(x, y)]; }
    double weight(PointId x) const { return weights_[x]; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<std::vector<double>>& coords() const { return coords_; }
    double a0() const { return a0_; }

    double total_mass() const;
    double diameter() const;
    double min_positive_distance() const;

    // mass of an arbitrary point subset
    double mass(const std::vector<PointId>& pts) const;

    // regularity function eps -> A(eps); stored and validated, unused downstream
    void set_regularity(std::function<double(double)> a_of_eps) { regularity_ = std::move(a_of_eps); }
    const std::function<double(double)>& regularity() const { return regularity_; }

    void check_point(PointId x) const;  // throws UnknownPoint

private:
    std::size_t idx(PointId x, PointId y) const {
        return static_cast<std::size_t>(x) * static_cast<std::size_t>(size()) +
               static_cast<std::size_t>(y);
    }

    std::vector<std::vector<double>> coords_;
    std::vector<double> weights_;
    std::vector<double> rho_;  // dense n*n
    double a0_ = 1.0;
    std::function<double(double)> regularity_;
};

struct Ball {
    PointId center = 0;
    double radius = 0.0;  // open ball {y : rho(center,y) < radius}
};

// Dominating function lambda(x, r) with its upper-doubling constant.
class DominatingFunction {
public:
    // lambda(x,r) = scale * max(r, floor_radius)^exponent. exponent >= 0.
    static DominatingFunction power(double scale, double exponent, double floor_radius = 0.0);
    // step table: lambda(x,r) = values[x][largest i with radii[i] <= r]
    // (first value below radii[0]); radii strictly increasing.
    static DominatingFunction table(std::vector<double> radii,
                                    std::vector<std::vector<double>> values, double c_lambda,
                                    double symmetry_constant);

    double operator()(PointId x, double r) const { return eval_(x, r); }

    double c_lambda() const { return c_lambda_; }
    double t_lambda() const { return t_lambda_; }
    double symmetry_constant() const { return symmetry_constant_; }

    bool is_power() const { return is_power_; }
    double power_scale() const { return power_scale_; }
    double power_exponent() const { return power_exponent_; }
    double power_floor() const { return power_floor_; }

private:
    std::function<double(PointId, double)> eval_;
    double c_lambda_ = 1.0;
    double t_lambda_ = 0.0;
    double symmetry_constant_ = 1.0;
    bool is_power_ = false;
    double power_scale_ = 0.0, power_exponent_ = 0.0, power_floor_ = 0.0;
};

// Geometric default grid 2^j * r_min up to the diameter.
std::vector<double> default_radius_grid(const PointSpace& space);

// Smallest-scale power dominator scale * max(r, floor)^exponent that
// dominates mu(B(x,r)) for every point and every radius (exact: the sup of
// mu(B(x,r))/r^exponent over the jump radii of r -> mu(B(x,r))).
DominatingFunction fit_power_dominator(const PointSpace& space, double exponent);

// Checks every type invariant of (space, dom) on the given radius grid and
// returns a report with one witnessed entry per violation.
ValidationReport validate_space(const PointSpace& space, const DominatingFunction& dom,
                                const std::vector<double>& radius_grid);

std::vector<PointId> ball_members(const PointSpace& space, const Ball& b);

double ball_mass(const PointSpace& space, const Ball& b);

// sum_{x not in B(center,r_B)} rho(x,center)^{-eps} / lambda(center, rho(x,center)) * w(x)
double tail_integral(const PointSpace& space, const DominatingFunction& dom, PointId center,
                     double r_b, double eps);

// Lemma-scale bound companion: C_lambda * 2^eps/(2^eps - 1) * r_B^{-eps}
double tail_integral_bound(const DominatingFunction& dom, double r_b, double eps);

}  // namespace carleson
