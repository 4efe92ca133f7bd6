#include "carleson/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

#include "carleson/errors.hpp"

namespace carleson {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

std::vector<double> pairwise(const std::vector<std::vector<double>>& coords,
                             double (*d)(const std::vector<double>&, const std::vector<double>&)) {
    const std::size_t n = coords.size();
    std::vector<double> rho(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) rho[i * n + j] = d(coords[i], coords[j]);
    return rho;
}

double dist_euclid(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return std::sqrt(s);
}

double dist_sup(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a[k] - b[k]));
    return s;
}

}  // namespace

PointSpace::PointSpace(std::vector<std::vector<double>> coords, std::vector<double> weights,
                       std::vector<double> rho_flat, double a0)
    : coords_(std::move(coords)), weights_(std::move(weights)), rho_(std::move(rho_flat)), a0_(a0) {
    if (weights_.empty()) throw Error(errc::empty_space, "point set is empty");
    if (rho_.size() != weights_.size() * weights_.size())
        throw Error(errc::bad_config, "distance table size does not match point count");
    for (double w : weights_)
        if (w < 0.0) throw Error(errc::negative_weight, "weight " + fmt(w));
}

PointSpace PointSpace::euclidean(std::vector<std::vector<double>> coords,
                                 std::vector<double> weights, double a0) {
    auto rho = pairwise(coords, dist_euclid);
    return PointSpace(std::move(coords), std::move(weights), std::move(rho), a0);
}

PointSpace PointSpace::sup_metric(std::vector<std::vector<double>> coords,
                                  std::vector<double> weights, double a0) {
    auto rho = pairwise(coords, dist_sup);
    return PointSpace(std::move(coords), std::move(weights), std::move(rho), a0);
}

PointSpace PointSpace::snowflake(std::vector<std::vector<double>> coords,
                                 std::vector<double> weights, double power) {
    auto rho = pairwise(coords, dist_euclid);
    for (double& v : rho) v = std::pow(v, power);
    return PointSpace(std::move(coords), std::move(weights), std::move(rho),
                      std::pow(2.0, power - 1.0));
}

double PointSpace::total_mass() const {
    double s = 0.0;
    for (double w : weights_) s += w;
    return s;
}

double PointSpace::diameter() const {
    double d = 0.0;
    for (double v : rho_) d = std::max(d, v);
    return d;
}

double PointSpace::min_positive_distance() const {
    double d = std::numeric_limits<double>::infinity();
    for (double v : rho_)
        if (v > 0.0) d = std::min(d, v);
    return d;
}

double PointSpace::mass(const std::vector<PointId>& pts) const {
    double s = 0.0;
    for (PointId p : pts) s += weights_[p];
    return s;
}

void PointSpace::check_point(PointId x) const {
    if (x < 0 || x >= size()) throw Error(errc::unknown_point, "point id " + std::to_string(x));
}

DominatingFunction DominatingFunction::power(double scale, double exponent, double floor_radius) {
    DominatingFunction d;
    d.is_power_ = true;
    d.power_scale_ = scale;
    d.power_exponent_ = exponent;
    d.power_floor_ = floor_radius;
    d.c_lambda_ = std::pow(2.0, exponent);
    d.t_lambda_ = exponent;
    d.symmetry_constant_ = 1.0;  // point-independent
    d.eval_ = [scale, exponent, floor_radius](PointId, double r) {
        return scale * std::pow(std::max(r, floor_radius), exponent);
    };
    return d;
}

DominatingFunction DominatingFunction::table(std::vector<double> radii,
                                             std::vector<std::vector<double>> values,
                                             double c_lambda, double symmetry_constant) {
    DominatingFunction d;
    d.c_lambda_ = c_lambda;
    d.t_lambda_ = std::log2(c_lambda);
    d.symmetry_constant_ = symmetry_constant;
    auto r = std::make_shared<std::vector<double>>(std::move(radii));
    auto v = std::make_shared<std::vector<std::vector<double>>>(std::move(values));
    d.eval_ = [r, v](PointId x, double rad) {
        const auto& radv = *r;
        std::size_t i = 0;
        while (i + 1 < radv.size() && radv[i + 1] <= rad) ++i;
        return (*v)[static_cast<std::size_t>(x)][i];
    };
    return d;
}

std::vector<double> default_radius_grid(const PointSpace& space) {
    double rmin = space.min_positive_distance();
    if (!std::isfinite(rmin)) rmin = 1.0;  // single point
    const double diam = std::max(space.diameter(), rmin);
    std::vector<double> grid;
    for (double r = rmin; r <= 2.0 * diam; r *= 2.0) grid.push_back(r);
    return grid;
}

DominatingFunction fit_power_dominator(const PointSpace& space, double exponent) {
    const int n = space.size();
    double rmin = space.min_positive_distance();
    if (!std::isfinite(rmin)) rmin = 1.0;
    const double floor_r = rmin / 2.0;
    double scale = 0.0;
    std::vector<std::pair<double, double>> row(static_cast<std::size_t>(n));
    for (PointId x = 0; x < n; ++x) {
        for (PointId y = 0; y < n; ++y)
            row[static_cast<std::size_t>(y)] = {space.rho(x, y), space.weight(y)};
        std::sort(row.begin(), row.end());
        // mu(B(x,r)) jumps just above each distance d to the cumulative mass
        // of {rho <= d}; the ratio sup is attained in those limits
        double cum = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i) {
            cum += row[i].second;
            if (i + 1 < row.size() && row[i + 1].first == row[i].first) continue;
            const double r = std::max(row[i].first, floor_r);
            scale = std::max(scale, cum / std::pow(r, exponent));
        }
    }
    if (scale <= 0.0) scale = 1.0;
    return DominatingFunction::power(scale, exponent, floor_r);
}

ValidationReport validate_space(const PointSpace& space, const DominatingFunction& dom,
                                const std::vector<double>& radius_grid) {
    if (space.empty()) throw Error(errc::empty_space, "point set is empty");
    ValidationReport rep;
    const int n = space.size();

    if (space.total_mass() <= 0.0) rep.add("ZeroTotalMass", "total mass " + fmt(space.total_mass()));
    for (PointId x = 0; x < n; ++x)
        if (space.weight(x) < 0.0)
            rep.add("NegativeWeight", "point " + std::to_string(x) + " weight " + fmt(space.weight(x)));

    for (PointId x = 0; x < n; ++x) {
        for (PointId y = 0; y < n; ++y) {
            const double d = space.rho(x, y);
            if (d < 0.0) rep.add("NegativeDistance", std::to_string(x) + "," + std::to_string(y));
            if (x == y && d != 0.0)
                rep.add("NonzeroSelfDistance", "point " + std::to_string(x) + " rho " + fmt(d));
            if (x != y && d == 0.0)
                rep.add("ZeroDistanceDistinct", std::to_string(x) + "," + std::to_string(y));
            if (std::abs(d - space.rho(y, x)) != 0.0)
                rep.add("AsymmetricDistance", std::to_string(x) + "," + std::to_string(y));
        }
    }

    // quasitriangle rho(x,z) <= A0 (rho(x,y) + rho(y,z)); tolerance only for
    // roundoff, the inequality itself is the invariant
    const double a0 = space.a0();
    const double qtol = 1e-12;
    for (PointId x = 0; x < n; ++x)
        for (PointId y = 0; y < n; ++y) {
            const double dxy = space.rho(x, y);
            for (PointId z = 0; z < n; ++z) {
                const double lhs = space.rho(x, z);
                const double rhs = a0 * (dxy + space.rho(y, z));
                if (lhs > rhs * (1.0 + qtol)) {
                    rep.add("QuasitriangleViolation",
                            "(" + std::to_string(x) + "," + std::to_string(y) + "," +
                                std::to_string(z) + "): " + fmt(lhs) + " > " + fmt(rhs));
                    goto quasidone;  // one witness is enough
                }
            }
        }
quasidone:

    // regularity table sanity: A(eps) >= 1 where provided
    if (space.regularity()) {
        for (double eps : {0.5, 1.0, 2.0}) {
            const double a = space.regularity()(eps);
            if (!(a >= 1.0)) rep.add("RegularityBelowOne", "A(" + fmt(eps) + ") = " + fmt(a));
        }
    }

    // dominating function invariants on the grid
    const double dtol = 1e-12;
    for (PointId x = 0; x < n; ++x) {
        double prev = -1.0;
        for (double r : radius_grid) {
            const double lam = dom(x, r);
            if (lam <= 0.0) rep.add("NonpositiveLambda", "x=" + std::to_string(x) + " r=" + fmt(r));
            if (prev > lam * (1.0 + dtol)) {
                rep.add("LambdaNotMonotone", "x=" + std::to_string(x) + " r=" + fmt(r));
                break;
            }
            prev = lam;
            if (dom(x, 2.0 * r) > dom.c_lambda() * lam * (1.0 + dtol)) {
                rep.add("LambdaDoublingViolation",
                        "x=" + std::to_string(x) + " r=" + fmt(r) + ": lambda(2r)=" +
                            fmt(dom(x, 2.0 * r)) + " > C*lambda(r)=" + fmt(dom.c_lambda() * lam));
                break;
            }
        }
    }
    for (PointId x = 0; x < n; ++x) {
        for (double r : radius_grid) {
            const double mb = ball_mass(space, Ball{x, r});
            const double lam = dom(x, r);
            if (mb > lam * (1.0 + dtol)) {
                rep.add("MeasureAboveLambda", "x=" + std::to_string(x) + " r=" + fmt(r) +
                                                  ": mu(B)=" + fmt(mb) + " > lambda=" + fmt(lam));
                break;
            }
        }
    }
    const double symc = dom.symmetry_constant();
    for (PointId x = 0; x < n && rep.issues.size() < 64; ++x)
        for (PointId y = 0; y < n; ++y) {
            if (x == y) continue;
            for (double r : radius_grid) {
                if (space.rho(x, y) <= r && dom(x, r) > symc * dom(y, r) * (1.0 + dtol)) {
                    rep.add("LambdaSymmetryViolation",
                            "x=" + std::to_string(x) + " y=" + std::to_string(y) + " r=" + fmt(r));
                    break;
                }
            }
        }

    return rep;
}

std::vector<PointId> ball_members(const PointSpace& space, const Ball& b) {
    space.check_point(b.center);
    std::vector<PointId> out;
    for (PointId y = 0; y < space.size(); ++y)
        if (space.rho(b.center, y) < b.radius) out.push_back(y);
    return out;
}

double ball_mass(const PointSpace& space, const Ball& b) {
    double s = 0.0;
    for (PointId y = 0; y < space.size(); ++y)
        if (space.rho(b.center, y) < b.radius) s += space.weight(y);
    return s;
}

double tail_integral(const PointSpace& space, const DominatingFunction& dom, PointId center,
                     double r_b, double eps) {
    space.check_point(center);
    double s = 0.0;
    for (PointId x = 0; x < space.size(); ++x) {
        const double d = space.rho(x, center);
        if (d < r_b) continue;  // open ball: membership is rho < r_B
        s += std::pow(d, -eps) / dom(center, d) * space.weight(x);
    }
    return s;
}

double tail_integral_bound(const DominatingFunction& dom, double r_b, double eps) {
    const double a_eps = std::pow(2.0, eps) / (std::pow(2.0, eps) - 1.0);
    return dom.c_lambda() * a_eps * std::pow(r_b, -eps);
}

}  // namespace carleson
