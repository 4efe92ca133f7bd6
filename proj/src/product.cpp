#include "carleson/product.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "carleson/errors.hpp"

namespace carleson {

FactorFrame make_factor_frame(const PointSpace& space, const DyadicSystem& grid,
                              const DyadicSystem& shift_grid, const HaarBasis& basis,
                              const GoodnessParams& params) {
    FactorFrame fr;
    fr.space = &space;
    fr.grid = &grid;
    fr.shift_grid = &shift_grid;
    fr.basis = &basis;
    fr.r = params.r;
    fr.mask = classify(grid, shift_grid, space, params);
    fr.shift.assign(grid.cubes.size(), -1);
    for (const Cube& q : grid.cubes) {
        const int target_gen = q.gen - params.r;
        if (!shift_grid.has_gen(target_gen)) continue;
        const int cand = containing_cube(shift_grid, q.members.front(), target_gen);
        if (shift_grid.subset_external(q.members, cand))
            fr.shift[static_cast<std::size_t>(q.id)] = cand;
    }
    return fr;
}

double product_inner(const ProductFrame& fr, const std::vector<double>& f,
                     const std::vector<double>& g) {
    double s = 0.0;
    for (PointId p1 = 0; p1 < fr.n1(); ++p1) {
        const double w1 = fr.f1.space->weight(p1);
        if (w1 == 0.0) continue;
        for (PointId p2 = 0; p2 < fr.n2(); ++p2) {
            const std::size_t i = cell_index(fr, p1, p2);
            s += f[i] * g[i] * w1 * fr.f2.space->weight(p2);
        }
    }
    return s;
}

double product_norm_l2(const ProductFrame& fr, const std::vector<double>& f) {
    return std::sqrt(std::max(0.0, product_inner(fr, f, f)));
}

double product_norm_l1(const ProductFrame& fr, const std::vector<double>& f) {
    double s = 0.0;
    for (PointId p1 = 0; p1 < fr.n1(); ++p1)
        for (PointId p2 = 0; p2 < fr.n2(); ++p2)
            s += std::abs(f[cell_index(fr, p1, p2)]) * fr.weight(p1, p2);
    return s;
}

std::vector<bool> open_set_cells(const ProductFrame& fr, const AdmissibleOpenSet& omega) {
    std::vector<bool> cells(fr.cells(), false);
    for (const auto& [a, b] : omega.rects) {
        const Cube& qa = fr.f1.shift_grid->cube(a);
        const Cube& qb = fr.f2.shift_grid->cube(b);
        for (PointId p1 : qa.members)
            for (PointId p2 : qb.members) cells[cell_index(fr, p1, p2)] = true;
    }
    return cells;
}

double open_set_mass(const ProductFrame& fr, const AdmissibleOpenSet& omega) {
    const auto cells = open_set_cells(fr, omega);
    double s = 0.0;
    for (PointId p1 = 0; p1 < fr.n1(); ++p1)
        for (PointId p2 = 0; p2 < fr.n2(); ++p2)
            if (cells[cell_index(fr, p1, p2)]) s += fr.weight(p1, p2);
    return s;
}

namespace {

// validate an entry and return the shifted rectangle (S(Q1), S(Q2))
std::pair<int, int> shifted_rect(const ProductFrame& fr, const ProductKey& key) {
    const auto& [q1, u1, q2, u2] = key;
    if (u1 < 1 || u2 < 1 || !fr.f1.basis->has_u(q1, u1) || !fr.f2.basis->has_u(q2, u2))
        throw Error(errc::unknown_index,
                    "(" + std::to_string(q1) + "," + std::to_string(u1) + "," + std::to_string(q2) +
                        "," + std::to_string(u2) + ")");
    if (!fr.f1.usable(q1) || !fr.f2.usable(q2))
        throw Error(errc::bad_cube_entry, "coefficient on a bad or unshifted cube (" +
                                              std::to_string(q1) + "," + std::to_string(q2) + ")");
    return {fr.f1.shifted(q1), fr.f2.shifted(q2)};
}

// |c_R|^2 grouped by the shifted container rectangle
std::map<std::pair<int, int>, double> group_by_container(const ProductFrame& fr,
                                                         const ProductField& c) {
    std::map<std::pair<int, int>, double> g;
    for (const auto& [key, v] : c) g[shifted_rect(fr, key)] += v * v;
    return g;
}

double rect_mass(const ProductFrame& fr, int s1, int s2) {
    return fr.f1.shift_grid->cube(s1).mass * fr.f2.shift_grid->cube(s2).mass;
}

}  // namespace

SquareFunctionResult square_function(const ProductFrame& fr, const ProductField& c) {
    const auto groups = group_by_container(fr, c);
    std::vector<double> sq(fr.cells(), 0.0);
    for (const auto& [rect, val] : groups) {
        const double m = rect_mass(fr, rect.first, rect.second);
        if (m <= 0.0) continue;  // zero-mass containers carry zero coefficients
        const double dens = val / m;
        const Cube& qa = fr.f1.shift_grid->cube(rect.first);
        const Cube& qb = fr.f2.shift_grid->cube(rect.second);
        for (PointId p1 : qa.members)
            for (PointId p2 : qb.members) sq[cell_index(fr, p1, p2)] += dens;
    }
    SquareFunctionResult res;
    res.values.resize(fr.cells());
    double l1 = 0.0, l2 = 0.0;
    for (PointId p1 = 0; p1 < fr.n1(); ++p1)
        for (PointId p2 = 0; p2 < fr.n2(); ++p2) {
            const std::size_t i = cell_index(fr, p1, p2);
            res.values[i] = std::sqrt(sq[i]);
            const double w = fr.weight(p1, p2);
            l1 += res.values[i] * w;
            l2 += sq[i] * w;
        }
    res.l1 = l1;
    res.l2 = std::sqrt(l2);
    return res;
}

double s1_norm(const ProductFrame& fr, const ProductField& c) { return square_function(fr, c).l1; }

double s2_norm(const ProductFrame& fr, const ProductField& c) { return square_function(fr, c).l2; }

namespace {

double sup_over_candidates(const ProductFrame& fr, const ProductField& c,
                           const std::vector<AdmissibleOpenSet>& candidates) {
    if (candidates.empty()) throw Error(errc::bad_config, "candidate family is empty");
    const auto groups = group_by_container(fr, c);
    double best = 0.0;
    for (const AdmissibleOpenSet& omega : candidates) {
        if (omega.rects.empty()) continue;
        double sum = 0.0;
        if (omega.rects.size() == 1) {
            const auto& [a, b] = omega.rects.front();
            for (const auto& [rect, val] : groups)
                if (fr.f1.shift_grid->subset(rect.first, a) &&
                    fr.f2.shift_grid->subset(rect.second, b))
                    sum += val;
        } else {
            const auto cells = open_set_cells(fr, omega);
            for (const auto& [rect, val] : groups) {
                const Cube& qa = fr.f1.shift_grid->cube(rect.first);
                const Cube& qb = fr.f2.shift_grid->cube(rect.second);
                bool inside = true;
                for (PointId p1 : qa.members) {
                    for (PointId p2 : qb.members)
                        if (!cells[cell_index(fr, p1, p2)]) {
                            inside = false;
                            break;
                        }
                    if (!inside) break;
                }
                if (inside) sum += val;
            }
        }
        if (sum <= 0.0) continue;
        const double m = open_set_mass(fr, omega);
        if (m > 0.0) best = std::max(best, sum / m);
    }
    return std::sqrt(best);
}

}  // namespace

double bmo_prod_norm(const ProductFrame& fr, const ProductField& c,
                     const std::vector<AdmissibleOpenSet>& candidates) {
    return sup_over_candidates(fr, c, candidates);
}

double t1_norm(const ProductFrame& fr, const ProductField& c,
               const std::vector<AdmissibleOpenSet>& candidates) {
    return sup_over_candidates(fr, c, candidates);
}

double duality_pairing(const ProductField& s, const ProductField& t) {
    double sum = 0.0;
    const ProductField& small = s.size() <= t.size() ? s : t;
    const ProductField& large = s.size() <= t.size() ? t : s;
    for (const auto& [key, v] : small) {
        const auto it = large.find(key);
        if (it != large.end()) sum += v * it->second;
    }
    return sum;
}

std::vector<double> strong_maximal(const ProductFrame& fr, const std::vector<double>& f) {
    std::vector<double> out(fr.cells(), 0.0);
    const double big_c1 = cube_outer_constant(fr.f1.space->a0());
    const double big_c2 = cube_outer_constant(fr.f2.space->a0());
    for (const Cube& qa : fr.f1.shift_grid->cubes) {
        const double m5a = ball_mass(*fr.f1.space, {qa.center, 5.0 * big_c1 * qa.side});
        for (const Cube& qb : fr.f2.shift_grid->cubes) {
            const double m5b = ball_mass(*fr.f2.space, {qb.center, 5.0 * big_c2 * qb.side});
            const double m5 = m5a * m5b;
            if (m5 <= 0.0) continue;
            double integral = 0.0;
            for (PointId p1 : qa.members) {
                const double w1 = fr.f1.space->weight(p1);
                if (w1 == 0.0) continue;
                for (PointId p2 : qb.members)
                    integral += std::abs(f[cell_index(fr, p1, p2)]) * w1 * fr.f2.space->weight(p2);
            }
            const double avg = integral / m5;
            for (PointId p1 : qa.members)
                for (PointId p2 : qb.members) {
                    const std::size_t i = cell_index(fr, p1, p2);
                    out[i] = std::max(out[i], avg);
                }
        }
    }
    return out;
}

AdmissibleOpenSet maximal_level_set(const ProductFrame& fr, const std::vector<bool>& cells,
                                    double threshold) {
    AdmissibleOpenSet omega;
    const double big_c1 = cube_outer_constant(fr.f1.space->a0());
    const double big_c2 = cube_outer_constant(fr.f2.space->a0());
    for (const Cube& qa : fr.f1.shift_grid->cubes) {
        const double m5a = ball_mass(*fr.f1.space, {qa.center, 5.0 * big_c1 * qa.side});
        for (const Cube& qb : fr.f2.shift_grid->cubes) {
            const double m5b = ball_mass(*fr.f2.space, {qb.center, 5.0 * big_c2 * qb.side});
            const double m5 = m5a * m5b;
            if (m5 <= 0.0) continue;
            double integral = 0.0;
            for (PointId p1 : qa.members) {
                const double w1 = fr.f1.space->weight(p1);
                if (w1 == 0.0) continue;
                for (PointId p2 : qb.members)
                    if (cells[cell_index(fr, p1, p2)]) integral += w1 * fr.f2.space->weight(p2);
            }
            if (integral / m5 > threshold) omega.rects.push_back({qa.id, qb.id});
        }
    }
    return omega;
}

std::vector<AdmissibleOpenSet> canonical_candidates(const ProductFrame& fr, const ProductField& c,
                                                    const std::vector<AdmissibleOpenSet>& unions) {
    std::set<int> f1_cands, f2_cands;
    for (const auto& [key, v] : c) {
        const auto rect = shifted_rect(fr, key);
        // ancestors-or-self of the support containers; any other single
        // rectangle collects an empty sum
        for (int id = rect.first; id >= 0; id = fr.f1.shift_grid->cube(id).parent)
            f1_cands.insert(id);
        for (int id = rect.second; id >= 0; id = fr.f2.shift_grid->cube(id).parent)
            f2_cands.insert(id);
    }
    std::vector<AdmissibleOpenSet> out;
    for (int a : f1_cands)
        for (int b : f2_cands) out.push_back(AdmissibleOpenSet::single(a, b));
    for (const auto& u : unions)
        if (!u.rects.empty()) out.push_back(u);
    if (out.empty())
        out.push_back(AdmissibleOpenSet::single(
            fr.f1.shift_grid->level(fr.f1.shift_grid->gen_min)[0],
            fr.f2.shift_grid->level(fr.f2.shift_grid->gen_min)[0]));
    return out;
}

ProductField lift(const ProductFrame& fr, const std::vector<double>& phi) {
    ProductField c;
    const int n2 = fr.n2();
    for (const Cube& q1 : fr.f1.grid->cubes) {
        if (!fr.f1.usable(q1.id)) continue;
        const CubeHaar& h1 = fr.f1.basis->at(q1.id);
        for (int u1 = 1; u1 <= h1.num_haar(); ++u1) {
            if (h1.zero[static_cast<std::size_t>(u1 - 1)]) continue;
            // contract factor 1: g(p2) = int phi(., p2) h_{u1}^{Q1} dmu1
            std::vector<double> g(static_cast<std::size_t>(n2), 0.0);
            for (PointId p1 : q1.members) {
                const double hv = fr.f1.basis->value(q1.id, u1, p1) * fr.f1.space->weight(p1);
                if (hv == 0.0) continue;
                const std::size_t row = static_cast<std::size_t>(p1) * static_cast<std::size_t>(n2);
                for (PointId p2 = 0; p2 < n2; ++p2)
                    g[static_cast<std::size_t>(p2)] += phi[row + static_cast<std::size_t>(p2)] * hv;
            }
            for (const Cube& q2 : fr.f2.grid->cubes) {
                if (!fr.f2.usable(q2.id)) continue;
                const CubeHaar& h2 = fr.f2.basis->at(q2.id);
                for (int u2 = 1; u2 <= h2.num_haar(); ++u2) {
                    if (h2.zero[static_cast<std::size_t>(u2 - 1)]) continue;
                    const double v = fr.f2.basis->coefficient(q2.id, u2, g);
                    if (v != 0.0) c[{q1.id, u1, q2.id, u2}] = v;
                }
            }
        }
    }
    return c;
}

std::vector<double> project(const ProductFrame& fr, const ProductField& c) {
    std::vector<double> f(fr.cells(), 0.0);
    for (const auto& [key, v] : c) {
        shifted_rect(fr, key);  // validates the entry
        const auto& [q1, u1, q2, u2] = key;
        const Cube& a = fr.f1.grid->cube(q1);
        const Cube& b = fr.f2.grid->cube(q2);
        for (PointId p1 : a.members) {
            const double h1v = fr.f1.basis->value(q1, u1, p1);
            if (h1v == 0.0) continue;
            for (PointId p2 : b.members)
                f[cell_index(fr, p1, p2)] += v * h1v * fr.f2.basis->value(q2, u2, p2);
        }
    }
    return f;
}

std::vector<double> tensor_haar(const ProductFrame& fr, int q1, int u1, int q2, int u2) {
    std::vector<double> f(fr.cells(), 0.0);
    const Cube& a = fr.f1.grid->cube(q1);
    const Cube& b = fr.f2.grid->cube(q2);
    for (PointId p1 : a.members) {
        const double h1v = fr.f1.basis->value(q1, u1, p1);
        if (h1v == 0.0) continue;
        for (PointId p2 : b.members)
            f[cell_index(fr, p1, p2)] += h1v * fr.f2.basis->value(q2, u2, p2);
    }
    return f;
}

std::vector<AdmissibleOpenSet> proof_level_sets(const ProductFrame& fr, const ProductField& c) {
    std::vector<AdmissibleOpenSet> out;
    if (c.empty()) return out;
    const auto sq = square_function(fr, c);
    double vmax = 0.0;
    for (double v : sq.values) vmax = std::max(vmax, v);
    if (vmax <= 0.0) return out;
    // dyadic thresholds below the sup; each level set realized through the
    // half-threshold set of its strong maximal function
    double level = vmax;
    for (int k = 0; k < 8; ++k) {
        level /= 2.0;
        std::vector<bool> cells(sq.values.size(), false);
        bool any = false;
        for (std::size_t i = 0; i < sq.values.size(); ++i)
            if (sq.values[i] > level) {
                cells[i] = true;
                any = true;
            }
        if (!any) continue;
        auto omega = maximal_level_set(fr, cells, 0.5);
        if (!omega.rects.empty()) out.push_back(std::move(omega));
    }
    return out;
}

}  // namespace carleson
