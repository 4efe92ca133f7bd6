#include "carleson/paraproducts.hpp"

#include <algorithm>
#include <cmath>

#include "carleson/errors.hpp"
#include "carleson/kernels.hpp"

namespace carleson {

double bmo_kappa2_norm(const PointSpace& space, const std::vector<double>& a, double kappa,
                       const DyadicSystem& ball_source) {
    const double big_c_q = cube_outer_constant(space.a0());
    double best = 0.0;
    for (const Cube& q : ball_source.cubes) {
        const Ball b{q.center, big_c_q * q.side};
        const auto members = ball_members(space, b);
        double mass = 0.0, mean = 0.0;
        for (PointId p : members) {
            mass += space.weight(p);
            mean += a[static_cast<std::size_t>(p)] * space.weight(p);
        }
        if (mass <= 0.0) continue;
        mean /= mass;
        double osc = 0.0;
        for (PointId p : members) {
            const double d = a[static_cast<std::size_t>(p)] - mean;
            osc += d * d * space.weight(p);
        }
        const double dilated = ball_mass(space, {q.center, kappa * b.radius});
        if (dilated > 0.0) best = std::max(best, std::sqrt(osc / dilated));
    }
    return best;
}

std::vector<std::vector<double>> make_atoms(const PointSpace& space, const Ball& b,
                                            int max_atoms) {
    const auto members = ball_members(space, b);
    const double mass = space.mass(members);
    std::vector<std::vector<double>> atoms;
    if (members.size() < 2 || mass <= 0.0) return atoms;

    const auto normalize = [&](std::vector<double> f) {
        double n2 = 0.0, mean = 0.0;
        for (PointId p : members) mean += f[static_cast<std::size_t>(p)] * space.weight(p);
        if (std::abs(mean) > 1e-13) return;  // not mean zero, drop
        for (PointId p : members)
            n2 += f[static_cast<std::size_t>(p)] * f[static_cast<std::size_t>(p)] * space.weight(p);
        if (n2 <= 0.0) return;
        const double scale = 1.0 / (std::sqrt(n2) * std::sqrt(mass));
        for (auto& v : f) v *= scale;  // ||atom||_2 = mu(B)^{-1/2}
        atoms.push_back(std::move(f));
    };

    // point-pair differences delta_p/w_p - delta_q/w_q
    for (std::size_t i = 0; i + 1 < members.size() && static_cast<int>(atoms.size()) < max_atoms;
         i += 2) {
        const PointId p = members[i];
        const PointId q = members[i + 1];
        if (space.weight(p) <= 0.0 || space.weight(q) <= 0.0) continue;
        std::vector<double> f(static_cast<std::size_t>(space.size()), 0.0);
        f[static_cast<std::size_t>(p)] = 1.0 / space.weight(p);
        f[static_cast<std::size_t>(q)] = -1.0 / space.weight(q);
        normalize(std::move(f));
    }
    // sub-ball indicator difference chi_{B'}/mu(B') - chi_B/mu(B)
    {
        const Ball half{b.center, b.radius / 2.0};
        const auto inner = ball_members(space, half);
        const double inner_mass = space.mass(inner);
        if (inner_mass > 0.0 && inner_mass < mass) {
            std::vector<double> f(static_cast<std::size_t>(space.size()), 0.0);
            for (PointId p : inner) f[static_cast<std::size_t>(p)] += 1.0 / inner_mass;
            for (PointId p : members) f[static_cast<std::size_t>(p)] -= 1.0 / mass;
            normalize(std::move(f));
        }
    }
    return atoms;
}

namespace {

// precomputed terms of the one-parameter paraproduct for a fixed u2
struct OneParamTerms {
    struct Term {
        int cube;     // Q2 in the Haar grid
        int shifted;  // S(Q2) in the shift grid
        double coef;  // <a, h_{u2}^{Q2}>
    };
    std::vector<Term> terms;
};

OneParamTerms collect_terms(const FactorFrame& f2, const std::vector<double>& a, int u2) {
    if (u2 < 1) throw Error(errc::unknown_index, "paraproducts exclude u = 0");
    OneParamTerms out;
    for (const Cube& q : f2.grid->cubes) {
        if (!f2.usable(q.id)) continue;
        const CubeHaar& h = f2.basis->at(q.id);
        if (u2 > h.num_haar() || h.zero[static_cast<std::size_t>(u2 - 1)]) continue;
        const double c = f2.basis->coefficient(q.id, u2, a);
        if (c != 0.0) out.terms.push_back({q.id, f2.shifted(q.id), c});
    }
    return out;
}

double cube_average(const FactorFrame& f2, int shift_cube, const std::vector<double>& w) {
    const Cube& q = f2.shift_grid->cube(shift_cube);
    if (q.mass <= 0.0) return 0.0;
    double s = 0.0;
    for (PointId p : q.members) s += w[static_cast<std::size_t>(p)] * f2.space->weight(p);
    return s / q.mass;
}

}  // namespace

std::vector<double> pi_one(const FactorFrame& f2, const std::vector<double>& a,
                           const std::vector<double>& omega, int u2) {
    const auto tm = collect_terms(f2, a, u2);
    std::vector<double> out(static_cast<std::size_t>(f2.space->size()), 0.0);
    for (const auto& t : tm.terms) {
        const double avg = cube_average(f2, t.shifted, omega);
        if (avg == 0.0) continue;
        const double v = avg * t.coef;
        for (PointId p : f2.grid->cube(t.cube).members)
            out[static_cast<std::size_t>(p)] += v * f2.basis->value(t.cube, u2, p);
    }
    return out;
}

std::vector<double> pi_one_adjoint(const FactorFrame& f2, const std::vector<double>& a,
                                   const std::vector<double>& v, int u2) {
    const auto tm = collect_terms(f2, a, u2);
    std::vector<double> out(static_cast<std::size_t>(f2.space->size()), 0.0);
    for (const auto& t : tm.terms) {
        const double ip = f2.basis->coefficient(t.cube, u2, v);
        const Cube& sq = f2.shift_grid->cube(t.shifted);
        if (sq.mass <= 0.0) continue;
        const double add = ip * t.coef / sq.mass;
        for (PointId p : sq.members) out[static_cast<std::size_t>(p)] += add;
    }
    return out;
}

std::map<int, double> carleson_boxes(const FactorFrame& f2, const std::vector<double>& a, int u2) {
    std::map<int, double> alpha;
    const auto tm = collect_terms(f2, a, u2);
    for (const auto& t : tm.terms) alpha[t.shifted] += t.coef * t.coef;
    for (auto& [cube, v] : alpha) {
        const double m = f2.shift_grid->cube(cube).mass;
        v = m > 0.0 ? v / m : 0.0;
    }
    return alpha;
}

double carleson_box_constant(const FactorFrame& f2, const std::vector<double>& a, int u2,
                             double symbol_norm) {
    const auto alpha = carleson_boxes(f2, a, u2);
    if (alpha.empty() || symbol_norm <= 0.0) return 0.0;
    double worst = 0.0;
    for (const Cube& top : f2.shift_grid->cubes) {
        double sum = 0.0;
        for (const auto& [cube, av] : alpha) {
            // Q c Q' inside one grid means Q' is an ancestor-or-self
            for (int id = cube; id >= 0; id = f2.shift_grid->cube(id).parent)
                if (id == top.id) {
                    sum += av * f2.shift_grid->cube(cube).mass;
                    break;
                }
        }
        if (top.mass > 0.0 && sum > 0.0)
            worst = std::max(worst, sum / (top.mass * symbol_norm * symbol_norm));
    }
    return worst;
}

RatioReport pi_one_norm_check(const FactorFrame& f2, const std::vector<double>& a, int u2,
                              const std::vector<std::vector<double>>& samples, double kappa) {
    if (samples.empty()) throw Error(errc::bad_config, "samples must be nonempty");
    RatioReport rep;
    const PointSpace& space = *f2.space;
    const int n = space.size();

    for (const auto& w : samples) {
        double nw = 0.0;
        for (PointId p = 0; p < n; ++p)
            nw += w[static_cast<std::size_t>(p)] * w[static_cast<std::size_t>(p)] * space.weight(p);
        if (nw <= 0.0) continue;
        const auto pw = pi_one(f2, a, w, u2);
        double np = 0.0;
        for (PointId p = 0; p < n; ++p)
            np += pw[static_cast<std::size_t>(p)] * pw[static_cast<std::size_t>(p)] * space.weight(p);
        rep.empirical_norm = std::max(rep.empirical_norm, std::sqrt(np / nw));
    }

    // assembled matrix in the weighted frame, refined by power iteration
    std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                       std::vector<double>(static_cast<std::size_t>(n), 0.0));
    for (PointId q = 0; q < n; ++q) {
        std::vector<double> e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(q)] = 1.0;
        const auto col = pi_one(f2, a, e, u2);
        const double wq = std::sqrt(space.weight(q));
        for (PointId p = 0; p < n; ++p)
            m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
                std::sqrt(space.weight(p)) * col[static_cast<std::size_t>(p)] * wq;
    }
    const auto nrm = matrix_l2_norm(m, 20000, 1e-12);
    rep.operator_norm = std::max(nrm.value, rep.empirical_norm);
    rep.converged = nrm.converged;

    rep.symbol_norm = bmo_kappa2_norm(space, a, kappa, *f2.grid);
    rep.ratio = rep.symbol_norm > 0.0 ? rep.operator_norm / rep.symbol_norm : 0.0;
    rep.box_constant = carleson_box_constant(f2, a, u2, rep.symbol_norm);
    return rep;
}

namespace {

struct FullTerms {
    struct Term {
        int q1, q2;    // Haar cubes
        int s1, s2;    // shifted containers
        double coef;   // b_{Q1,u1,Q2,u2}
    };
    std::vector<Term> terms;
};

FullTerms collect_full_terms(const ProductFrame& fr, const ProductField& b, int u1, int u2) {
    if (u1 < 1 || u2 < 1) throw Error(errc::unknown_index, "paraproducts exclude u = 0");
    FullTerms out;
    for (const auto& [key, v] : b) {
        const auto& [q1, ku1, q2, ku2] = key;
        if (ku1 != u1 || ku2 != u2 || v == 0.0) continue;
        if (!fr.f1.usable(q1) || !fr.f2.usable(q2))
            throw Error(errc::bad_cube_entry, "symbol entry on a bad or unshifted cube");
        out.terms.push_back({q1, q2, fr.f1.shifted(q1), fr.f2.shifted(q2), v});
    }
    return out;
}

double rect_average(const ProductFrame& fr, int s1, int s2, const std::vector<double>& w) {
    const Cube& a = fr.f1.shift_grid->cube(s1);
    const Cube& b = fr.f2.shift_grid->cube(s2);
    const double m = a.mass * b.mass;
    if (m <= 0.0) return 0.0;
    double s = 0.0;
    for (PointId p1 : a.members) {
        const double w1 = fr.f1.space->weight(p1);
        if (w1 == 0.0) continue;
        for (PointId p2 : b.members)
            s += w[cell_index(fr, p1, p2)] * w1 * fr.f2.space->weight(p2);
    }
    return s / m;
}

double tensor_coefficient(const ProductFrame& fr, int q1, int u1, int q2, int u2,
                          const std::vector<double>& v) {
    double s = 0.0;
    for (PointId p1 : fr.f1.grid->cube(q1).members) {
        const double h1 = fr.f1.basis->value(q1, u1, p1) * fr.f1.space->weight(p1);
        if (h1 == 0.0) continue;
        for (PointId p2 : fr.f2.grid->cube(q2).members)
            s += v[cell_index(fr, p1, p2)] * h1 * fr.f2.basis->value(q2, u2, p2) *
                 fr.f2.space->weight(p2);
    }
    return s;
}

void add_tensor_haar(const ProductFrame& fr, int q1, int u1, int q2, int u2, double scale,
                     std::vector<double>& out) {
    for (PointId p1 : fr.f1.grid->cube(q1).members) {
        const double h1 = fr.f1.basis->value(q1, u1, p1);
        if (h1 == 0.0) continue;
        for (PointId p2 : fr.f2.grid->cube(q2).members)
            out[cell_index(fr, p1, p2)] += scale * h1 * fr.f2.basis->value(q2, u2, p2);
    }
}

}  // namespace

std::vector<double> pi_full(const ProductFrame& fr, const ProductField& b,
                            const std::vector<double>& w, int u1, int u2) {
    const auto tm = collect_full_terms(fr, b, u1, u2);
    std::vector<double> out(fr.cells(), 0.0);
    for (const auto& t : tm.terms) {
        const double avg = rect_average(fr, t.s1, t.s2, w);
        if (avg != 0.0) add_tensor_haar(fr, t.q1, u1, t.q2, u2, avg * t.coef, out);
    }
    return out;
}

std::vector<double> pi_full_adjoint(const ProductFrame& fr, const ProductField& b,
                                    const std::vector<double>& v, int u1, int u2) {
    const auto tm = collect_full_terms(fr, b, u1, u2);
    std::vector<double> out(fr.cells(), 0.0);
    for (const auto& t : tm.terms) {
        const double ip = tensor_coefficient(fr, t.q1, u1, t.q2, u2, v);
        if (ip == 0.0) continue;
        const Cube& a = fr.f1.shift_grid->cube(t.s1);
        const Cube& c = fr.f2.shift_grid->cube(t.s2);
        const double m = a.mass * c.mass;
        if (m <= 0.0) continue;
        const double add = ip * t.coef / m;
        for (PointId p1 : a.members)
            for (PointId p2 : c.members) out[cell_index(fr, p1, p2)] += add;
    }
    return out;
}

RatioReport pi_full_norm_check(const ProductFrame& fr, const ProductField& b, int u1, int u2,
                               const std::vector<std::vector<double>>& samples) {
    if (samples.empty()) throw Error(errc::bad_config, "samples must be nonempty");
    RatioReport rep;
    for (const auto& w : samples) {
        const double nw = product_norm_l2(fr, w);
        if (nw <= 0.0) continue;
        rep.empirical_norm =
            std::max(rep.empirical_norm, product_norm_l2(fr, pi_full(fr, b, w, u1, u2)) / nw);
    }
    // power iteration on Pi* Pi, matrix-free
    std::vector<double> v(fr.cells(), 1.0);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += 0.1 * static_cast<double>(i % 7);
    double nv = product_norm_l2(fr, v);
    double prev = -1.0;
    rep.converged = false;
    if (nv > 0.0) {
        for (auto& x : v) x /= nv;
        for (int it = 0; it < 500; ++it) {
            const auto u = pi_full(fr, b, v, u1, u2);
            const double sigma = product_norm_l2(fr, u);
            rep.operator_norm = sigma;
            if (sigma == 0.0) {
                rep.converged = true;
                break;
            }
            auto w = pi_full_adjoint(fr, b, u, u1, u2);
            const double wn = product_norm_l2(fr, w);
            if (wn == 0.0) {
                rep.converged = true;
                break;
            }
            for (auto& x : w) x /= wn;
            v = std::move(w);
            if (prev >= 0.0 && std::abs(sigma - prev) <= 1e-11 * std::max(sigma, 1e-300)) {
                rep.converged = true;
                break;
            }
            prev = sigma;
        }
    } else {
        rep.converged = true;
    }
    rep.operator_norm = std::max(rep.operator_norm, rep.empirical_norm);

    ProductField slice;
    for (const auto& [key, val] : b)
        if (std::get<1>(key) == u1 && std::get<3>(key) == u2) slice[key] = val;
    rep.symbol_norm = bmo_prod_norm(fr, slice, canonical_candidates(fr, slice));
    rep.ratio = rep.symbol_norm > 0.0 ? rep.operator_norm / rep.symbol_norm : 0.0;
    return rep;
}

std::vector<double> pi_mixed(const ProductFrame& mixed_fr, const ProductField& b,
                             const std::vector<double>& w, int u1, int u2p) {
    const auto tm = collect_full_terms(mixed_fr, b, u1, u2p);
    std::vector<double> out(mixed_fr.cells(), 0.0);
    const auto& fr = mixed_fr;
    for (const auto& t : tm.terms) {
        // <w, h_{u1}^{Q1} x chi_{Q2}/mu(Q2)> with Q2 = S(Q2') in factor 2
        const Cube& q2 = fr.f2.shift_grid->cube(t.s2);
        if (q2.mass <= 0.0) continue;
        double ip = 0.0;
        for (PointId p1 : fr.f1.grid->cube(t.q1).members) {
            const double h1 = fr.f1.basis->value(t.q1, u1, p1) * fr.f1.space->weight(p1);
            if (h1 == 0.0) continue;
            for (PointId p2 : q2.members)
                ip += w[cell_index(fr, p1, p2)] * h1 * fr.f2.space->weight(p2);
        }
        ip /= q2.mass;
        if (ip == 0.0) continue;
        // output block chi_{S(Q1)}/mu(S(Q1)) x h_{u2'}^{Q2'}
        const Cube& s1 = fr.f1.shift_grid->cube(t.s1);
        if (s1.mass <= 0.0) continue;
        const double scale = ip * t.coef / s1.mass;
        for (PointId p1 : s1.members)
            for (PointId p2 : fr.f2.grid->cube(t.q2).members)
                out[cell_index(fr, p1, p2)] += scale * fr.f2.basis->value(t.q2, u2p, p2);
    }
    return out;
}

RatioReport pi_mixed_bound_check(
    const ProductFrame& mixed_fr, const ProductField& b, int u1, int u2p,
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& samples) {
    if (samples.empty()) throw Error(errc::bad_config, "samples must be nonempty");
    RatioReport rep;
    for (const auto& [w, v] : samples) {
        const double nw = product_norm_l2(mixed_fr, w);
        const double nv = product_norm_l2(mixed_fr, v);
        if (nw <= 0.0 || nv <= 0.0) continue;
        const double p = std::abs(product_inner(mixed_fr, pi_mixed(mixed_fr, b, w, u1, u2p), v));
        rep.empirical_norm = std::max(rep.empirical_norm, p / (nw * nv));
    }
    rep.operator_norm = rep.empirical_norm;
    ProductField slice;
    for (const auto& [key, val] : b)
        if (std::get<1>(key) == u1 && std::get<3>(key) == u2p) slice[key] = val;
    rep.symbol_norm = bmo_prod_norm(mixed_fr, slice, canonical_candidates(mixed_fr, slice));
    rep.ratio = rep.symbol_norm > 0.0 ? rep.operator_norm / rep.symbol_norm : 0.0;
    return rep;
}

}  // namespace carleson
