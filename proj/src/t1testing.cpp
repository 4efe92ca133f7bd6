#include "carleson/t1testing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "carleson/errors.hpp"
#include "carleson/paraproducts.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> indicator(const PointSpace& space, const std::vector<PointId>& pts) {
    std::vector<double> f(static_cast<std::size_t>(space.size()), 0.0);
    for (PointId p : pts) f[static_cast<std::size_t>(p)] = 1.0;
    return f;
}

std::vector<double> complement_of(const std::vector<double>& f) {
    std::vector<double> g(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) g[i] = f[i] != 0.0 ? 0.0 : 1.0;
    return g;
}

double l2_mu(const PointSpace& space, const std::vector<double>& f) {
    double s = 0.0;
    for (PointId p = 0; p < space.size(); ++p)
        s += f[static_cast<std::size_t>(p)] * f[static_cast<std::size_t>(p)] * space.weight(p);
    return std::sqrt(s);
}

struct ConditionTracker {
    TestingCondition cond;
    explicit ConditionTracker(std::string name) { cond.name = std::move(name); }
    void observe(double lhs, double rhs) {
        cond.family_size++;
        if (rhs > 0.0)
            cond.constant = std::max(cond.constant, lhs / rhs);
        else if (lhs > 0.0)
            cond.constant = kInf;
    }
};

}  // namespace

TestingReport weak_boundedness(const TruncatedOperator& op, double lambda_dilation,
                               const std::vector<BallPair>& family, double bump_eps) {
    if (family.empty()) throw Error(errc::bad_config, "ball-pair family is empty");
    const PointSpace& s1 = *op.space1;
    const PointSpace& s2 = *op.space2;
    const TruncatedOperator adj = op.with_variant(
        op.variant == OperatorVariant::T ? OperatorVariant::TStar : OperatorVariant::T);

    ConditionTracker full("full_wbp");
    ConditionTracker full_bump("full_wbp_bump");
    ConditionTracker partial1("partial_bmo_1");
    ConditionTracker partial2("partial_bmo_2");
    ConditionTracker partial1_bump("partial_bmo_bump_1");
    ConditionTracker partial2_bump("partial_bmo_bump_2");
    ConditionTracker point1("partial_wbp_pointmass_1");
    ConditionTracker point2("partial_wbp_pointmass_2");

    for (const BallPair& bp : family) {
        const auto m1 = ball_members(s1, bp.b1);
        const auto m2 = ball_members(s2, bp.b2);
        const auto chi1 = indicator(s1, m1);
        const auto chi2 = indicator(s2, m2);
        const double lam1 = ball_mass(s1, {bp.b1.center, lambda_dilation * bp.b1.radius});
        const double lam2 = ball_mass(s2, {bp.b2.center, lambda_dilation * bp.b2.radius});

        // full: |<T(chi x chi), chi x chi>| <= C mu(L B1) mu(L B2)
        full.observe(std::abs(pair_tensor(op, chi1, chi2, chi1, chi2)), lam1 * lam2);

        // bump variant with chi~ = chi_{(1+eps)B} and enlarged primed balls
        const auto bump1 = indicator(s1, ball_members(s1, {bp.b1.center,
                                                           (1.0 + bump_eps) * bp.b1.radius}));
        const auto bump2 = indicator(s2, ball_members(s2, {bp.b2.center,
                                                           (1.0 + bump_eps) * bp.b2.radius}));
        const auto bump1p = indicator(
            s1, ball_members(s1, {bp.b1.center, 1.5 * (1.0 + bump_eps) * bp.b1.radius}));
        const auto bump2p = indicator(
            s2, ball_members(s2, {bp.b2.center, 1.5 * (1.0 + bump_eps) * bp.b2.radius}));
        full_bump.observe(std::abs(pair_tensor(op, bump1p, bump2p, bump1, bump2)), lam1 * lam2);

        // point-mass variants: pairings against delta_{x_B}
        std::vector<double> pm1(static_cast<std::size_t>(s1.size()), 0.0);
        pm1[static_cast<std::size_t>(bp.b1.center)] = 1.0;
        std::vector<double> pm2(static_cast<std::size_t>(s2.size()), 0.0);
        pm2[static_cast<std::size_t>(bp.b2.center)] = 1.0;
        point1.observe(std::abs(pair_tensor(op, bump1p, bump2p, bump1, pm2)) +
                           std::abs(pair_tensor(adj, bump1p, bump2p, bump1, pm2)),
                       lam1);
        point2.observe(std::abs(pair_tensor(op, bump1p, bump2p, pm1, bump2)) +
                           std::abs(pair_tensor(adj, bump1p, bump2p, pm1, bump2)),
                       lam2);

        // partial x BMO with atoms in one factor
        for (const auto& atom : make_atoms(s1, bp.b1)) {
            const double na = l2_mu(s1, atom);
            partial1.observe(std::abs(pair_tensor(op, chi1, chi2, atom, chi2)) +
                                 std::abs(pair_tensor(adj, chi1, chi2, atom, chi2)),
                             na * std::sqrt(lam1) * lam2);
            partial1_bump.observe(std::abs(pair_tensor(op, bump1, bump2, atom, bump2)) +
                                      std::abs(pair_tensor(adj, bump1, bump2, atom, bump2)),
                                  na * std::sqrt(lam1) * lam2);
        }
        for (const auto& atom : make_atoms(s2, bp.b2)) {
            const double na = l2_mu(s2, atom);
            partial2.observe(std::abs(pair_tensor(op, chi1, chi2, chi1, atom)) +
                                 std::abs(pair_tensor(adj, chi1, chi2, chi1, atom)),
                             na * lam1 * std::sqrt(lam2));
            partial2_bump.observe(std::abs(pair_tensor(op, bump1, bump2, bump1, atom)) +
                                      std::abs(pair_tensor(adj, bump1, bump2, bump1, atom)),
                                  na * lam1 * std::sqrt(lam2));
        }
    }

    TestingReport rep;
    for (auto* t : {&full, &full_bump, &partial1, &partial2, &partial1_bump, &partial2_bump,
                    &point1, &point2})
        rep.conditions.push_back(t->cond);
    return rep;
}

double t1_pairing(const TruncatedOperator& op, const ProductFrame& fr, int q1, int u1, int q2,
                  int u2, const Ball& u_ball, const Ball& v_ball, PairingDiagnostics* diag) {
    const PointSpace& s1 = *fr.f1.space;
    const PointSpace& s2 = *fr.f2.space;
    const Cube& a = fr.f1.grid->cube(q1);
    const Cube& b = fr.f2.grid->cube(q2);
    const double c_k = op.kernel.c_k;

    // C_K B(Q) c U, checked on the point set
    const Ball need1{a.center, c_k * cube_outer_constant(s1.a0()) * a.side};
    const Ball need2{b.center, c_k * cube_outer_constant(s2.a0()) * b.side};
    const auto un = ball_members(s1, u_ball);
    const auto vn = ball_members(s2, v_ball);
    std::vector<bool> in_u(static_cast<std::size_t>(s1.size()), false);
    for (PointId p : un) in_u[static_cast<std::size_t>(p)] = true;
    std::vector<bool> in_v(static_cast<std::size_t>(s2.size()), false);
    for (PointId p : vn) in_v[static_cast<std::size_t>(p)] = true;
    for (PointId p : ball_members(s1, need1))
        if (!in_u[static_cast<std::size_t>(p)])
            throw Error(errc::ball_too_small, "U misses C_K B(Q1)");
    for (PointId p : ball_members(s2, need2))
        if (!in_v[static_cast<std::size_t>(p)])
            throw Error(errc::ball_too_small, "V misses C_K B(Q2)");

    std::vector<double> h1(static_cast<std::size_t>(s1.size()), 0.0);
    for (PointId p = 0; p < s1.size(); ++p)
        h1[static_cast<std::size_t>(p)] = fr.f1.basis->value(q1, u1, p);
    std::vector<double> h2(static_cast<std::size_t>(s2.size()), 0.0);
    for (PointId p = 0; p < s2.size(); ++p)
        h2[static_cast<std::size_t>(p)] = fr.f2.basis->value(q2, u2, p);

    const auto chi_u = indicator(s1, un);
    const auto chi_v = indicator(s2, vn);
    const auto chi_uc = complement_of(chi_u);
    const auto chi_vc = complement_of(chi_v);

    PairingDiagnostics d;
    d.a1 = pair_tensor(op, chi_u, chi_v, h1, h2);
    d.a2 = pair_tensor(op, chi_uc, chi_v, h1, h2);
    d.a3 = pair_tensor(op, chi_u, chi_vc, h1, h2);
    d.a4 = pair_tensor(op, chi_uc, chi_vc, h1, h2);
    if (diag) *diag = d;
    return d.total();
}

ProductField s1_coefficients(const TruncatedOperator& op, const ProductFrame& fr,
                             OperatorVariant variant) {
    const TruncatedOperator sop = op.with_variant(variant);
    const std::vector<double> one1(static_cast<std::size_t>(fr.n1()), 1.0);
    const std::vector<double> one2(static_cast<std::size_t>(fr.n2()), 1.0);
    ProductField c;
    for (const Cube& q1 : fr.f1.grid->cubes) {
        if (!fr.f1.usable(q1.id)) continue;
        const CubeHaar& h1 = fr.f1.basis->at(q1.id);
        for (int u1 = 1; u1 <= h1.num_haar(); ++u1) {
            if (h1.zero[static_cast<std::size_t>(u1 - 1)]) continue;
            std::vector<double> hv1(static_cast<std::size_t>(fr.n1()), 0.0);
            for (PointId p = 0; p < fr.n1(); ++p)
                hv1[static_cast<std::size_t>(p)] = fr.f1.basis->value(q1.id, u1, p);
            for (const Cube& q2 : fr.f2.grid->cubes) {
                if (!fr.f2.usable(q2.id)) continue;
                const CubeHaar& h2 = fr.f2.basis->at(q2.id);
                for (int u2 = 1; u2 <= h2.num_haar(); ++u2) {
                    if (h2.zero[static_cast<std::size_t>(u2 - 1)]) continue;
                    std::vector<double> hv2(static_cast<std::size_t>(fr.n2()), 0.0);
                    for (PointId p = 0; p < fr.n2(); ++p)
                        hv2[static_cast<std::size_t>(p)] = fr.f2.basis->value(q2.id, u2, p);
                    const double v = pair_tensor(sop, one1, one2, hv1, hv2);
                    if (v != 0.0) c[{q1.id, u1, q2.id, u2}] = v;
                }
            }
        }
    }
    return c;
}

double s1_bmo_norm(const TruncatedOperator& op, const ProductFrame& fr, OperatorVariant variant,
                   const std::vector<AdmissibleOpenSet>& candidates) {
    const auto c = s1_coefficients(op, fr, variant);
    if (c.empty()) return 0.0;
    return bmo_prod_norm(fr, c, candidates.empty() ? canonical_candidates(fr, c) : candidates);
}

TestingReport global_testing(const TruncatedOperator& op, const ProductFrame& fr,
                             const std::vector<AdmissibleOpenSet>& family) {
    if (family.empty()) throw Error(errc::bad_config, "open-set family is empty");
    TestingReport rep;
    const OperatorVariant variants[] = {OperatorVariant::T, OperatorVariant::TStar,
                                        OperatorVariant::T1, OperatorVariant::T1Star};
    const char* names[] = {"global_T", "global_T*", "global_T1", "global_T1*"};
    for (int vi = 0; vi < 4; ++vi) {
        ConditionTracker t(names[vi]);
        for (const auto& omega : family) {
            const auto cells = open_set_cells(fr, omega);
            std::vector<double> f(fr.cells(), 0.0);
            for (std::size_t i = 0; i < cells.size(); ++i) f[i] = cells[i] ? 1.0 : 0.0;
            const auto sf = apply(op.with_variant(variants[vi]), fr, f);
            const double lhs = product_inner(fr, sf, sf);
            t.observe(lhs, open_set_mass(fr, omega));
        }
        rep.conditions.push_back(t.cond);
    }
    return rep;
}

SchurMatrices schur_matrices(const PointSpace& space, const DominatingFunction& dom,
                             const DyadicSystem& grid, const DyadicSystem& shift_grid,
                             double alpha, const GoodnessParams& params) {
    SchurMatrices out;
    const std::size_t rows = grid.cubes.size();
    const std::size_t cols = shift_grid.cubes.size();
    out.a_sep.assign(rows, std::vector<double>(cols, 0.0));
    out.a_in.assign(rows, std::vector<double>(cols, 0.0));

    for (const Cube& q : grid.cubes) {
        for (const Cube& qp : shift_grid.cubes) {
            const double lq = q.side, lqp = qp.side;
            const double thr = params.c_script * std::pow(lq, params.gamma) *
                               std::pow(lqp, 1.0 - params.gamma);
            const double rho = set_distance(space, q.members, qp.members);
            // separated: l(Q) <= l(Q') and rho(Q,Q') > C l^g l'^{1-g}
            if (q.gen >= qp.gen && rho > thr && std::isfinite(rho)) {
                const double dd = lq + lqp + rho;
                double lam_sup = 0.0;
                for (PointId z : q.members) lam_sup = std::max(lam_sup, dom(z, rho));
                if (lam_sup > 0.0)
                    out.a_sep[static_cast<std::size_t>(q.id)][static_cast<std::size_t>(qp.id)] =
                        std::pow(lq, alpha / 2.0) * std::pow(lqp, alpha / 2.0) /
                        (std::pow(dd, alpha) * lam_sup) * std::sqrt(q.mass) * std::sqrt(qp.mass);
            }
            // nested: l(Q) < delta^r l(Q') and rho(Q,Q') <= C l^g l'^{1-g}
            if (q.gen > qp.gen + params.r && rho <= thr) {
                // the child of Q' containing Q, when containment holds
                int child = -1;
                for (int cid : qp.children)
                    if (shift_grid.subset_external(q.members, cid)) child = cid;
                if (child >= 0) {
                    const double mc = shift_grid.cube(child).mass;
                    if (mc > 0.0 && q.mass > 0.0)
                        out.a_in[static_cast<std::size_t>(q.id)][static_cast<std::size_t>(qp.id)] =
                            std::pow(lq / lqp, alpha / 2.0) * std::sqrt(q.mass / mc);
                }
            }
        }
    }

    const auto sep = matrix_l2_norm(out.a_sep, 20000, 1e-12);
    const auto in = matrix_l2_norm(out.a_in, 20000, 1e-12);
    out.sep_norm = sep.value;
    out.in_norm = in.value;
    out.converged = sep.converged && in.converged;
    return out;
}

SurgerySets surgery(const PointSpace& space, const DyadicSystem& grid,
                    const DyadicSystem& shift_grid, int q, int qp, double eps, int r) {
    const Cube& a = grid.cube(q);
    const Cube& b = shift_grid.cube(qp);
    if (!(a.gen >= b.gen && a.gen <= b.gen + r))
        throw Error(errc::not_adjacent_scales,
                    "need delta^r l(Q') <= l(Q) <= l(Q'), got gens " + std::to_string(a.gen) +
                        " vs " + std::to_string(b.gen));

    const int n = space.size();
    const auto near_boundary = [&](const DyadicSystem& sys, const Cube& c, PointId x) {
        // rho(x, C) <= eps l(C) and rho(x, X \ C) <= eps l(C)
        double dq = kInf;
        for (PointId p : c.members) dq = std::min(dq, space.rho(x, p));
        if (!(dq <= eps * c.side)) return false;
        if (static_cast<int>(c.members.size()) == n) return false;  // empty complement
        double dc = kInf;
        for (PointId y = 0; y < n; ++y)
            if (!sys.contains(c.id, y)) dc = std::min(dc, space.rho(x, y));
        return dc <= eps * c.side;
    };

    SurgerySets s;
    std::vector<bool> in_delta(static_cast<std::size_t>(n), false);
    for (PointId p : a.members)
        if (shift_grid.contains(qp, p)) {
            s.delta.push_back(p);
            in_delta[static_cast<std::size_t>(p)] = true;
        }
    std::vector<bool> in_dq(static_cast<std::size_t>(n), false), in_dqp(static_cast<std::size_t>(n), false);
    for (PointId x = 0; x < n; ++x) {
        if (near_boundary(grid, a, x)) {
            s.delta_q.push_back(x);
            in_dq[static_cast<std::size_t>(x)] = true;
        }
        if (near_boundary(shift_grid, b, x)) {
            s.delta_qp.push_back(x);
            in_dqp[static_cast<std::size_t>(x)] = true;
        }
    }

    // Q_b: members of Q close to the boundary of some adjacent-scale Q'' in D'
    std::vector<bool> in_qb(static_cast<std::size_t>(n), false);
    for (const Cube& c : shift_grid.cubes) {
        if (!(a.gen >= c.gen && a.gen <= c.gen + r)) continue;
        for (PointId p : a.members)
            if (!in_qb[static_cast<std::size_t>(p)] && near_boundary(shift_grid, c, p))
                in_qb[static_cast<std::size_t>(p)] = true;
    }
    for (PointId p : a.members)
        if (in_qb[static_cast<std::size_t>(p)]) s.q_b.push_back(p);
    std::vector<bool> in_qpb(static_cast<std::size_t>(n), false);
    for (const Cube& c : grid.cubes) {
        if (!(c.gen >= b.gen && c.gen <= b.gen + r)) continue;
        for (PointId p : b.members)
            if (!in_qpb[static_cast<std::size_t>(p)] && near_boundary(grid, c, p))
                in_qpb[static_cast<std::size_t>(p)] = true;
    }
    for (PointId p : b.members)
        if (in_qpb[static_cast<std::size_t>(p)]) s.qp_b.push_back(p);

    // Q_s = Q \ (Delta u delta_{Q'}); Q_d = Q \ (Delta u Q_s)
    std::vector<bool> in_qs(static_cast<std::size_t>(n), false);
    for (PointId p : a.members)
        if (!in_delta[static_cast<std::size_t>(p)] && !in_dqp[static_cast<std::size_t>(p)]) {
            s.q_s.push_back(p);
            in_qs[static_cast<std::size_t>(p)] = true;
        }
    for (PointId p : a.members)
        if (!in_delta[static_cast<std::size_t>(p)] && !in_qs[static_cast<std::size_t>(p)])
            s.q_d.push_back(p);
    std::vector<bool> in_qps(static_cast<std::size_t>(n), false);
    for (PointId p : b.members)
        if (!in_delta[static_cast<std::size_t>(p)] && !in_dq[static_cast<std::size_t>(p)]) {
            s.qp_s.push_back(p);
            in_qps[static_cast<std::size_t>(p)] = true;
        }
    for (PointId p : b.members)
        if (!in_delta[static_cast<std::size_t>(p)] && !in_qps[static_cast<std::size_t>(p)])
            s.qp_d.push_back(p);
    for (PointId p : s.delta)
        if (!in_dq[static_cast<std::size_t>(p)] && !in_dqp[static_cast<std::size_t>(p)])
            s.delta_tilde.push_back(p);
    return s;
}

SurgeryProbabilityReport surgery_probability(const PointSpace& space, double delta, int gen_min,
                                             int gen_max, int gen, double eps, int trials,
                                             std::uint64_t seed) {
    if (trials < 1) throw Error(errc::bad_config, "trials must be >= 1");
    const int n = space.size();
    SurgeryProbabilityReport rep;
    rep.trials = trials;
    std::vector<int> hits(static_cast<std::size_t>(n), 0);
    for (int t = 0; t < trials; ++t) {
        const auto sys = build_system(space, delta, gen_min, gen_max,
                                      {mix_seed(seed, 0x5e9 + static_cast<std::uint64_t>(t))});
        for (PointId x = 0; x < n; ++x) {
            const int q = containing_cube(sys, x, gen);
            const Cube& c = sys.cube(q);
            if (static_cast<int>(c.members.size()) == n) continue;
            // x in Q, so x in delta_Q iff the complement is within eps l(Q)
            if (sys.point_complement_distance(q, x) <= eps * c.side)
                hits[static_cast<std::size_t>(x)]++;
        }
    }
    rep.frequency.resize(static_cast<std::size_t>(n));
    double mean = 0.0;
    for (PointId x = 0; x < n; ++x) {
        rep.frequency[static_cast<std::size_t>(x)] =
            static_cast<double>(hits[static_cast<std::size_t>(x)]) / trials;
        mean += rep.frequency[static_cast<std::size_t>(x)];
    }
    mean /= static_cast<double>(n);
    rep.mean = mean;
    double var = 0.0;
    for (double f : rep.frequency) var += (f - mean) * (f - mean);
    rep.stderr_mean = std::sqrt(var / static_cast<double>(n) / static_cast<double>(n));
    return rep;
}

BallCovering ball_covering(const PointSpace& space, double theta, int k, double upsilon,
                           std::uint64_t seed, int max_retries) {
    const double a0 = space.a0();
    if (!(theta > 0.0) || theta >= std::pow(a0, -4.0) / 32.0)
        throw Error(errc::bad_config, "need 0 < theta < A0^{-4}/32");
    const double scale = std::pow(theta, k);
    const double c_frac = std::min(0.25, upsilon / 4.0);
    const double sep = c_frac * scale;
    const double total = space.total_mass();

    BallCovering best;
    best.separation = sep;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        Rng rng(mix_seed(seed, 0xba11 + static_cast<std::uint64_t>(attempt)));
        std::vector<PointId> order(static_cast<std::size_t>(space.size()));
        for (PointId p = 0; p < space.size(); ++p) order[static_cast<std::size_t>(p)] = p;
        rng.shuffle(order);

        std::vector<Ball> balls;
        std::vector<std::vector<PointId>> memberships;
        std::vector<bool> covered(static_cast<std::size_t>(space.size()), false);
        for (PointId p : order) {
            if (covered[static_cast<std::size_t>(p)]) continue;
            double radius = rng.uniform(0.45, 0.5) * scale;
            bool placed = false;
            for (int shrink = 0; shrink < 4 && !placed; ++shrink, radius *= 0.5) {
                if (radius < sep) break;  // radii stay >= c(theta,upsilon) theta^k
                const auto mem = ball_members(space, {p, radius});
                bool ok = true;
                for (const auto& other : memberships) {
                    double dmin = kInf;
                    for (PointId x : mem) {
                        for (PointId y : other) dmin = std::min(dmin, space.rho(x, y));
                        if (dmin < sep) break;
                    }
                    if (dmin < sep) {
                        ok = false;
                        break;
                    }
                }
                if (!ok) continue;
                balls.push_back({p, radius});
                for (PointId x : mem) covered[static_cast<std::size_t>(x)] = true;
                memberships.push_back(mem);
                placed = true;
            }
        }
        double covered_mass = 0.0;
        for (PointId p = 0; p < space.size(); ++p)
            if (covered[static_cast<std::size_t>(p)]) covered_mass += space.weight(p);
        const double coverage = total > 0.0 ? covered_mass / total : 1.0;
        if (coverage > best.coverage || best.balls.empty()) {
            best.balls = std::move(balls);
            best.coverage = coverage;
            best.retries = attempt + 1;
        }
        if (best.coverage >= 1.0 - upsilon) {
            best.achieved = true;
            break;
        }
    }
    return best;
}

}  // namespace carleson
