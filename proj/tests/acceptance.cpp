// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here; the equivalent CLI configurations
// live under configs/.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "carleson/bidisc.hpp"
#include "carleson/cli.hpp"
#include "carleson/paraproducts.hpp"
#include "carleson/rng.hpp"
#include "carleson/t1testing.hpp"

using namespace carleson;

namespace {

int failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.c_str());
    if (!pass) ++failures;
}

cli::ExperimentConfig base_config(const std::string& kind, std::uint64_t seed) {
    cli::ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.seed = seed;
    cfg.out_dir = "acceptance-out";
    cfg.jobs = 4;
    return cfg;
}

std::string g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// ---------------------------------------------------------------------------

void criterion_1_axioms() {
    auto cfg = base_config("axioms", 1);
    cfg.params = {{"count", 100}, {"min_points", 24}, {"max_points", 512},
                  {"generations", 3}, {"time_limit_seconds", 60}};
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = cli::run(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report(1, "dyadic axioms on 100 seeded random spaces", rc == 0 && secs <= 60.0,
           "exit " + std::to_string(rc) + ", " + g(secs) + " s");
}

void criterion_2_haar() {
    auto cfg = base_config("haar", 2);
    cfg.params = {{"count", 100}, {"tolerance", 1e-10}};
    const int rc = cli::run(cfg);
    report(2, "Haar orthonormality and lift/project round trip at 1e-10", rc == 0,
           "exit " + std::to_string(rc));
}

void criterion_3_badness() {
    auto cfg = base_config("badness", 3);
    cfg.params = {{"count", 10}, {"trials", 200}, {"points", 384}, {"min_monotone", 9}};
    cfg.lists = {{"r_list", {1, 2, 3}}};
    const int rc = cli::run(cfg);
    report(3, "badness decay nonincreasing in r on >= 9 of 10 spaces", rc == 0,
           "exit " + std::to_string(rc));
}

void criterion_4_duality() {
    auto cfg = base_config("norms", 4);
    cfg.params = {{"instances", 10}, {"pairs", 10}, {"duality_budget", 10.0}};
    const int rc = cli::run(cfg);
    report(4, "duality bound over 100 pairs with suite constant <= 10", rc == 0,
           "exit " + std::to_string(rc));
}

void criterion_5_paraproducts() {
    auto cfg = base_config("paraproducts", 5);
    cfg.params = {{"symbols", 30},       {"samples", 10},      {"budget_pi_one", 4.0},
                  {"budget_pi_full", 4.0}, {"budget_pi_mixed", 4.0}, {"budget_box", 8.0},
                  {"kappa", 2.0}};
    const int rc = cli::run(cfg);
    report(5, "paraproduct ratios and Carleson boxes within frozen budgets", rc == 0,
           "exit " + std::to_string(rc));
}

void criterion_6_schur() {
    // power-iteration norms against the dense SVD oracle plus frozen budgets
    double worst_dev = 0.0, worst_sep = 0.0, worst_in = 0.0;
    for (int i = 0; i < 20; ++i) {
        const auto inst =
            cli::make_product_instance(40, 36, mix_seed(61, static_cast<std::uint64_t>(i)), 1, -1,
                                       2, 0.7, 4.0);
        const auto sm = schur_matrices(inst.s1, inst.dom1, inst.d1, inst.d1p, 1.0, inst.goodness);
        const std::vector<const std::vector<std::vector<double>>*> mats = {&sm.a_sep, &sm.a_in};
        for (const auto* m : mats) {
            Eigen::MatrixXd e(static_cast<int>(m->size()), static_cast<int>(m->front().size()));
            for (std::size_t r = 0; r < m->size(); ++r)
                for (std::size_t c = 0; c < m->front().size(); ++c)
                    e(static_cast<int>(r), static_cast<int>(c)) = (*m)[r][c];
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(e);
            const double oracle = svd.singularValues()(0);
            const double got = (m == &sm.a_sep) ? sm.sep_norm : sm.in_norm;
            worst_dev = std::max(worst_dev, std::abs(got - oracle));
        }
        worst_sep = std::max(worst_sep, sm.sep_norm);
        worst_in = std::max(worst_in, sm.in_norm);
    }
    const bool pass = worst_dev <= 1e-6 && worst_sep <= 2.0 && worst_in <= 2.0;
    report(6, "Schur matrix norms match dense SVD to 1e-6 within budgets", pass,
           "dev " + g(worst_dev) + ", sep " + g(worst_sep) + ", in " + g(worst_in));
}

void criterion_7_pairing() {
    // 50 good rectangles, 3 nested ball choices each, agreement to 1e-8
    double worst = 0.0;
    int tested = 0;
    for (std::uint64_t s = 0; tested < 50 && s < 6; ++s) {
        const auto inst = cli::make_product_instance(32, 28, mix_seed(71, s), 1, -1, 2, 0.7, 4.0);
        const KernelSpec kernel = product_kernel(inv_lambda_kernel(inst.s1, inst.dom1, 1.0, 4.0),
                                                 inv_lambda_kernel(inst.s2, inst.dom2, 1.0, 4.0));
        const auto op = make_operator(kernel, inst.s1, inst.s2);
        for (const Cube& q1 : inst.d1.cubes) {
            if (tested >= 50) break;
            if (!inst.frame.f1.usable(q1.id) || inst.b1.at(q1.id).num_haar() < 1) continue;
            for (const Cube& q2 : inst.d2.cubes) {
                if (tested >= 50) break;
                if (!inst.frame.f2.usable(q2.id) || inst.b2.at(q2.id).num_haar() < 1) continue;
                const double base1 = kernel.c_k * cube_outer_constant(1.0) * q1.side;
                const double base2 = kernel.c_k * cube_outer_constant(1.0) * q2.side;
                double ref = 0.0;
                for (int choice = 0; choice < 3; ++choice) {
                    const double v = t1_pairing(
                        op, inst.frame, q1.id, 1, q2.id, 1,
                        Ball{q1.center,
                             (1.0 + choice) * base1 + 0.05 * choice * inst.s1.diameter()},
                        Ball{q2.center,
                             (1.0 + choice) * base2 + 0.05 * choice * inst.s2.diameter()});
                    if (choice == 0)
                        ref = v;
                    else
                        worst = std::max(worst, std::abs(v - ref));
                }
                ++tested;
            }
        }
    }
    report(7, "T(1) pairings independent of the ball choice to 1e-8",
           tested >= 50 && worst <= 1e-8, std::to_string(tested) + " rects, dev " + g(worst));
}

void criterion_8_global_testing() {
    auto cfg = base_config("testing", 6);
    cfg.params = {{"instances", 20},        {"rectangles", 50},   {"budget_schur_sep", 2.0},
                  {"budget_schur_in", 2.0}, {"budget_band", 1e3}, {"pairing_tolerance", 1e-8},
                  {"upsilon", 0.1},         {"eps", 0.1},         {"cover_seeds", 20}};
    const int rc = cli::run(cfg);
    report(8, "global testing: Cauchy-Schwarz cap exact, band <= 1e3", rc == 0,
           "exit " + std::to_string(rc));
}

void criterion_9_bidisc() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string detail;

    // embedding of the origin point mass is exactly 1 at any truncation
    double emb_dev = 0.0;
    for (int n : {0, 4, 16})
        emb_dev = std::max(emb_dev,
                           std::abs(embedding_constant({{0.0, 0.0, 1.0}}, 0.0, 0.0, n) - 1.0));
    pass = pass && emb_dev <= 1e-12;
    detail += "pointmass dev " + g(emb_dev);

    // truncated reproducing property on random degree-<=N polynomials
    Rng rng(91);
    double rep_dev = 0.0;
    const int n_max = 5;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::vector<std::complex<double>>> coef(
            n_max + 1, std::vector<std::complex<double>>(n_max + 1));
        double norm = 0.0;
        for (int a = 0; a <= n_max; ++a)
            for (int b = 0; b <= n_max; ++b) {
                coef[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] = {
                    rng.uniform(-1, 1), rng.uniform(-1, 1)};
                norm += std::norm(coef[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)]);
            }
        norm = std::sqrt(norm);
        const std::complex<double> l1 = std::polar(0.7 * std::sqrt(rng.uniform()),
                                                   rng.uniform(0.0, 6.283185307179586));
        const std::complex<double> l2 = std::polar(0.7 * std::sqrt(rng.uniform()),
                                                   rng.uniform(0.0, 6.283185307179586));
        std::complex<double> via_pairing = 0.0, direct = 0.0;
        std::complex<double> p1 = 1.0;
        for (int a = 0; a <= n_max; ++a) {
            std::complex<double> p2 = 1.0;
            for (int b = 0; b <= n_max; ++b) {
                via_pairing += coef[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] * p1 * p2;
                direct += coef[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] *
                          std::pow(l1, a) * std::pow(l2, b);
                p2 *= l2;
            }
            p1 *= l1;
        }
        rep_dev = std::max(rep_dev, std::abs(via_pairing - direct) / std::max(norm, 1.0));
    }
    pass = pass && rep_dev <= 1e-9;
    detail += ", reproducing dev " + g(rep_dev);

    // Hardy factor partial sum at lambda = z = 0.5
    const double hardy_dev =
        std::abs(kernel_factor_eval(0.0, 0.5, 0.5, 64) - std::complex<double>(1.0 / 0.75, 0.0));
    pass = pass && hardy_dev <= 1e-9;
    detail += ", hardy dev " + g(hardy_dev);

    // Carleson equivalence band over 30 random measures at N = 16
    auto cfg = base_config("carleson", 7);
    cfg.params = {{"count", 30}, {"points", 60}, {"n_max", 16}, {"s1", 0.0}, {"s2", 0.0},
                  {"budget_log_ratio", 1.0}};
    const int rc = cli::run(cfg);
    pass = pass && rc == 0;
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    pass = pass && secs <= 300.0;
    detail += ", band exit " + std::to_string(rc) + ", " + g(secs) + " s";
    report(9, "bidisc kernels, embedding, Carleson equivalence band", pass, detail);
}

void criterion_10_surgery_covering() {
    bool pass = true;
    std::string detail;

    // decomposition identity chi_Q = chi_{Q_s} + chi_{Q_d} + chi_Delta on all
    // tested adjacent-scale pairs
    int pairs = 0, exact = 0;
    const auto inst = cli::make_product_instance(64, 48, 101, 1, -1, 2, 0.7, 4.0);
    for (const Cube& q : inst.d1.cubes)
        for (const Cube& qp : inst.d1p.cubes) {
            if (!(q.gen >= qp.gen && q.gen <= qp.gen + 1) || pairs >= 40) continue;
            const auto s = surgery(inst.s1, inst.d1, inst.d1p, q.id, qp.id, 0.1, 1);
            ++pairs;
            std::vector<int> seen(static_cast<std::size_t>(inst.s1.size()), 0);
            for (PointId p : s.q_s) seen[static_cast<std::size_t>(p)]++;
            for (PointId p : s.q_d) seen[static_cast<std::size_t>(p)]++;
            for (PointId p : s.delta) seen[static_cast<std::size_t>(p)]++;
            bool ok = true;
            for (PointId p = 0; p < inst.s1.size(); ++p) {
                const int expected = inst.d1.contains(q.id, p) ? 1 : 0;
                ok = ok && seen[static_cast<std::size_t>(p)] == expected;
            }
            if (ok) ++exact;
        }
    pass = pass && pairs > 0 && exact == pairs;
    detail += std::to_string(exact) + "/" + std::to_string(pairs) + " exact";

    // coverings reach 1 - upsilon on average over 20 seeds
    double coverage = 0.0;
    for (int s = 0; s < 20; ++s)
        coverage +=
            ball_covering(inst.s1, 1.0 / 64.0, -1, 0.1, mix_seed(103, static_cast<std::uint64_t>(s)))
                .coverage;
    coverage /= 20.0;
    pass = pass && coverage >= 0.9;
    detail += ", coverage " + g(coverage);

    // surgery probability nonincreasing in eps, on a lattice long enough that
    // generation -1 genuinely splits (diameter above 1/delta)
    const PointSpace lat = cli::make_product_instance(320, 16, 107, 1, -1, 2, 0.7, 4.0).s1;
    std::vector<double> mean, se;
    for (double eps : {0.2, 0.1, 0.05}) {
        const auto rep = surgery_probability(lat, 1.0 / 128.0, -1, 1, -1, eps, 40, 11);
        mean.push_back(rep.mean);
        se.push_back(rep.stderr_mean);
    }
    const bool mono = mean[0] > 0.0 && mean[1] <= mean[0] + 2.0 * (se[0] + se[1]) &&
                      mean[2] <= mean[1] + 2.0 * (se[1] + se[2]);
    pass = pass && mono;
    detail += ", eps means " + g(mean[0]) + "/" + g(mean[1]) + "/" + g(mean[2]);

    report(10, "surgery decomposition, coverings, shell probability decay", pass, detail);
}

}  // namespace

int main() {
    criterion_1_axioms();
    criterion_2_haar();
    criterion_3_badness();
    criterion_4_duality();
    criterion_5_paraproducts();
    criterion_6_schur();
    criterion_7_pairing();
    criterion_8_global_testing();
    criterion_9_bidisc();
    criterion_10_surgery_covering();
    if (failures == 0)
        std::printf("acceptance: all 10 criteria passed\n");
    else
        std::printf("acceptance: %d criterion(s) FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}
