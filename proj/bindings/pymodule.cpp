#include <pybind11/complex.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "carleson/bidisc.hpp"
#include "carleson/errors.hpp"
#include "carleson/cli.hpp"
#include "carleson/io.hpp"
#include "carleson/paraproducts.hpp"
#include "carleson/t1testing.hpp"

namespace py = pybind11;
using namespace carleson;

namespace {

std::vector<std::string> issues_of(const ValidationReport& rep) {
    std::vector<std::string> out;
    for (const auto& i : rep.issues) out.push_back(i.code + ": " + i.detail);
    return out;
}

DiscreteBidiscMeasure measure_from(
    const std::vector<std::tuple<std::complex<double>, std::complex<double>, double>>& pts) {
    DiscreteBidiscMeasure mu;
    for (const auto& [z1, z2, mass] : pts) mu.push_back({z1, z2, mass});
    return mu;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "dyadic systems, Haar expansions, paraproducts and T(1)-type testing "
              "on finite nonhomogeneous product spaces";

    py::register_exception<Error>(m, "CarlesonError");

    py::class_<PointSpace>(m, "PointSpace")
        .def_static("euclidean", &PointSpace::euclidean, py::arg("coords"), py::arg("weights"),
                    py::arg("a0") = 1.0)
        .def_static("sup", &PointSpace::sup_metric, py::arg("coords"), py::arg("weights"),
                    py::arg("a0") = 1.0)
        .def_static("snowflake", &PointSpace::snowflake, py::arg("coords"), py::arg("weights"),
                    py::arg("power"))
        .def("__len__", &PointSpace::size)
        .def("rho", &PointSpace::rho)
        .def("weight", &PointSpace::weight)
        .def_property_readonly("a0", &PointSpace::a0)
        .def_property_readonly("total_mass", &PointSpace::total_mass)
        .def_property_readonly("diameter", &PointSpace::diameter);

    py::class_<DominatingFunction>(m, "DominatingFunction")
        .def_static("power", &DominatingFunction::power, py::arg("scale"), py::arg("exponent"),
                    py::arg("floor_radius") = 0.0)
        .def("__call__", &DominatingFunction::operator())
        .def_property_readonly("c_lambda", &DominatingFunction::c_lambda)
        .def_property_readonly("t_lambda", &DominatingFunction::t_lambda);

    m.def("fit_power_dominator", &fit_power_dominator, py::arg("space"), py::arg("exponent"));
    m.def("default_radius_grid", &default_radius_grid);
    m.def(
        "validate_space",
        [](const PointSpace& s, const DominatingFunction& d, const std::vector<double>& grid) {
            return issues_of(validate_space(s, d, grid));
        },
        py::arg("space"), py::arg("dominator"), py::arg("radius_grid"));
    m.def(
        "ball_members",
        [](const PointSpace& s, PointId center, double radius) {
            return ball_members(s, {center, radius});
        },
        py::arg("space"), py::arg("center"), py::arg("radius"));
    m.def("tail_integral", &tail_integral, py::arg("space"), py::arg("dominator"),
          py::arg("center"), py::arg("r_b"), py::arg("eps"));
    m.def("tail_integral_bound", &tail_integral_bound);

    py::class_<Cube>(m, "Cube")
        .def_readonly("id", &Cube::id)
        .def_readonly("gen", &Cube::gen)
        .def_readonly("center", &Cube::center)
        .def_readonly("members", &Cube::members)
        .def_readonly("parent", &Cube::parent)
        .def_readonly("children", &Cube::children)
        .def_readonly("side", &Cube::side)
        .def_readonly("mass", &Cube::mass);

    py::class_<DyadicSystem>(m, "DyadicSystem")
        .def_readonly("delta", &DyadicSystem::delta)
        .def_readonly("gen_min", &DyadicSystem::gen_min)
        .def_readonly("gen_max", &DyadicSystem::gen_max)
        .def("__len__", [](const DyadicSystem& s) { return s.cubes.size(); })
        .def("cube", &DyadicSystem::cube, py::return_value_policy::reference_internal)
        .def("level", &DyadicSystem::level, py::return_value_policy::reference_internal);

    m.def("default_delta", &default_delta, py::arg("a0"));
    m.def(
        "build_system",
        [](const PointSpace& s, double delta, int gen_min, int gen_max, std::uint64_t seed) {
            return build_system(s, delta, gen_min, gen_max, {seed});
        },
        py::arg("space"), py::arg("delta"), py::arg("gen_min"), py::arg("gen_max"),
        py::arg("seed"));
    m.def(
        "check_axioms",
        [](const DyadicSystem& sys, const PointSpace& s, bool exhaustive) {
            return issues_of(check_axioms(sys, s, exhaustive));
        },
        py::arg("system"), py::arg("space"), py::arg("exhaustive_pairs") = false);
    m.def("containing_cube", &containing_cube, py::arg("system"), py::arg("point"),
          py::arg("generation"));

    py::class_<HaarBasis>(m, "HaarBasis")
        .def("value", &HaarBasis::value, py::arg("cube"), py::arg("u"), py::arg("point"))
        .def("coefficient", &HaarBasis::coefficient)
        .def("num_haar",
             [](const HaarBasis& b, int cube) { return b.at(cube).num_haar(); });
    m.def("build_haar", &build_haar, py::keep_alive<0, 1>(), py::keep_alive<0, 2>(),
          py::arg("system"), py::arg("space"));
    m.def(
        "expand",
        [](const std::vector<double>& f, const HaarBasis& b, int gmin, int gmax) {
            std::map<std::pair<int, int>, double> out;
            for (const auto& [ix, v] : expand(f, b, gmin, gmax)) out[{ix.cube, ix.u}] = v;
            return out;
        },
        py::arg("f"), py::arg("basis"), py::arg("gen_min"), py::arg("gen_max"));
    m.def(
        "reconstruct",
        [](const std::map<std::pair<int, int>, double>& c, const HaarBasis& b) {
            CoefficientField field;
            for (const auto& [key, v] : c) field[{key.first, key.second}] = v;
            return reconstruct(field, b);
        },
        py::arg("coefficients"), py::arg("basis"));

    py::class_<GoodnessParams>(m, "GoodnessParams")
        .def_static("make", &GoodnessParams::make, py::arg("alpha"), py::arg("t_lambda"),
                    py::arg("a0"), py::arg("c_k"), py::arg("r"))
        .def_readonly("r", &GoodnessParams::r)
        .def_readonly("gamma", &GoodnessParams::gamma)
        .def_readonly("c_script", &GoodnessParams::c_script);
    m.def(
        "classify",
        [](const DyadicSystem& d, const DyadicSystem& dp, const PointSpace& s,
           const GoodnessParams& p) { return classify(d, dp, s, p).good; },
        py::arg("system"), py::arg("reference"), py::arg("space"), py::arg("params"));
    m.def(
        "badness_probability",
        [](const PointSpace& s, double delta, int gmin, int gmax, const GoodnessParams& p,
           int trials, std::uint64_t seed) {
            const auto rep = badness_probability(s, delta, gmin, gmax, p, trials, seed);
            py::dict out;
            out["frequency"] = rep.frequency;
            out["mean"] = rep.mean_frequency;
            out["stderr"] = rep.stderr_mean;
            return out;
        },
        py::arg("space"), py::arg("delta"), py::arg("gen_min"), py::arg("gen_max"),
        py::arg("params"), py::arg("trials"), py::arg("seed"));

    // product-frame pipeline through the assembled instance
    py::class_<cli::ProductInstance>(m, "ProductInstance")
        .def_static("make", &cli::make_product_instance, py::arg("n1"), py::arg("n2"),
                    py::arg("seed"), py::arg("r") = 1, py::arg("gen_min") = -1,
                    py::arg("gen_max") = 2, py::arg("alpha") = 0.7, py::arg("c_k") = 1.5)
        .def_property_readonly("n1", [](const cli::ProductInstance& i) { return i.s1.size(); })
        .def_property_readonly("n2", [](const cli::ProductInstance& i) { return i.s2.size(); })
        .def("random_field",
             [](const cli::ProductInstance& i, std::uint64_t seed, int entries) {
                 return cli::random_product_field(i.frame, seed, entries);
             })
        .def("s1_norm", [](const cli::ProductInstance& i,
                           const ProductField& c) { return s1_norm(i.frame, c); })
        .def("s2_norm", [](const cli::ProductInstance& i,
                           const ProductField& c) { return s2_norm(i.frame, c); })
        .def("t1_norm",
             [](const cli::ProductInstance& i, const ProductField& c) {
                 return t1_norm(i.frame, c, canonical_candidates(i.frame, c));
             })
        .def("bmo_norm",
             [](const cli::ProductInstance& i, const ProductField& c) {
                 return bmo_prod_norm(i.frame, c, canonical_candidates(i.frame, c));
             })
        .def("lift", [](const cli::ProductInstance& i,
                        const std::vector<double>& phi) { return lift(i.frame, phi); })
        .def("project", [](const cli::ProductInstance& i,
                           const ProductField& c) { return project(i.frame, c); })
        .def("pi_one",
             [](const cli::ProductInstance& i, const std::vector<double>& a,
                const std::vector<double>& w, int u2) { return pi_one(i.frame.f2, a, w, u2); })
        .def("pi_full",
             [](const cli::ProductInstance& i, const ProductField& b,
                const std::vector<double>& w, int u1, int u2) {
                 return pi_full(i.frame, b, w, u1, u2);
             })
        .def("schur_norms", [](const cli::ProductInstance& i) {
            const auto sm = schur_matrices(i.s1, i.dom1, i.d1, i.d1p, 1.0, i.goodness);
            return std::make_pair(sm.sep_norm, sm.in_norm);
        });

    m.def("duality_pairing", &duality_pairing);

    // bidisc application
    m.def(
        "kernel_eval",
        [](double s1, double s2, std::complex<double> l1, std::complex<double> l2,
           std::complex<double> z1, std::complex<double> z2, int n_max) {
            return kernel_eval(s1, s2, l1, l2, z1, z2, n_max);
        },
        py::arg("s1"), py::arg("s2"), py::arg("l1"), py::arg("l2"), py::arg("z1"), py::arg("z2"),
        py::arg("n_max"));
    m.def(
        "embedding_constant",
        [](const std::vector<std::tuple<std::complex<double>, std::complex<double>, double>>& mu,
           double s1, double s2, int n_max) {
            return embedding_constant(measure_from(mu), s1, s2, n_max);
        },
        py::arg("measure"), py::arg("s1"), py::arg("s2"), py::arg("n_max"));
    m.def(
        "t_mu_s_norms",
        [](const std::vector<std::tuple<std::complex<double>, std::complex<double>, double>>& mu,
           double s1, double s2, int n_max) {
            const auto res = t_mu_s(measure_from(mu), s1, s2, n_max);
            return std::make_pair(res.norm_re, res.norm_complex);
        },
        py::arg("measure"), py::arg("s1"), py::arg("s2"), py::arg("n_max"));

    // batch experiments
    m.def(
        "run_config",
        [](const std::string& path, int seed, const std::string& out_dir, int jobs) {
            auto cfg = cli::load_config(path);
            if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (jobs > 0) cfg.jobs = jobs;
            return cli::run(cfg);
        },
        py::arg("path"), py::arg("seed") = -1, py::arg("out_dir") = "", py::arg("jobs") = 0);
    m.def("generate_space", &cli::generate_space, py::arg("variant"), py::arg("n"),
          py::arg("seed"), py::arg("path"));
    m.def("generate_measure", &cli::generate_measure, py::arg("variant"), py::arg("n"),
          py::arg("seed"), py::arg("path"));
}
