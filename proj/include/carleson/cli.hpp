#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <map>
#include <string>
#include <vector>

#include "carleson/product.hpp"

namespace carleson::cli {

// fully assembled two-factor instance shared by the product experiments;
// the frames and bases point into the instance's own members, so moves
// rebind and copies are disabled
struct ProductInstance {
    PointSpace s1, s2;
    DominatingFunction dom1, dom2;
    DyadicSystem d1, d1p, d2, d2p;
    HaarBasis b1, b2, b1p, b2p;
    ProductFrame frame;  // (D1 -> D1', D2 -> D2')
    ProductFrame mixed;  // (D1 -> D1', D2' -> D2)
    GoodnessParams goodness;

    ProductInstance() = default;
    ProductInstance(const ProductInstance&) = delete;
    ProductInstance& operator=(const ProductInstance&) = delete;
    ProductInstance(ProductInstance&& o) noexcept { *this = std::move(o); }
    ProductInstance& operator=(ProductInstance&& o) noexcept {
        s1 = std::move(o.s1);
        s2 = std::move(o.s2);
        dom1 = std::move(o.dom1);
        dom2 = std::move(o.dom2);
        d1 = std::move(o.d1);
        d1p = std::move(o.d1p);
        d2 = std::move(o.d2);
        d2p = std::move(o.d2p);
        b1 = std::move(o.b1);
        b2 = std::move(o.b2);
        b1p = std::move(o.b1p);
        b2p = std::move(o.b2p);
        frame = std::move(o.frame);
        mixed = std::move(o.mixed);
        goodness = o.goodness;
        rebind();
        return *this;
    }

    void rebind() {
        b1.rebind(d1, s1);
        b2.rebind(d2, s2);
        b1p.rebind(d1p, s1);
        b2p.rebind(d2p, s2);
        frame.f1.space = &s1;
        frame.f1.grid = &d1;
        frame.f1.shift_grid = &d1p;
        frame.f1.basis = &b1;
        frame.f2.space = &s2;
        frame.f2.grid = &d2;
        frame.f2.shift_grid = &d2p;
        frame.f2.basis = &b2;
        mixed.f1 = frame.f1;
        mixed.f2.space = &s2;
        mixed.f2.grid = &d2p;
        mixed.f2.shift_grid = &d2;
        mixed.f2.basis = &b2p;
    }
};

ProductInstance make_product_instance(int n1, int n2, std::uint64_t seed, int r, int gen_min,
                                      int gen_max, double alpha, double c_k);

std::vector<double> random_point_function(const PointSpace& space, std::uint64_t seed);
std::vector<double> random_cell_function(const ProductFrame& frame, std::uint64_t seed);
ProductField random_product_field(const ProductFrame& frame, std::uint64_t seed, int entries);

// Parsed experiment configuration (TOML subset: [sections], key = value with
// strings, numbers, booleans and flat arrays).
struct ExperimentConfig {
    std::string kind;
    std::string space_path;
    std::string space2_path;
    std::string measure_path;
    std::string kernel_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int jobs = 1;

    std::map<std::string, double> params;
    std::map<std::string, std::vector<double>> lists;

    double param(const std::string& name, double fallback) const {
        const auto it = params.find(name);
        return it == params.end() ? fallback : it->second;
    }
    std::vector<double> list(const std::string& name, std::vector<double> fallback) const {
        const auto it = lists.find(name);
        return it == lists.end() ? fallback : it->second;
    }
};

ExperimentConfig load_config(const std::string& path);

// exit code: 0 all budgeted assertions pass, 1 assertion failure, 2 config error
int run(const ExperimentConfig& config);

// reproducible instance generators; returns the written path
std::string generate_space(const std::string& variant, int n, std::uint64_t seed,
                           const std::string& path);
std::string generate_measure(const std::string& variant, int n, std::uint64_t seed,
                             const std::string& path);

// deterministic job-level parallelism: fn(i) for i < count on up to `jobs`
// threads; every job must only touch its own slot
void run_jobs(int count, int jobs, const std::function<void(int)>& fn);

}  // namespace carleson::cli
