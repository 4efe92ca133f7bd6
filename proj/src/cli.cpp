#include "carleson/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "carleson/bidisc.hpp"
#include "carleson/errors.hpp"
#include "carleson/io.hpp"
#include "carleson/paraproducts.hpp"
#include "carleson/rng.hpp"
#include "carleson/t1testing.hpp"
#include "json.hpp"

namespace carleson::cli {

using nlohmann::json;

// ---------------------------------------------------------------------------
// minimal TOML subset: [sections], key = string | number | bool | [scalars]
// ---------------------------------------------------------------------------

namespace {

struct TomlValue {
    enum class Kind { str, num, boolean, list } kind = Kind::num;
    std::string s;
    double n = 0.0;
    bool b = false;
    std::vector<double> list;
};

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    std::size_t b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

TomlValue parse_value(std::string v, const std::string& path) {
    v = trim(v);
    TomlValue out;
    if (v.empty()) throw Error(errc::bad_config, path + ": empty value");
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"')
            throw Error(errc::bad_config, path + ": unterminated string " + v);
        out.kind = TomlValue::Kind::str;
        out.s = v.substr(1, v.size() - 2);
        return out;
    }
    if (v == "true" || v == "false") {
        out.kind = TomlValue::Kind::boolean;
        out.b = v == "true";
        return out;
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw Error(errc::bad_config, path + ": unterminated array " + v);
        out.kind = TomlValue::Kind::list;
        std::string inner = v.substr(1, v.size() - 2);
        std::stringstream ss(inner);
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.list.push_back(std::stod(item));
            } catch (...) {
                throw Error(errc::bad_config, path + ": bad array item " + item);
            }
        }
        return out;
    }
    try {
        std::size_t consumed = 0;
        out.n = std::stod(v, &consumed);
        if (consumed != v.size()) throw std::invalid_argument(v);
    } catch (...) {
        throw Error(errc::bad_config, path + ": bad value " + v);
    }
    return out;
}

std::map<std::string, std::map<std::string, TomlValue>> parse_toml(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::bad_config, "cannot open config " + path);
    std::map<std::string, std::map<std::string, TomlValue>> sections;
    std::string section;
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw Error(errc::bad_config, path + ": bad section " + line);
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw Error(errc::bad_config, path + ": missing '=' in " + line);
        const std::string key = trim(line.substr(0, eq));
        sections[section][key] = parse_value(line.substr(eq + 1), path);
    }
    return sections;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    const auto toml = parse_toml(path);
    ExperimentConfig cfg;
    const auto exp = toml.find("experiment");
    if (exp == toml.end()) throw Error(errc::bad_config, path + ": missing [experiment]");
    for (const auto& [key, value] : exp->second) {
        if (key == "kind") cfg.kind = value.s;
        else if (key == "space") cfg.space_path = value.s;
        else if (key == "space2") cfg.space2_path = value.s;
        else if (key == "measure") cfg.measure_path = value.s;
        else if (key == "kernel") cfg.kernel_path = value.s;
        else if (key == "out") cfg.out_dir = value.s;
        else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(value.n);
        else if (key == "jobs") cfg.jobs = static_cast<int>(value.n);
        else throw Error(errc::bad_config, path + ": unknown experiment key " + key);
    }
    if (exp->second.find("out") == exp->second.end()) {
        // optional output-dir default from the environment
        if (const char* env_out = std::getenv("CARLESON_OUT")) cfg.out_dir = env_out;
    }
    const auto par = toml.find("params");
    if (par != toml.end()) {
        for (const auto& [key, value] : par->second) {
            if (value.kind == TomlValue::Kind::list)
                cfg.lists[key] = value.list;
            else if (value.kind == TomlValue::Kind::num)
                cfg.params[key] = value.n;
            else if (value.kind == TomlValue::Kind::boolean)
                cfg.params[key] = value.b ? 1.0 : 0.0;
            else
                throw Error(errc::bad_config, path + ": param " + key + " must be numeric");
        }
    }
    if (cfg.kind.empty()) throw Error(errc::bad_config, path + ": experiment kind missing");
    return cfg;
}

void run_jobs(int count, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

// ---------------------------------------------------------------------------
// generators
// ---------------------------------------------------------------------------

namespace {

PointSpace gen_uniform(int n, std::uint64_t seed, bool sup, bool quasi) {
    Rng rng(mix_seed(seed, 0x5ace));
    std::vector<std::vector<double>> coords;
    std::vector<double> weights;
    for (int i = 0; i < n; ++i) {
        coords.push_back({rng.uniform(), rng.uniform()});
        weights.push_back(rng.uniform(0.2, 1.2));
    }
    if (quasi) return PointSpace::snowflake(std::move(coords), std::move(weights), 2.0);
    return sup ? PointSpace::sup_metric(std::move(coords), std::move(weights))
               : PointSpace::euclidean(std::move(coords), std::move(weights));
}

PointSpace gen_lattice(int n, std::uint64_t seed, bool strip) {
    Rng rng(mix_seed(seed, 0x1a77));
    std::vector<std::vector<double>> coords;
    const int cols = strip ? (n + 1) / 2 : n;
    for (int i = 0; i < n; ++i) {
        const double x = static_cast<double>(i % cols) + rng.uniform(-0.3, 0.3);
        const double y = strip ? static_cast<double>(i / cols) + rng.uniform(-0.3, 0.3) : 0.0;
        coords.push_back({x, y});
    }
    return PointSpace::euclidean(std::move(coords), std::vector<double>(static_cast<std::size_t>(n), 1.0));
}

PointSpace gen_shells(int levels, std::uint64_t) {
    // dyadic shells: point at distance 2^j from the centre, weight 2^j
    std::vector<std::vector<double>> coords{{0.0}};
    std::vector<double> weights{1.0};
    for (int j = 1; j <= levels; ++j) {
        coords.push_back({std::pow(2.0, j)});
        weights.push_back(std::pow(2.0, j));
    }
    return PointSpace::euclidean(std::move(coords), std::move(weights));
}

PointSpace gen_cluster(int branching, int depth, std::uint64_t seed, double delta) {
    Rng rng(mix_seed(seed, 0xc1a5));
    std::vector<std::vector<double>> coords{{0.5, 0.5}};
    for (int level = 1; level <= depth; ++level) {
        const double s = std::pow(delta, level - 1);
        std::vector<std::vector<double>> next;
        for (const auto& c : coords)
            for (int b = 0; b < branching; ++b)
                next.push_back({c[0] + rng.uniform(-0.4, 0.4) * s, c[1] + rng.uniform(-0.4, 0.4) * s});
        coords = std::move(next);
    }
    std::vector<double> weights;
    for (std::size_t i = 0; i < coords.size(); ++i) weights.push_back(rng.uniform(0.2, 1.2));
    return PointSpace::euclidean(std::move(coords), std::move(weights));
}

DiscreteBidiscMeasure gen_measure(const std::string& variant, int n, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xd15c));
    DiscreteBidiscMeasure mu;
    if (variant == "pointmass") {
        mu.push_back({0.0, 0.0, 1.0});
        return mu;
    }
    if (variant == "random") {
        for (int i = 0; i < n; ++i) {
            const double r1 = 0.8 * std::sqrt(rng.uniform());
            const double r2 = 0.8 * std::sqrt(rng.uniform());
            mu.push_back({std::polar(r1, rng.uniform(0.0, 6.283185307179586)),
                          std::polar(r2, rng.uniform(0.0, 6.283185307179586)),
                          rng.uniform(0.05, 1.0)});
        }
        return mu;
    }
    if (variant == "grid" || variant == "product") {
        const int rings = std::max(1, static_cast<int>(std::sqrt(n / 4.0)));
        const auto z1s = disc_grid(rings, 4, 0.7);
        const auto z2s = disc_grid(rings, 4, 0.6);
        std::vector<double> w1, w2;
        for (std::size_t i = 0; i < z1s.size(); ++i) w1.push_back(rng.uniform(0.05, 1.0));
        for (std::size_t j = 0; j < z2s.size(); ++j) w2.push_back(rng.uniform(0.05, 1.0));
        for (std::size_t i = 0; i < z1s.size(); ++i)
            for (std::size_t j = 0; j < z2s.size(); ++j) {
                const double mass = variant == "product" ? w1[i] * w2[j] : rng.uniform(0.05, 1.0);
                mu.push_back({z1s[i], z2s[j], mass});
            }
        return mu;
    }
    throw Error(errc::bad_config, "unknown measure variant " + variant);
}

}  // namespace

std::string generate_space(const std::string& variant, int n, std::uint64_t seed,
                           const std::string& path) {
    PointSpace space;
    double exponent = 2.0;
    if (variant == "uniform") space = gen_uniform(n, seed, false, false);
    else if (variant == "uniform-sup") space = gen_uniform(n, seed, true, false);
    else if (variant == "quasi") space = gen_uniform(n, seed, false, true);
    else if (variant == "lattice") { space = gen_lattice(n, seed, false); exponent = 1.0; }
    else if (variant == "strip") { space = gen_lattice(n, seed, true); exponent = 2.0; }
    else if (variant == "shells") { space = gen_shells(n, seed); exponent = 1.0; }
    else if (variant == "cluster") {
        // branching 4 per level; depth chosen so 4^depth reaches ~n points
        const int depth = std::max(1, static_cast<int>(std::lround(std::log(std::max(4, n)) / std::log(4.0))));
        space = gen_cluster(4, depth, seed, 1.0 / 128.0);
    }
    else throw Error(errc::bad_config, "unknown space variant " + variant);
    io::save_space(path, space, fit_power_dominator(space, exponent));
    return path;
}

std::string generate_measure(const std::string& variant, int n, std::uint64_t seed,
                             const std::string& path) {
    io::save_measure(path, gen_measure(variant, n, seed));
    return path;
}

// ---------------------------------------------------------------------------
// shared instance builders
// ---------------------------------------------------------------------------

ProductInstance make_product_instance(int n1, int n2, std::uint64_t seed, int r, int gen_min,
                                      int gen_max, double alpha, double c_k) {
    ProductInstance inst;
    inst.s1 = gen_lattice(n1, mix_seed(seed, 1), false);
    inst.s2 = gen_lattice(n2, mix_seed(seed, 2), false);
    inst.dom1 = fit_power_dominator(inst.s1, 1.0);
    inst.dom2 = fit_power_dominator(inst.s2, 1.0);
    const double delta = default_delta(1.0);
    inst.d1 = build_system(inst.s1, delta, gen_min, gen_max, {mix_seed(seed, 3)});
    inst.d1p = build_system(inst.s1, delta, gen_min, gen_max, {mix_seed(seed, 4)});
    inst.d2 = build_system(inst.s2, delta, gen_min, gen_max, {mix_seed(seed, 5)});
    inst.d2p = build_system(inst.s2, delta, gen_min, gen_max, {mix_seed(seed, 6)});
    inst.b1 = build_haar(inst.d1, inst.s1);
    inst.b2 = build_haar(inst.d2, inst.s2);
    inst.b1p = build_haar(inst.d1p, inst.s1);
    inst.b2p = build_haar(inst.d2p, inst.s2);
    inst.goodness = GoodnessParams::make(alpha, inst.dom1.t_lambda(), inst.s1.a0(), c_k, r);
    inst.frame.f1 = make_factor_frame(inst.s1, inst.d1, inst.d1p, inst.b1, inst.goodness);
    inst.frame.f2 = make_factor_frame(inst.s2, inst.d2, inst.d2p, inst.b2, inst.goodness);
    inst.mixed.f1 = inst.frame.f1;
    inst.mixed.f2 = make_factor_frame(inst.s2, inst.d2p, inst.d2, inst.b2p, inst.goodness);
    return inst;
}

std::vector<double> random_point_function(const PointSpace& space, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xf0));
    std::vector<double> f(static_cast<std::size_t>(space.size()));
    for (auto& v : f) v = rng.uniform(-1.0, 1.0);
    return f;
}

std::vector<double> random_cell_function(const ProductFrame& frame, std::uint64_t seed) {
    Rng rng(mix_seed(seed, 0xf1));
    std::vector<double> f(frame.cells());
    for (auto& v : f) v = rng.uniform(-1.0, 1.0);
    return f;
}

ProductField random_product_field(const ProductFrame& frame, std::uint64_t seed, int entries) {
    Rng rng(mix_seed(seed, 0xf2));
    std::vector<ProductKey> keys;
    for (const Cube& q1 : frame.f1.grid->cubes) {
        if (!frame.f1.usable(q1.id)) continue;
        const CubeHaar& h1 = frame.f1.basis->at(q1.id);
        for (int u1 = 1; u1 <= h1.num_haar(); ++u1) {
            if (h1.zero[static_cast<std::size_t>(u1 - 1)]) continue;
            for (const Cube& q2 : frame.f2.grid->cubes) {
                if (!frame.f2.usable(q2.id)) continue;
                const CubeHaar& h2 = frame.f2.basis->at(q2.id);
                for (int u2 = 1; u2 <= h2.num_haar(); ++u2)
                    if (!h2.zero[static_cast<std::size_t>(u2 - 1)])
                        keys.push_back({q1.id, u1, q2.id, u2});
            }
        }
    }
    ProductField c;
    for (int e = 0; e < entries && !keys.empty(); ++e)
        c[keys[static_cast<std::size_t>(rng.below(keys.size()))]] = rng.uniform(-1.0, 1.0);
    return c;
}

// ---------------------------------------------------------------------------
// experiments
// ---------------------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

std::string out_file(const ExperimentConfig& cfg, const std::string& name) {
    fs::create_directories(cfg.out_dir);
    return (fs::path(cfg.out_dir) / name).string();
}

void write_summary(const ExperimentConfig& cfg, json summary, bool pass) {
    summary["experiment"] = cfg.kind;
    summary["seed"] = cfg.seed;
    summary["pass"] = pass;
    std::ofstream out(out_file(cfg, cfg.kind + "-summary.json"), std::ios::binary);
    out << summary.dump(1) << "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

int run_axioms(const ExperimentConfig& cfg) {
    const int count = static_cast<int>(cfg.param("count", cfg.space_path.empty() ? 100 : 1));
    const int min_points = static_cast<int>(cfg.param("min_points", 24));
    const int max_points = static_cast<int>(cfg.param("max_points", 512));
    const int gens = static_cast<int>(cfg.param("generations", 3));
    const double limit_s = cfg.param("time_limit_seconds", 0.0);

    struct Row {
        int index, n, cubes, violations;
        double a0, millis;
    };
    std::vector<Row> rows(static_cast<std::size_t>(count));
    const auto t0 = std::chrono::steady_clock::now();
    run_jobs(count, cfg.jobs, [&](int i) {
        PointSpace space;
        DominatingFunction dom = DominatingFunction::power(1.0, 1.0);
        if (!cfg.space_path.empty()) {
            auto loaded = io::load_space(cfg.space_path);
            space = loaded.space;
        } else {
            Rng rng(mix_seed(cfg.seed, 0xa1 + static_cast<std::uint64_t>(i)));
            const int n = min_points + static_cast<int>(rng.below(
                                           static_cast<std::uint64_t>(max_points - min_points + 1)));
            const bool quasi = i % 2 == 1;  // alternate A0 = 1 and A0 = 2
            space = gen_uniform(n, mix_seed(cfg.seed, 0xb2 + static_cast<std::uint64_t>(i)), false,
                                quasi);
        }
        const auto start = std::chrono::steady_clock::now();
        const auto sys = build_system(space, default_delta(space.a0()), 0, gens,
                                      {mix_seed(cfg.seed, 0xc3 + static_cast<std::uint64_t>(i))});
        const auto rep = check_axioms(sys, space);
        const auto stop = std::chrono::steady_clock::now();
        if (i == 0)
            io::save_system(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + "-system.json"),
                            sys);
        rows[static_cast<std::size_t>(i)] = {
            i,
            space.size(),
            static_cast<int>(sys.cubes.size()),
            static_cast<int>(rep.issues.size()),
            space.a0(),
            std::chrono::duration<double, std::milli>(stop - start).count()};
    });
    const double total_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::string csv = "space_index,n,a0,cubes,violations,millis\n";
    int total_violations = 0;
    for (const auto& r : rows) {
        csv += std::to_string(r.index) + ',' + std::to_string(r.n) + ',' + io::fmt_g12(r.a0) + ',' +
               std::to_string(r.cubes) + ',' + std::to_string(r.violations) + ',' +
               io::fmt_g12(r.millis) + '\n';
        total_violations += r.violations;
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);

    const bool pass = total_violations == 0 && (limit_s <= 0.0 || total_s <= limit_s);
    json summary;
    summary["spaces"] = count;
    summary["total_violations"] = total_violations;
    summary["total_seconds"] = total_s;
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_badness(const ExperimentConfig& cfg) {
    const int trials = static_cast<int>(cfg.param("trials", 200));
    if (trials < 1) throw Error(errc::bad_config, "trials must be >= 1");
    const int count = static_cast<int>(cfg.param("count", cfg.space_path.empty() ? 10 : 1));
    const auto r_values = cfg.list("r_list", {1, 2, 3});
    const int min_pass = static_cast<int>(cfg.param("min_monotone", count));
    const int n = static_cast<int>(cfg.param("points", 384));
    const double delta = cfg.param("delta", 1.0 / 128.0);
    const int gen_min = static_cast<int>(cfg.param("gen_min", -1));
    const int gen_max = static_cast<int>(cfg.param("gen_max", 2));
    const double alpha = cfg.param("alpha", 0.7);
    const double c_k = cfg.param("c_k", 1.5);

    struct Row {
        int space_index, r, trials;
        double mean, se;
    };
    std::vector<std::vector<Row>> rows(static_cast<std::size_t>(count));
    run_jobs(count, cfg.jobs, [&](int i) {
        io::LoadedSpace loaded = [&] {
            if (!cfg.space_path.empty()) return io::load_space(cfg.space_path);
            PointSpace sp = gen_lattice(n, mix_seed(cfg.seed, 0xd4 + static_cast<std::uint64_t>(i)),
                                        i % 3 == 2);
            return io::LoadedSpace{sp, fit_power_dominator(sp, 1.0)};
        }();
        for (double rv : r_values) {
            const auto params = GoodnessParams::make(alpha, loaded.dom.t_lambda(),
                                                     loaded.space.a0(), c_k, static_cast<int>(rv));
            const auto rep =
                badness_probability(loaded.space, delta, gen_min, gen_max, params, trials,
                                    mix_seed(cfg.seed, 0xe5 + static_cast<std::uint64_t>(i)));
            rows[static_cast<std::size_t>(i)].push_back(
                {i, static_cast<int>(rv), trials, rep.mean_frequency, rep.stderr_mean});
        }
    });

    std::string csv = "space_index,r,trials,mean_freq,stderr\n";
    int monotone = 0;
    for (const auto& per_space : rows) {
        bool mono = true;
        for (std::size_t k = 1; k < per_space.size(); ++k)
            if (per_space[k].mean >
                per_space[k - 1].mean + 2.0 * (per_space[k].se + per_space[k - 1].se))
                mono = false;
        if (mono) ++monotone;
        for (const auto& r : per_space)
            csv += std::to_string(r.space_index) + ',' + std::to_string(r.r) + ',' +
                   std::to_string(r.trials) + ',' + io::fmt_g12(r.mean) + ',' + io::fmt_g12(r.se) +
                   '\n';
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);

    // the default separation parameter, recorded in the output: smallest r
    // whose mean badness stays below 0.1 on a calibration run
    int calibrated = 0;
    {
        io::LoadedSpace cal = [&] {
            if (!cfg.space_path.empty()) return io::load_space(cfg.space_path);
            PointSpace sp = gen_lattice(n, mix_seed(cfg.seed, 0xd4), false);
            return io::LoadedSpace{sp, fit_power_dominator(sp, 1.0)};
        }();
        const auto proto = GoodnessParams::make(alpha, cal.dom.t_lambda(), cal.space.a0(), c_k, 1);
        calibrated = calibrate_r(cal.space, delta, gen_min, gen_max, proto,
                                 std::min(trials, 40), mix_seed(cfg.seed, 0xca1));
    }

    const bool pass = monotone >= min_pass;
    json summary;
    summary["spaces"] = count;
    summary["monotone_spaces"] = monotone;
    summary["required"] = min_pass;
    summary["calibrated_default_r"] = calibrated;
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_haar(const ExperimentConfig& cfg) {
    const int count = static_cast<int>(cfg.param("count", 100));
    const double tol = cfg.param("tolerance", 1e-10);
    struct Row {
        int index, n1, n2;
        double gram_dev, roundtrip_dev, project_lift_dev;
    };
    std::vector<Row> rows(static_cast<std::size_t>(count));
    run_jobs(count, cfg.jobs, [&](int i) {
        const std::uint64_t s = mix_seed(cfg.seed, 0x11a + static_cast<std::uint64_t>(i));
        const int n1 = 24 + static_cast<int>(s % 41);
        const int n2 = 20 + static_cast<int>((s >> 8) % 37);
        auto inst = make_product_instance(n1, n2, s, 1, -1, 2, 0.7, 1.5);

        // one-parameter Gram deviation over every cube of both factor bases
        double gram = 0.0;
        for (const auto* side : {&inst.frame.f1, &inst.frame.f2}) {
            const HaarBasis& basis = *side->basis;
            const PointSpace& sp = *side->space;
            for (const Cube& q : side->grid->cubes) {
                const CubeHaar& h = basis.at(q.id);
                for (int u = 0; u <= h.num_haar(); ++u) {
                    std::vector<double> hu(static_cast<std::size_t>(sp.size()));
                    for (PointId pp = 0; pp < sp.size(); ++pp)
                        hu[static_cast<std::size_t>(pp)] = basis.value(q.id, u, pp);
                    const double nu = norm_l2(sp, hu);
                    if (nu == 0.0) continue;
                    gram = std::max(gram, std::abs(nu - 1.0));
                    for (int v = u + 1; v <= h.num_haar(); ++v) {
                        std::vector<double> hv(static_cast<std::size_t>(sp.size()));
                        for (PointId pp = 0; pp < sp.size(); ++pp)
                            hv[static_cast<std::size_t>(pp)] = basis.value(q.id, v, pp);
                        gram = std::max(gram, std::abs(inner(sp, hu, hv)));
                    }
                }
            }
        }

        // expand/reconstruct round trip on the first factor
        const auto f = random_point_function(inst.s1, mix_seed(s, 1));
        const auto coefficients = expand(f, inst.b1, inst.d1.gen_min, inst.d1.gen_max);
        if (i == 0)
            io::save_coefficients_csv(
                out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + "-coefficients.csv"),
                coefficients, inst.d1);
        const auto g = reconstruct(coefficients, inst.b1);
        double rt = 0.0;
        for (PointId pp = 0; pp < inst.s1.size(); ++pp)
            if (inst.s1.weight(pp) > 0.0)
                rt = std::max(rt, std::abs(f[static_cast<std::size_t>(pp)] -
                                           g[static_cast<std::size_t>(pp)]));

        // project(lift(.)) on the spanned subspace of the product frame
        const auto c0 = random_product_field(inst.frame, mix_seed(s, 2), 25);
        const auto phi = project(inst.frame, c0);
        const auto round = project(inst.frame, lift(inst.frame, phi));
        double pl = 0.0;
        for (std::size_t idx = 0; idx < phi.size(); ++idx)
            pl = std::max(pl, std::abs(phi[idx] - round[idx]));

        rows[static_cast<std::size_t>(i)] = {i, n1, n2, gram, rt, pl};
    });

    std::string csv = "instance,n1,n2,gram_dev,roundtrip_dev,project_lift_dev\n";
    double worst_gram = 0.0, worst_rt = 0.0, worst_pl = 0.0;
    for (const auto& r : rows) {
        csv += std::to_string(r.index) + ',' + std::to_string(r.n1) + ',' + std::to_string(r.n2) +
               ',' + io::fmt_g12(r.gram_dev) + ',' + io::fmt_g12(r.roundtrip_dev) + ',' +
               io::fmt_g12(r.project_lift_dev) + '\n';
        worst_gram = std::max(worst_gram, r.gram_dev);
        worst_rt = std::max(worst_rt, r.roundtrip_dev);
        worst_pl = std::max(worst_pl, r.project_lift_dev);
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);

    const bool pass = worst_gram <= tol && worst_pl <= tol;
    json summary;
    summary["instances"] = count;
    summary["max_gram_deviation"] = worst_gram;
    summary["max_roundtrip_deviation"] = worst_rt;
    summary["max_project_lift_deviation"] = worst_pl;
    summary["tolerance"] = tol;
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_norms(const ExperimentConfig& cfg) {
    const int instances = static_cast<int>(cfg.param("instances", 10));
    const int pairs = static_cast<int>(cfg.param("pairs", 10));  // per instance
    const double budget = cfg.param("duality_budget", 10.0);
    const int n1 = static_cast<int>(cfg.param("points1", 48));
    const int n2 = static_cast<int>(cfg.param("points2", 40));

    std::vector<double> worst(static_cast<std::size_t>(instances), 0.0);
    json first_report;
    std::string csv = "instance,pair,pairing,s1_norm,t1_norm,ratio\n";
    std::vector<std::string> csv_parts(static_cast<std::size_t>(instances));
    run_jobs(instances, cfg.jobs, [&](int i) {
        const std::uint64_t s = mix_seed(cfg.seed, 0x22b + static_cast<std::uint64_t>(i));
        auto inst = make_product_instance(n1, n2, s, 1, -1, 2, 0.7, 1.5);
        std::string part;
        for (int p = 0; p < pairs; ++p) {
            const auto sf = random_product_field(inst.frame, mix_seed(s, 100 + p), 20);
            const auto tf = random_product_field(inst.frame, mix_seed(s, 200 + p), 20);
            const double pairing = std::abs(duality_pairing(sf, tf));
            const double ns = s1_norm(inst.frame, sf);
            const double nt = t1_norm(inst.frame, tf,
                                      canonical_candidates(inst.frame, tf,
                                                           proof_level_sets(inst.frame, sf)));
            double ratio = 0.0;
            if (pairing > 0.0 && ns > 0.0 && nt > 0.0) ratio = pairing / (ns * nt);
            worst[static_cast<std::size_t>(i)] = std::max(worst[static_cast<std::size_t>(i)], ratio);
            part += std::to_string(i) + ',' + std::to_string(p) + ',' + io::fmt_g12(pairing) + ',' +
                    io::fmt_g12(ns) + ',' + io::fmt_g12(nt) + ',' + io::fmt_g12(ratio) + '\n';
        }
        csv_parts[static_cast<std::size_t>(i)] = std::move(part);
        if (i == 0) {
            // norm report of a representative field on instance 0
            const auto c = random_product_field(inst.frame, mix_seed(s, 999), 25);
            const auto cands = canonical_candidates(inst.frame, c);
            const auto sq = square_function(inst.frame, c);
            json rep;
            rep["s1"] = s1_norm(inst.frame, c);
            rep["t1"] = t1_norm(inst.frame, c, cands);
            rep["s2"] = s2_norm(inst.frame, c);
            rep["h1"] = sq.l1;
            rep["bmo"] = bmo_prod_norm(inst.frame, c, cands);
            rep["duality_ratio"] = worst[0];
            first_report = std::move(rep);
        }
    });
    for (const auto& part : csv_parts) csv += part;
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".json"),
                    first_report.dump(1) + "\n");

    double suite = 0.0;
    for (double w : worst) suite = std::max(suite, w);
    const bool pass = suite <= budget;
    json summary;
    summary["instances"] = instances;
    summary["pairs_per_instance"] = pairs;
    summary["duality_constant"] = suite;
    summary["budget"] = budget;
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_paraproducts(const ExperimentConfig& cfg) {
    const int symbols = static_cast<int>(cfg.param("symbols", 30));
    const double budget_one = cfg.param("budget_pi_one", 8.0);
    const double budget_full = cfg.param("budget_pi_full", 8.0);
    const double budget_mixed = cfg.param("budget_pi_mixed", 8.0);
    const double budget_box = cfg.param("budget_box", 16.0);
    const double kappa = cfg.param("kappa", 2.0);
    const int n1 = static_cast<int>(cfg.param("points1", 48));
    const int n2 = static_cast<int>(cfg.param("points2", 40));
    const int samples = static_cast<int>(cfg.param("samples", 10));

    auto inst = make_product_instance(n1, n2, mix_seed(cfg.seed, 0x33c), 1, -1, 2, 0.7, 1.5);
    // pick a (u1, u2) pair realized by the instance
    int u1 = 1, u2 = 1;

    std::vector<std::vector<double>> one_samples;
    std::vector<std::vector<double>> full_samples;
    std::vector<std::pair<std::vector<double>, std::vector<double>>> mixed_samples;
    for (int t = 0; t < samples; ++t) {
        one_samples.push_back(random_point_function(inst.s2, mix_seed(cfg.seed, 500 + t)));
        full_samples.push_back(random_cell_function(inst.frame, mix_seed(cfg.seed, 600 + t)));
        mixed_samples.push_back({random_cell_function(inst.mixed, mix_seed(cfg.seed, 700 + t)),
                                 random_cell_function(inst.mixed, mix_seed(cfg.seed, 800 + t))});
    }

    std::string csv = "kind,symbol,empirical_norm,operator_norm,symbol_norm,ratio,box_constant\n";
    double worst_one = 0.0, worst_full = 0.0, worst_mixed = 0.0, worst_box = 0.0;
    bool converged = true;
    for (int sym = 0; sym < symbols; ++sym) {
        const auto a = random_point_function(inst.s2, mix_seed(cfg.seed, 900 + sym));
        const auto rep1 = pi_one_norm_check(inst.frame.f2, a, u2, one_samples, kappa);
        converged = converged && rep1.converged;
        worst_one = std::max(worst_one, rep1.ratio);
        worst_box = std::max(worst_box, rep1.box_constant);
        csv += "pi_one," + std::to_string(sym) + ',' + io::fmt_g12(rep1.empirical_norm) + ',' +
               io::fmt_g12(rep1.operator_norm) + ',' + io::fmt_g12(rep1.symbol_norm) + ',' +
               io::fmt_g12(rep1.ratio) + ',' + io::fmt_g12(rep1.box_constant) + '\n';

        const auto b = random_product_field(inst.frame, mix_seed(cfg.seed, 1000 + sym), 25);
        const auto rep2 = pi_full_norm_check(inst.frame, b, u1, u2, full_samples);
        converged = converged && rep2.converged;
        worst_full = std::max(worst_full, rep2.ratio);
        csv += "pi_full," + std::to_string(sym) + ',' + io::fmt_g12(rep2.empirical_norm) + ',' +
               io::fmt_g12(rep2.operator_norm) + ',' + io::fmt_g12(rep2.symbol_norm) + ',' +
               io::fmt_g12(rep2.ratio) + ",0\n";

        const auto bm = random_product_field(inst.mixed, mix_seed(cfg.seed, 1100 + sym), 20);
        const auto rep3 = pi_mixed_bound_check(inst.mixed, bm, u1, u2, mixed_samples);
        worst_mixed = std::max(worst_mixed, rep3.ratio);
        csv += "pi_mixed," + std::to_string(sym) + ',' + io::fmt_g12(rep3.empirical_norm) + ',' +
               io::fmt_g12(rep3.operator_norm) + ',' + io::fmt_g12(rep3.symbol_norm) + ',' +
               io::fmt_g12(rep3.ratio) + ",0\n";
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);

    // matrix export of the assembled one-parameter paraproduct for symbol 0
    {
        const auto a = random_point_function(inst.s2, mix_seed(cfg.seed, 900));
        const int n = inst.s2.size();
        std::vector<std::vector<double>> m(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n), 0.0));
        for (PointId q = 0; q < n; ++q) {
            std::vector<double> e(static_cast<std::size_t>(n), 0.0);
            e[static_cast<std::size_t>(q)] = 1.0;
            const auto col = pi_one(inst.frame.f2, a, e, u2);
            for (PointId p = 0; p < n; ++p)
                m[static_cast<std::size_t>(p)][static_cast<std::size_t>(q)] =
                    col[static_cast<std::size_t>(p)];
        }
        io::save_matrix(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + "-matrix"), m);
    }

    const bool pass = converged && worst_one <= budget_one && worst_full <= budget_full &&
                      worst_mixed <= budget_mixed && worst_box <= budget_box;
    json summary;
    summary["symbols"] = symbols;
    summary["pi_one_ratio"] = worst_one;
    summary["pi_full_ratio"] = worst_full;
    summary["pi_mixed_ratio"] = worst_mixed;
    summary["box_constant"] = worst_box;
    summary["budgets"] = {{"pi_one", budget_one},
                          {"pi_full", budget_full},
                          {"pi_mixed", budget_mixed},
                          {"box", budget_box}};
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_testing(const ExperimentConfig& cfg);
int run_carleson(const ExperimentConfig& cfg);

}  // namespace

int run(const ExperimentConfig& cfg) {
    try {
        if (cfg.kind == "axioms") return run_axioms(cfg);
        if (cfg.kind == "badness") return run_badness(cfg);
        if (cfg.kind == "haar") return run_haar(cfg);
        if (cfg.kind == "norms") return run_norms(cfg);
        if (cfg.kind == "paraproducts") return run_paraproducts(cfg);
        if (cfg.kind == "testing") return run_testing(cfg);
        if (cfg.kind == "carleson") return run_carleson(cfg);
        throw Error(errc::bad_config, "unknown experiment kind " + cfg.kind);
    } catch (const Error& e) {
        if (e.code() == std::string(errc::bad_config) || e.code() == std::string(errc::bad_file)) {
            std::fprintf(stderr, "config error: %s\n", e.what());
            return 2;
        }
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

// ---------------------------------------------------------------------------
// testing and carleson experiments
// ---------------------------------------------------------------------------

namespace {

int run_testing(const ExperimentConfig& cfg) {
    const int instances = static_cast<int>(cfg.param("instances", 20));
    const int rectangles = static_cast<int>(cfg.param("rectangles", 50));
    const double schur_budget_sep = cfg.param("budget_schur_sep", 8.0);
    const double schur_budget_in = cfg.param("budget_schur_in", 8.0);
    const double band_budget = cfg.param("budget_band", 1e3);
    const double pairing_tol = cfg.param("pairing_tolerance", 1e-8);
    const int n1 = static_cast<int>(cfg.param("points1", 32));
    const int n2 = static_cast<int>(cfg.param("points2", 28));
    const double upsilon = cfg.param("upsilon", 0.1);
    const double eps = cfg.param("eps", 0.1);
    const int cover_seeds = static_cast<int>(cfg.param("cover_seeds", 20));

    struct Result {
        double schur_sep = 0.0, schur_in = 0.0;
        double pairing_dev = 0.0;
        double band = 0.0;
        double cs_excess = 0.0;  // max of lhs/(norm^2 mu) - 1 (exactness check)
        bool ok = true;
    };
    std::vector<Result> results(static_cast<std::size_t>(instances));
    std::vector<std::string> reports(static_cast<std::size_t>(instances));

    run_jobs(instances, cfg.jobs, [&](int i) {
        const std::uint64_t s = mix_seed(cfg.seed, 0x44d + static_cast<std::uint64_t>(i));
        auto inst = make_product_instance(n1, n2, s, 1, -1, 2, 0.7, 4.0);
        const KernelSpec kernel =
            cfg.kernel_path.empty()
                ? product_kernel(inv_lambda_kernel(inst.s1, inst.dom1, 1.0, 4.0),
                                 inv_lambda_kernel(inst.s2, inst.dom2, 1.0, 4.0))
                : io::load_kernel(cfg.kernel_path, inst.s1, inst.s2, inst.dom1, inst.dom2);
        const auto op = make_operator(kernel, inst.s1, inst.s2);
        Result& res = results[static_cast<std::size_t>(i)];

        // Schur matrices + norms
        const auto sm = schur_matrices(inst.s1, inst.dom1, inst.d1, inst.d1p, 1.0, inst.goodness);
        res.schur_sep = sm.sep_norm;
        res.schur_in = sm.in_norm;
        res.ok = res.ok && sm.converged;

        // T(1) pairing stability over nested ball choices
        Rng rng(mix_seed(s, 0x88));
        int tested = 0;
        for (const Cube& q1 : inst.d1.cubes) {
            if (tested >= rectangles) break;
            if (!inst.frame.f1.usable(q1.id) || inst.b1.at(q1.id).num_haar() < 1) continue;
            for (const Cube& q2 : inst.d2.cubes) {
                if (tested >= rectangles) break;
                if (!inst.frame.f2.usable(q2.id) || inst.b2.at(q2.id).num_haar() < 1) continue;
                if (rng.uniform() < 0.5) continue;
                const double c_k = kernel.c_k;
                const double base1 = c_k * cube_outer_constant(1.0) * q1.side;
                const double base2 = c_k * cube_outer_constant(1.0) * q2.side;
                double ref = 0.0;
                for (int choice = 0; choice < 3; ++choice) {
                    const double grow = 1.0 + choice;
                    const double v = t1_pairing(
                        op, inst.frame, q1.id, 1, q2.id, 1,
                        Ball{q1.center, grow * base1 + 0.05 * inst.s1.diameter() * choice},
                        Ball{q2.center, grow * base2 + 0.05 * inst.s2.diameter() * choice});
                    if (choice == 0)
                        ref = v;
                    else
                        res.pairing_dev = std::max(res.pairing_dev, std::abs(v - ref));
                }
                ++tested;
            }
        }

        // global testing family: per-generation single rectangles + one union
        std::vector<AdmissibleOpenSet> family;
        for (int g = inst.d1p.gen_min; g < inst.d1p.gen_max; ++g)
            for (int idx = 0; idx < 2 && idx < static_cast<int>(inst.d1p.level(g).size()); ++idx)
                family.push_back(AdmissibleOpenSet::single(
                    inst.d1p.level(g)[static_cast<std::size_t>(idx)],
                    inst.d2p.level(std::min(g, inst.d2p.gen_max - 1))[0]));
        AdmissibleOpenSet uni;
        uni.rects.push_back(family[0].rects[0]);
        uni.rects.push_back(family.back().rects[0]);
        family.push_back(uni);

        const auto gt = global_testing(op, inst.frame, family);
        const auto nrm = operator_norm(op, inst.frame, 4000, 1e-10);
        const auto nrm1 =
            operator_norm(op.with_variant(OperatorVariant::T1), inst.frame, 4000, 1e-10);
        res.ok = res.ok && nrm.converged && nrm1.converged;
        const auto norm_for = [&](const std::string& name) {
            return name == "global_T1" || name == "global_T1*" ? nrm1.value : nrm.value;
        };
        double worst_global = 0.0;
        res.cs_excess = -1.0;
        for (const auto& c : gt.conditions) {
            worst_global = std::max(worst_global, c.constant);
            const double nv = norm_for(c.name);
            // exact Cauchy-Schwarz cap: lhs <= |S|^2 mu(Omega) for each variant
            if (nv > 0.0) res.cs_excess = std::max(res.cs_excess, c.constant / (nv * nv) - 1.0);
        }
        res.band = worst_global > 0.0 ? (nrm.value * nrm.value) / worst_global : 0.0;

        // weak boundedness + surgery/covering checks folded into the report
        std::vector<BallPair> balls;
        Rng brng(mix_seed(s, 0x99));
        for (int b = 0; b < 12; ++b)
            balls.push_back({Ball{brng.uniform_int(0, inst.s1.size() - 1),
                                  brng.uniform(0.05, 0.5) * inst.s1.diameter()},
                             Ball{brng.uniform_int(0, inst.s2.size() - 1),
                                  brng.uniform(0.05, 0.5) * inst.s2.diameter()}});
        auto wb = weak_boundedness(op, 2.0, balls);
        for (auto& c : wb.conditions) c.pass = std::isfinite(c.constant);
        auto gt_named = gt;
        for (auto& c : gt_named.conditions) {
            c.budget = band_budget;
            const double nv = norm_for(c.name);
            c.pass = nv <= 0.0 || c.constant <= nv * nv * (1.0 + 1e-9);
        }
        TestingReport combined;
        combined.conditions = wb.conditions;
        combined.conditions.insert(combined.conditions.end(), gt_named.conditions.begin(),
                                   gt_named.conditions.end());
        reports[static_cast<std::size_t>(i)] = io::testing_report_json(combined);

        // surgery decomposition exactness + covering on the first instance
        if (i == 0) {
            int pairs_checked = 0;
            for (const Cube& q : inst.d1.cubes) {
                for (const Cube& qp : inst.d1p.cubes) {
                    if (!(q.gen >= qp.gen && q.gen <= qp.gen + 1) || pairs_checked >= 8) continue;
                    const auto sets = surgery(inst.s1, inst.d1, inst.d1p, q.id, qp.id, eps, 1);
                    std::vector<int> seen(static_cast<std::size_t>(inst.s1.size()), 0);
                    for (PointId p : sets.q_s) seen[static_cast<std::size_t>(p)]++;
                    for (PointId p : sets.q_d) seen[static_cast<std::size_t>(p)]++;
                    for (PointId p : sets.delta) seen[static_cast<std::size_t>(p)]++;
                    for (PointId p : q.members)
                        if (seen[static_cast<std::size_t>(p)] != 1) res.ok = false;
                    ++pairs_checked;
                }
            }
            double cover_sum = 0.0;
            for (int cs = 0; cs < cover_seeds; ++cs) {
                const auto cov = ball_covering(inst.s1, 1.0 / 64.0, -1, upsilon,
                                               mix_seed(s, 0xaa + static_cast<std::uint64_t>(cs)));
                cover_sum += cov.coverage;
            }
            res.ok = res.ok && cover_sum / cover_seeds >= 1.0 - upsilon;
        }
    });

    std::string csv =
        "instance,schur_sep,schur_in,pairing_dev,band,cs_excess\n";
    double worst_sep = 0.0, worst_in = 0.0, worst_pair = 0.0, worst_band = 0.0, worst_cs = -1.0;
    bool ok = true;
    for (int i = 0; i < instances; ++i) {
        const auto& r = results[static_cast<std::size_t>(i)];
        csv += std::to_string(i) + ',' + io::fmt_g12(r.schur_sep) + ',' + io::fmt_g12(r.schur_in) +
               ',' + io::fmt_g12(r.pairing_dev) + ',' + io::fmt_g12(r.band) + ',' +
               io::fmt_g12(r.cs_excess) + '\n';
        worst_sep = std::max(worst_sep, r.schur_sep);
        worst_in = std::max(worst_in, r.schur_in);
        worst_pair = std::max(worst_pair, r.pairing_dev);
        worst_band = std::max(worst_band, r.band);
        worst_cs = std::max(worst_cs, r.cs_excess);
        ok = ok && r.ok;
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".json"),
                    reports.empty() ? "[]\n" : reports.front());

    const bool pass = ok && worst_sep <= schur_budget_sep && worst_in <= schur_budget_in &&
                      worst_pair <= pairing_tol && worst_band <= band_budget &&
                      worst_cs <= 1e-9;
    json summary;
    summary["instances"] = instances;
    summary["schur_sep_norm"] = worst_sep;
    summary["schur_in_norm"] = worst_in;
    summary["pairing_deviation"] = worst_pair;
    summary["global_band"] = worst_band;
    summary["cauchy_schwarz_excess"] = worst_cs;
    summary["budgets"] = {{"schur_sep", schur_budget_sep},
                          {"schur_in", schur_budget_in},
                          {"band", band_budget},
                          {"pairing", pairing_tol}};
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

int run_carleson(const ExperimentConfig& cfg) {
    const int count = static_cast<int>(cfg.param("count", cfg.measure_path.empty() ? 30 : 1));
    const int n_max = static_cast<int>(cfg.param("n_max", 16));
    const double s1 = cfg.param("s1", 0.0);
    const double s2 = cfg.param("s2", 0.0);
    const double band_budget = cfg.param("budget_log_ratio", 1.0);
    const int measure_points = static_cast<int>(cfg.param("points", 60));

    struct Row {
        int index = 0;
        double embedding = 0.0, norm_re = 0.0, norm_complex = 0.0, log_ratio = 0.0;
        double gt_max = 0.0;
        bool product_form = false, ok = true;
    };
    std::vector<Row> rows(static_cast<std::size_t>(count));
    std::vector<json> reports(static_cast<std::size_t>(count));
    run_jobs(count, cfg.jobs, [&](int i) {
        DiscreteBidiscMeasure mu;
        if (!cfg.measure_path.empty())
            mu = io::load_measure(cfg.measure_path);
        else
            mu = gen_measure(i % 3 == 2 ? "grid" : "random", measure_points,
                             mix_seed(cfg.seed, 0x55e + static_cast<std::uint64_t>(i)));
        Row& row = rows[static_cast<std::size_t>(i)];
        row.index = i;
        row.embedding = embedding_constant(mu, s1, s2, n_max);
        const auto tm = t_mu_s(mu, s1, s2, n_max);
        row.norm_re = tm.norm_re;
        row.norm_complex = tm.norm_complex;
        row.ok = tm.converged;
        if (row.embedding > 0.0 && row.norm_re > 0.0)
            row.log_ratio = std::log10(row.norm_re / row.embedding);

        // global testing over factor-grid rectangles
        const auto inst = make_bidisc_instance(mu);
        row.product_form = inst.product_form;
        json rep;
        if (inst.x1.size() >= 2 && inst.x2.size() >= 2) {
            const double delta = default_delta(1.0);
            const auto g1 = build_system(inst.x1, delta, 0, 2,
                                         {mix_seed(cfg.seed, 0x66f + static_cast<std::uint64_t>(i))});
            const auto g2 = build_system(inst.x2, delta, 0, 2,
                                         {mix_seed(cfg.seed, 0x770 + static_cast<std::uint64_t>(i))});
            std::vector<std::vector<std::pair<int, int>>> omegas;
            omegas.push_back({{g1.level(0)[0], g2.level(0)[0]}});
            for (int id1 : g1.level(1)) {
                omegas.push_back({{id1, g2.level(0)[0]}});
                if (omegas.size() >= 5) break;
            }
            const auto gt = bidisc_global_testing(inst, s1, s2, n_max, g1, g2, omegas);
            row.gt_max = gt.max_constant();
            rep["global_testing"] = {{"T", gt.c_t},
                                     {"T*", gt.c_tstar},
                                     {"T1", gt.c_t1},
                                     {"T1*", gt.c_t1star}};
        }
        rep["embedding_constant"] = row.embedding;
        rep["t_mu_s_norm"] = row.norm_re;
        rep["t_mu_s_norm_complex"] = row.norm_complex;
        rep["log10_ratio"] = row.log_ratio;
        rep["product_form"] = row.product_form;
        rep["ratio_norm_over_embedding"] =
            row.embedding > 0.0 ? row.norm_re / row.embedding : 0.0;
        reports[static_cast<std::size_t>(i)] = std::move(rep);
    });

    std::string csv = "measure,embedding,norm_re,norm_complex,log10_ratio,gt_max,product_form\n";
    double band = 0.0;
    bool ok = true;
    for (const auto& r : rows) {
        csv += std::to_string(r.index) + ',' + io::fmt_g12(r.embedding) + ',' +
               io::fmt_g12(r.norm_re) + ',' + io::fmt_g12(r.norm_complex) + ',' +
               io::fmt_g12(r.log_ratio) + ',' + io::fmt_g12(r.gt_max) + ',' +
               (r.product_form ? "1" : "0") + '\n';
        band = std::max(band, std::abs(r.log_ratio));
        ok = ok && r.ok;
    }
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".csv"), csv);
    write_text_file(out_file(cfg, cfg.kind + "-" + std::to_string(cfg.seed) + ".json"),
                    reports.front().dump(1) + "\n");

    const bool pass = ok && band <= band_budget;
    json summary;
    summary["measures"] = count;
    summary["embedding_constant"] = rows.front().embedding;
    summary["log_ratio_band"] = band;
    summary["budget"] = band_budget;
    write_summary(cfg, std::move(summary), pass);
    return pass ? 0 : 1;
}

}  // namespace

}  // namespace carleson::cli
