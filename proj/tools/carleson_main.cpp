#include <cstdint>
#include <string>

#include "CLI11.hpp"
#include "carleson/cli.hpp"
#include "carleson/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"batch experiments on nonhomogeneous product dyadic analysis"};
    app.require_subcommand(1);

    // run --config PATH [--seed N] [--out DIR] [--jobs N]
    std::string config_path, out_dir;
    std::int64_t seed_override = -1;
    int jobs = 0;
    auto* run_cmd = app.add_subcommand("run", "run a configured experiment");
    run_cmd->add_option("--config", config_path, "TOML experiment config")->required();
    run_cmd->add_option("--seed", seed_override, "override the config seed");
    run_cmd->add_option("--out", out_dir, "override the output directory");
    run_cmd->add_option("--jobs", jobs, "job-level parallelism");

    // generate (space|measure) --variant V --n N --seed S --out FILE
    std::string gen_what, variant = "uniform", gen_out = "generated.json";
    int gen_n = 64;
    std::uint64_t gen_seed = 1;
    auto* gen_cmd = app.add_subcommand("generate", "write a reproducible random instance");
    gen_cmd->add_option("kind", gen_what, "space or measure")->required();
    gen_cmd->add_option("--variant", variant,
                        "space: uniform|uniform-sup|quasi|lattice|strip|shells|cluster; "
                        "measure: random|grid|product|pointmass");
    gen_cmd->add_option("--n", gen_n, "instance size");
    gen_cmd->add_option("--seed", gen_seed, "generator seed");
    gen_cmd->add_option("--out", gen_out, "output file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            auto cfg = carleson::cli::load_config(config_path);
            if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
            if (!out_dir.empty()) cfg.out_dir = out_dir;
            if (jobs > 0) cfg.jobs = jobs;
            return carleson::cli::run(cfg);
        }
        if (*gen_cmd) {
            if (gen_what == "space")
                carleson::cli::generate_space(variant, gen_n, gen_seed, gen_out);
            else if (gen_what == "measure")
                carleson::cli::generate_measure(variant, gen_n, gen_seed, gen_out);
            else
                throw carleson::Error(carleson::errc::bad_config,
                                      "generate kind must be space or measure");
            std::printf("%s\n", gen_out.c_str());
            return 0;
        }
    } catch (const carleson::Error& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
