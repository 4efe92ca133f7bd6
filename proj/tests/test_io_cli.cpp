#include <cstdio>
#include <unistd.h>
#include <filesystem>
#include <fstream>

#include "carleson/cli.hpp"
#include "carleson/errors.hpp"
#include "carleson/io.hpp"
#include "doctest.h"
#include "testutil.hpp"

using namespace carleson;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("carleson-test-" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("space files round trip through the table metric") {
    TempDir tmp;
    const PointSpace space = testutil::random_quasimetric_space(20, 4);
    const auto dom = fit_power_dominator(space, 1.0);
    io::save_space(tmp.file("s.json"), space, dom);
    const auto loaded = io::load_space(tmp.file("s.json"));
    REQUIRE(loaded.space.size() == space.size());
    CHECK(loaded.space.a0() == space.a0());
    for (PointId x = 0; x < space.size(); ++x) {
        CHECK(loaded.space.weight(x) == space.weight(x));
        for (PointId y = 0; y < space.size(); ++y)
            CHECK(loaded.space.rho(x, y) == space.rho(x, y));
    }
    CHECK(loaded.dom.c_lambda() == dom.c_lambda());
    CHECK(loaded.dom(3, 0.7) == dom(3, 0.7));
    CHECK_THROWS_AS(io::load_space(tmp.file("missing.json")), Error);
}

TEST_CASE("system serialization carries the cube tree") {
    TempDir tmp;
    const PointSpace space = testutil::random_space(24, 9);
    const auto sys = build_system(space, default_delta(1.0), 0, 2, {5});
    io::save_system(tmp.file("sys.json"), sys);
    std::ifstream in(tmp.file("sys.json"));
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"delta\"") != std::string::npos);
    CHECK(text.find("\"cubes\"") != std::string::npos);
    CHECK(text.find("\"members\"") != std::string::npos);
}

TEST_CASE("measure files round trip") {
    TempDir tmp;
    DiscreteBidiscMeasure mu{{{0.1, 0.2}, {-0.3, 0.0}, 0.5}, {{0.0, 0.0}, {0.25, -0.25}, 1.5}};
    io::save_measure(tmp.file("m.json"), mu);
    const auto loaded = io::load_measure(tmp.file("m.json"));
    REQUIRE(loaded.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(loaded[i].z1 == mu[i].z1);
        CHECK(loaded[i].z2 == mu[i].z2);
        CHECK(loaded[i].mass == mu[i].mass);
    }
}

TEST_CASE("kernel files build evaluators against the provided spaces") {
    TempDir tmp;
    const PointSpace s1 = testutil::random_space(8, 1);
    const PointSpace s2 = testutil::random_space(7, 2);
    const auto dom1 = fit_power_dominator(s1, 2.0);
    const auto dom2 = fit_power_dominator(s2, 2.0);
    {
        std::ofstream out(tmp.file("k.json"));
        out << R"({"kind":"product",
                   "factors":[{"kind":"inv_lambda","alpha":1.0,"c_k":4.0},
                              {"kind":"inv_lambda","alpha":1.0,"c_k":4.0}],
                   "constants":{"C":64.0,"alpha1":1.0,"alpha2":1.0,"CK":4.0}})";
    }
    const auto k = io::load_kernel(tmp.file("k.json"), s1, s2, dom1, dom2);
    CHECK(k.product_form);
    CHECK(k.size_c == 64.0);
    CHECK(k.c_k == 4.0);
    CHECK(k.eval(0, 0, 1, 1) == doctest::Approx(1.0 / (dom1(0, s1.rho(0, 1)) * dom2(0, s2.rho(0, 1)))));
}

TEST_CASE("matrix export layout") {
    TempDir tmp;
    std::vector<std::vector<double>> m = {{1.0, 2.0, 3.0}, {4.0, 5.0, 6.0}};
    io::save_matrix(tmp.file("mat"), m);
    std::ifstream bin(tmp.file("mat") + ".bin", std::ios::binary);
    double values[6];
    bin.read(reinterpret_cast<char*>(values), sizeof(values));
    CHECK(values[0] == 1.0);
    CHECK(values[3] == 4.0);  // row-major
    CHECK(values[5] == 6.0);
    std::ifstream hdr(tmp.file("mat") + ".json");
    std::string text((std::istreambuf_iterator<char>(hdr)), std::istreambuf_iterator<char>());
    CHECK(text.find("\"rows\": 2") != std::string::npos);
    CHECK(text.find("float64") != std::string::npos);
}

TEST_CASE("toml configs parse values, lists and comments") {
    TempDir tmp;
    {
        std::ofstream out(tmp.file("cfg.toml"));
        out << "# comment line\n"
               "[experiment]\n"
               "kind = \"badness\"  # trailing comment\n"
               "seed = 42\n"
               "jobs = 2\n"
               "out = \"" << tmp.file("out") << "\"\n"
               "[params]\n"
               "trials = 6\n"
               "r_list = [1, 2]\n"
               "points = 128\n"
               "count = 2\n";
    }
    const auto cfg = cli::load_config(tmp.file("cfg.toml"));
    CHECK(cfg.kind == "badness");
    CHECK(cfg.seed == 42);
    CHECK(cfg.jobs == 2);
    CHECK(cfg.param("trials", 0) == 6);
    CHECK(cfg.list("r_list", {}) == std::vector<double>{1, 2});
    CHECK(cli::run(cfg) == 0);

    {
        std::ofstream out(tmp.file("bad.toml"));
        out << "[experiment]\nkind = \"badness\"\n[params]\ntrials = 0\n";
    }
    CHECK(cli::run(cli::load_config(tmp.file("bad.toml"))) == 2);
    {
        std::ofstream out(tmp.file("broken.toml"));
        out << "[experiment\nkind = nope\n";
    }
    CHECK_THROWS_AS(cli::load_config(tmp.file("broken.toml")), Error);
}

TEST_CASE("generators are deterministic per seed") {
    TempDir tmp;
    cli::generate_space("uniform", 12, 9, tmp.file("a.json"));
    cli::generate_space("uniform", 12, 9, tmp.file("b.json"));
    cli::generate_space("uniform", 12, 10, tmp.file("c.json"));
    const auto read = [](const std::string& p) {
        std::ifstream in(p);
        return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    };
    CHECK(read(tmp.file("a.json")) == read(tmp.file("b.json")));
    CHECK(read(tmp.file("a.json")) != read(tmp.file("c.json")));

    cli::generate_measure("pointmass", 1, 0, tmp.file("pm.json"));
    const auto mu = io::load_measure(tmp.file("pm.json"));
    REQUIRE(mu.size() == 1);
    CHECK(mu[0].mass == 1.0);

    // the shell generator reproduces the closed-form tail integral instance
    cli::generate_space("shells", 10, 0, tmp.file("shells.json"));
    const auto shells = io::load_space(tmp.file("shells.json"));
    const auto dom = DominatingFunction::power(1.0, 1.0);
    CHECK(tail_integral(shells.space, dom, 0, 2.0, 1.0) ==
          doctest::Approx(1023.0 / 1024.0).epsilon(1e-12));
}

TEST_CASE("single-point generator edge case") {
    TempDir tmp;
    cli::generate_space("uniform", 1, 4, tmp.file("one.json"));
    const auto loaded = io::load_space(tmp.file("one.json"));
    CHECK(loaded.space.size() == 1);
}

TEST_CASE("experiments emit summary and per-seed artifacts") {
    TempDir tmp;
    cli::ExperimentConfig cfg;
    cfg.kind = "haar";
    cfg.seed = 3;
    cfg.out_dir = tmp.file("out");
    cfg.params = {{"count", 4}};
    CHECK(cli::run(cfg) == 0);
    CHECK(fs::exists(tmp.file("out") + "/haar-summary.json"));
    CHECK(fs::exists(tmp.file("out") + "/haar-3.csv"));
    CHECK(fs::exists(tmp.file("out") + "/haar-3-coefficients.csv"));
    std::ifstream in(tmp.file("out") + "/haar-3-coefficients.csv");
    std::string header;
    std::getline(in, header);
    CHECK(header == "generation,cube_id,u,value");
}
