#include "carleson/io.hpp"

#include <cstdio>
#include <fstream>

#include "carleson/errors.hpp"
#include "json.hpp"

namespace carleson::io {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::bad_file, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(errc::bad_file, path + ": " + e.what());
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::bad_file, "cannot write " + path);
    out << text;
}

DominatingFunction dom_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "power") {
        return DominatingFunction::power(j.at("scale").get<double>(),
                                         j.at("exponent").get<double>(),
                                         j.value("floor", 0.0));
    }
    if (kind == "table") {
        return DominatingFunction::table(j.at("radii").get<std::vector<double>>(),
                                         j.at("values").get<std::vector<std::vector<double>>>(),
                                         j.at("c_lambda").get<double>(),
                                         j.value("symmetry", 1.0));
    }
    throw Error(errc::bad_file, "unknown lambda kind " + kind);
}

}  // namespace

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

LoadedSpace load_space(const std::string& path) {
    const json j = read_json(path);
    std::vector<std::vector<double>> coords;
    std::vector<double> weights;
    for (const auto& p : j.at("points")) {
        coords.push_back(p.at("coords").get<std::vector<double>>());
        weights.push_back(p.at("weight").get<double>());
    }
    const double a0 = j.value("A0", 1.0);
    const auto& metric = j.at("metric");
    const std::string kind = metric.at("kind").get<std::string>();
    PointSpace space;
    if (kind == "euclidean") {
        space = PointSpace::euclidean(std::move(coords), std::move(weights), a0);
    } else if (kind == "sup") {
        space = PointSpace::sup_metric(std::move(coords), std::move(weights), a0);
    } else if (kind == "table") {
        const auto table = metric.at("table").get<std::vector<std::vector<double>>>();
        std::vector<double> flat;
        for (const auto& row : table) flat.insert(flat.end(), row.begin(), row.end());
        space = PointSpace(std::move(coords), std::move(weights), std::move(flat), a0);
    } else {
        throw Error(errc::bad_file, "unknown metric kind " + kind);
    }
    return {std::move(space), dom_from_json(j.at("lambda"))};
}

void save_space(const std::string& path, const PointSpace& space, const DominatingFunction& dom) {
    json j;
    j["A0"] = space.a0();
    json pts = json::array();
    for (PointId p = 0; p < space.size(); ++p) {
        json e;
        e["id"] = p;
        e["coords"] = space.coords()[static_cast<std::size_t>(p)];
        e["weight"] = space.weight(p);
        pts.push_back(std::move(e));
    }
    j["points"] = std::move(pts);
    // coordinates always round-trip through the explicit table so that the
    // metric (possibly snowflaked or fitted) is preserved bit for bit
    std::vector<std::vector<double>> table(static_cast<std::size_t>(space.size()),
                                           std::vector<double>(static_cast<std::size_t>(space.size())));
    for (PointId x = 0; x < space.size(); ++x)
        for (PointId y = 0; y < space.size(); ++y)
            table[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)] = space.rho(x, y);
    j["metric"] = {{"kind", "table"}, {"table", table}};
    if (dom.is_power()) {
        j["lambda"] = {{"kind", "power"},
                       {"scale", dom.power_scale()},
                       {"exponent", dom.power_exponent()},
                       {"floor", dom.power_floor()}};
    } else {
        throw Error(errc::bad_config, "only power dominators are serialized");
    }
    write_text(path, j.dump(1) + "\n");
}

void save_system(const std::string& path, const DyadicSystem& sys) {
    json j;
    j["delta"] = sys.delta;
    j["m"] = sys.gen_min;
    j["k"] = sys.gen_max;
    json cubes = json::array();
    for (const Cube& q : sys.cubes) {
        json e;
        e["id"] = q.id;
        e["gen"] = q.gen;
        e["center"] = q.center;
        e["members"] = q.members;
        e["parent"] = q.parent;
        cubes.push_back(std::move(e));
    }
    j["cubes"] = std::move(cubes);
    write_text(path, j.dump(1) + "\n");
}

void save_coefficients_csv(const std::string& path, const CoefficientField& c,
                           const DyadicSystem& sys) {
    std::string out = "generation,cube_id,u,value\n";
    for (const auto& [ix, v] : c) {
        out += std::to_string(sys.cube(ix.cube).gen);
        out += ',';
        out += std::to_string(ix.cube);
        out += ',';
        out += std::to_string(ix.u);
        out += ',';
        out += fmt_g12(v);
        out += '\n';
    }
    write_text(path, out);
}

DiscreteBidiscMeasure load_measure(const std::string& path) {
    const json j = read_json(path);
    DiscreteBidiscMeasure mu;
    for (const auto& e : j) {
        const auto z1 = e.at("z1").get<std::vector<double>>();
        const auto z2 = e.at("z2").get<std::vector<double>>();
        mu.push_back({{z1.at(0), z1.at(1)}, {z2.at(0), z2.at(1)}, e.at("mass").get<double>()});
    }
    return mu;
}

void save_measure(const std::string& path, const DiscreteBidiscMeasure& mu) {
    json j = json::array();
    for (const auto& p : mu) {
        json e;
        e["z1"] = {p.z1.real(), p.z1.imag()};
        e["z2"] = {p.z2.real(), p.z2.imag()};
        e["mass"] = p.mass;
        j.push_back(std::move(e));
    }
    write_text(path, j.dump(1) + "\n");
}

KernelSpec load_kernel(const std::string& path, const PointSpace& space1,
                       const PointSpace& space2, const DominatingFunction& dom1,
                       const DominatingFunction& dom2) {
    const json j = read_json(path);
    const std::string kind = j.at("kind").get<std::string>();
    KernelSpec spec;
    if (kind == "product") {
        const auto& factors = j.at("factors");
        if (factors.size() != 2) throw Error(errc::bad_file, "product kernel needs two factors");
        const auto make_factor = [&](const json& f, const PointSpace& sp,
                                     const DominatingFunction& dom) {
            const std::string fk = f.at("kind").get<std::string>();
            if (fk == "inv_lambda")
                return inv_lambda_kernel(sp, dom, f.value("alpha", 1.0), f.value("c_k", 4.0));
            if (fk == "table") {
                auto values = f.at("values").get<std::vector<std::vector<double>>>();
                FactorKernel k;
                k.alpha = f.value("alpha", 1.0);
                k.c_k = f.value("c_k", 4.0);
                k.label = "table";
                auto shared = std::make_shared<std::vector<std::vector<double>>>(std::move(values));
                k.eval = [shared](PointId x, PointId y) {
                    return (*shared)[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
                };
                return k;
            }
            throw Error(errc::bad_file, "unknown factor kind " + fk);
        };
        spec = product_kernel(make_factor(factors.at(0), space1, dom1),
                              make_factor(factors.at(1), space2, dom2));
    } else if (kind == "table") {
        auto table = j.at("table").get<std::vector<std::vector<std::vector<std::vector<double>>>>>();
        auto shared = std::make_shared<decltype(table)>(std::move(table));
        spec.eval = [shared](PointId x1, PointId x2, PointId y1, PointId y2) {
            return (*shared)[static_cast<std::size_t>(x1)][static_cast<std::size_t>(x2)]
                            [static_cast<std::size_t>(y1)][static_cast<std::size_t>(y2)];
        };
    } else {
        throw Error(errc::bad_file, "unknown kernel kind " + kind);
    }
    if (j.contains("constants")) {
        const auto& c = j.at("constants");
        spec.size_c = c.value("C", spec.size_c);
        spec.alpha1 = c.value("alpha1", spec.alpha1);
        spec.alpha2 = c.value("alpha2", spec.alpha2);
        spec.c_k = c.value("CK", spec.c_k);
    }
    return spec;
}

void save_matrix(const std::string& path_base, const std::vector<std::vector<double>>& m) {
    const std::size_t rows = m.size();
    const std::size_t cols = rows ? m.front().size() : 0;
    std::ofstream bin(path_base + ".bin", std::ios::binary);
    if (!bin) throw Error(errc::bad_file, "cannot write " + path_base + ".bin");
    for (const auto& row : m)
        bin.write(reinterpret_cast<const char*>(row.data()),
                  static_cast<std::streamsize>(row.size() * sizeof(double)));
    json j;
    j["rows"] = rows;
    j["cols"] = cols;
    j["dtype"] = "float64";
    j["order"] = "row-major";
    j["data"] = path_base + ".bin";
    write_text(path_base + ".json", j.dump(1) + "\n");
}

std::string testing_report_json(const TestingReport& rep) {
    json j = json::array();
    for (const auto& c : rep.conditions) {
        json e;
        e["name"] = c.name;
        e["constant"] = c.constant;
        e["family_size"] = c.family_size;
        e["budget"] = c.budget;
        e["pass"] = c.pass;
        j.push_back(std::move(e));
    }
    return j.dump(1) + "\n";
}

}  // namespace carleson::io
