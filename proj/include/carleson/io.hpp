#pragma once

#include <string>
#include <vector>

#include "carleson/bidisc.hpp"
#include "carleson/dyadic.hpp"
#include "carleson/haar.hpp"
#include "carleson/kernels.hpp"
#include "carleson/space.hpp"
#include "carleson/t1testing.hpp"

namespace carleson::io {

struct LoadedSpace {
    PointSpace space;
    DominatingFunction dom;
};

// {points:[{id,coords,weight}], metric:{kind,table?}, lambda:{kind,...}, A0}
LoadedSpace load_space(const std::string& path);
void save_space(const std::string& path, const PointSpace& space, const DominatingFunction& dom);

// {delta, m, k, cubes:[{id,gen,center,members,parent}]}
void save_system(const std::string& path, const DyadicSystem& sys);

// CSV columns (generation, cube_id, u, value)
void save_coefficients_csv(const std::string& path, const CoefficientField& c,
                           const DyadicSystem& sys);

// [{z1:[re,im], z2:[re,im], mass}]
DiscreteBidiscMeasure load_measure(const std::string& path);
void save_measure(const std::string& path, const DiscreteBidiscMeasure& mu);

// {kind:"product"|"table", factors|table, constants:{C,alpha1,alpha2,CK}}
KernelSpec load_kernel(const std::string& path, const PointSpace& space1,
                       const PointSpace& space2, const DominatingFunction& dom1,
                       const DominatingFunction& dom2);

// dense row-major binary of 64-bit floats at <path>.bin plus a JSON header
void save_matrix(const std::string& path_base, const std::vector<std::vector<double>>& m);

std::string testing_report_json(const TestingReport& rep);

// fixed-precision float formatting shared by every CSV writer (12 significant digits)
std::string fmt_g12(double v);

}  // namespace carleson::io
