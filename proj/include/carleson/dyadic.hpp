#pragma once

#include <cstdint>
#include <vector>

#include "carleson/report.hpp"
#include "carleson/space.hpp"

namespace carleson {

// Sandwich-ball constants of the cube systems: B(x_Q, c_Q d^k) <= Q <= B(x_Q, C_Q d^k).
inline double cube_inner_constant(double a0) { return 1.0 / (3.0 * a0 * a0); }
inline double cube_outer_constant(double a0) { return 2.0 * a0; }

// Largest admissible scale ratio; build_system requires 96 A0^6 delta <= 1.
double default_delta(double a0);

struct RandomGridSeed {
    std::uint64_t value = 0;
};

struct Cube {
    int id = -1;
    int gen = 0;
    PointId center = -1;
    std::vector<PointId> members;   // sorted ascending
    int parent = -1;                // -1 at the coarsest generation
    std::vector<int> children;      // ids one generation finer
    double side = 0.0;              // delta^gen
    double mass = 0.0;
};

// Per-generation partition tree over a PointSpace, generations gen_min .. gen_max-1
// (coarse to fine), randomized by the seed. Immutable once built.
class DyadicSystem {
public:
    double delta = 0.0;
    int gen_min = 0;  // coarsest stored generation
    int gen_max = 0;  // one past the finest stored generation
    std::uint64_t seed = 0;

    std::vector<Cube> cubes;                      // indexed by cube id
    std::vector<std::vector<int>> levels;         // [g - gen_min] -> cube ids
    std::vector<std::vector<int>> point_cube;     // [g - gen_min][point] -> cube id

    int generations() const { return gen_max - gen_min; }
    bool has_gen(int g) const { return g >= gen_min && g < gen_max; }
    double side(int gen) const;
    const std::vector<int>& level(int g) const { return levels[static_cast<std::size_t>(g - gen_min)]; }
    const Cube& cube(int id) const { return cubes[static_cast<std::size_t>(id)]; }

    // member sets as bitsets (words of 64 points) for fast subset/overlap tests
    const std::vector<std::uint64_t>& member_bits(int id) const {
        return member_bits_[static_cast<std::size_t>(id)];
    }
    void rebuild_caches(const PointSpace& space);

    bool contains(int cube_id, PointId p) const;
    bool subset(int inner_id, int outer_id) const;
    bool disjoint(int a, int b) const;

    // containment/overlap of an arbitrary point list against a cube of this system
    bool subset_external(const std::vector<PointId>& pts, int outer_id) const;
    bool overlaps_external(const std::vector<PointId>& pts, int outer_id) const;

    // distance from a member point of the cube to the cube's complement
    double point_complement_distance(int cube_id, PointId p) const;

    // min over member pairs; +inf when either side is empty
    double set_distance(const PointSpace& space, int a, int b) const;
    // min over p in cube a, q outside cube b; +inf when the complement is empty
    double distance_to_complement(const PointSpace& space, int a, int b) const;

private:
    std::vector<std::vector<std::uint64_t>> member_bits_;
    std::vector<std::vector<double>> comp_distance_;  // [cube][member slot] -> dist to complement
public:
    // distance from a member point of cube id to the complement of that cube
    double member_complement_distance(int id, int member_slot) const {
        return comp_distance_[static_cast<std::size_t>(id)][static_cast<std::size_t>(member_slot)];
    }
};

// min over pairs of the two point lists; +inf when either is empty
double set_distance(const PointSpace& space, const std::vector<PointId>& a,
                    const std::vector<PointId>& b);

// Net centers + randomized parent assignment. Identical seed gives an
// identical system, bit for bit; generations draw from independent substreams.
DyadicSystem build_system(const PointSpace& space, double delta, int gen_min, int gen_max,
                          RandomGridSeed seed);

// Re-verifies every system axiom from scratch; empty report iff valid.
// `exhaustive_pairs` additionally checks nested-or-disjoint over all cube
// pairs instead of relying on the parent chain (slow, for fuzzing).
ValidationReport check_axioms(const DyadicSystem& sys, const PointSpace& space,
                              bool exhaustive_pairs = false);

int containing_cube(const DyadicSystem& sys, PointId p, int gen);

}  // namespace carleson
