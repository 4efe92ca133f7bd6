#include "carleson/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "carleson/errors.hpp"
#include "carleson/rng.hpp"

namespace carleson {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}
}  // namespace

double default_delta(double a0) {
    const double cap = std::min(1.0 / (96.0 * std::pow(a0, 6.0)), 1.0 / 8.0);
    double d = 0.5;
    while (d > cap) d *= 0.5;  // round down to a power of 1/2
    return d;
}

double DyadicSystem::side(int gen) const { return std::pow(delta, static_cast<double>(gen)); }

void DyadicSystem::rebuild_caches(const PointSpace& space) {
    const int n = space.size();
    const std::size_t words = static_cast<std::size_t>((n + 63) / 64);
    member_bits_.assign(cubes.size(), std::vector<std::uint64_t>(words, 0));
    comp_distance_.assign(cubes.size(), {});
    for (const Cube& q : cubes) {
        auto& bits = member_bits_[static_cast<std::size_t>(q.id)];
        for (PointId p : q.members)
            bits[static_cast<std::size_t>(p) / 64] |= (1ULL << (static_cast<std::size_t>(p) % 64));
    }
    for (const Cube& q : cubes) {
        auto& cd = comp_distance_[static_cast<std::size_t>(q.id)];
        cd.assign(q.members.size(), kInf);
        if (static_cast<int>(q.members.size()) == n) continue;  // whole space, empty complement
        std::vector<bool> inside(static_cast<std::size_t>(n), false);
        for (PointId p : q.members) inside[static_cast<std::size_t>(p)] = true;
        for (std::size_t s = 0; s < q.members.size(); ++s) {
            double best = kInf;
            for (PointId y = 0; y < n; ++y)
                if (!inside[static_cast<std::size_t>(y)])
                    best = std::min(best, space.rho(q.members[s], y));
            cd[s] = best;
        }
    }
}

bool DyadicSystem::contains(int cube_id, PointId p) const {
    const auto& bits = member_bits_[static_cast<std::size_t>(cube_id)];
    return (bits[static_cast<std::size_t>(p) / 64] >> (static_cast<std::size_t>(p) % 64)) & 1ULL;
}

bool DyadicSystem::subset(int inner_id, int outer_id) const {
    const auto& a = member_bits_[static_cast<std::size_t>(inner_id)];
    const auto& b = member_bits_[static_cast<std::size_t>(outer_id)];
    for (std::size_t w = 0; w < a.size(); ++w)
        if (a[w] & ~b[w]) return false;
    return true;
}

bool DyadicSystem::disjoint(int a_id, int b_id) const {
    const auto& a = member_bits_[static_cast<std::size_t>(a_id)];
    const auto& b = member_bits_[static_cast<std::size_t>(b_id)];
    for (std::size_t w = 0; w < a.size(); ++w)
        if (a[w] & b[w]) return false;
    return true;
}

bool DyadicSystem::subset_external(const std::vector<PointId>& pts, int outer_id) const {
    for (PointId p : pts)
        if (!contains(outer_id, p)) return false;
    return true;
}

bool DyadicSystem::overlaps_external(const std::vector<PointId>& pts, int outer_id) const {
    for (PointId p : pts)
        if (contains(outer_id, p)) return true;
    return false;
}

double DyadicSystem::point_complement_distance(int cube_id, PointId p) const {
    const Cube& q = cube(cube_id);
    const auto it = std::lower_bound(q.members.begin(), q.members.end(), p);
    if (it == q.members.end() || *it != p) return kInf;
    const std::size_t slot = static_cast<std::size_t>(it - q.members.begin());
    return comp_distance_[static_cast<std::size_t>(cube_id)][slot];
}

double DyadicSystem::set_distance(const PointSpace& space, int a, int b) const {
    return carleson::set_distance(space, cube(a).members, cube(b).members);
}

double set_distance(const PointSpace& space, const std::vector<PointId>& a,
                    const std::vector<PointId>& b) {
    if (a.empty() || b.empty()) return kInf;
    double best = kInf;
    for (PointId p : a)
        for (PointId q : b) best = std::min(best, space.rho(p, q));
    return best;
}

double DyadicSystem::distance_to_complement(const PointSpace& space, int a, int b) const {
    const Cube& qa = cube(a);
    if (qa.members.empty()) return kInf;
    if (static_cast<int>(cube(b).members.size()) == space.size()) return kInf;
    double best = kInf;
    for (PointId p : qa.members)
        for (PointId y = 0; y < space.size(); ++y)
            if (!contains(b, y)) best = std::min(best, space.rho(p, y));
    return best;
}

namespace {

// greedy maximal separated net over a shuffled point order, ties by id via
// the deterministic shuffle
std::vector<PointId> greedy_net(const PointSpace& space, double sep, Rng& rng) {
    std::vector<PointId> order(static_cast<std::size_t>(space.size()));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<PointId> net;
    for (PointId p : order) {
        bool ok = true;
        for (PointId c : net)
            if (space.rho(p, c) < sep) {
                ok = false;
                break;
            }
        if (ok) net.push_back(p);
    }
    std::sort(net.begin(), net.end());
    return net;
}

// attach `child` to one of `centers` at scale `sep`: forced to the nearest
// center within sep/(2 A0) when one exists, otherwise uniformly random among
// admissible centers (rho < sep)
int assign_to_center(const PointSpace& space, PointId child, const std::vector<PointId>& centers,
                     double sep, Rng& rng) {
    const double force_radius = sep / (2.0 * space.a0());
    int forced = -1;
    double forced_dist = kInf;
    std::vector<int> admissible;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double d = space.rho(child, centers[i]);
        if (d <= force_radius && d < forced_dist) {
            forced = static_cast<int>(i);
            forced_dist = d;
        }
        if (d < sep) admissible.push_back(static_cast<int>(i));
    }
    if (forced >= 0) return forced;
    if (admissible.empty()) return -1;
    return admissible[static_cast<std::size_t>(rng.below(admissible.size()))];
}

}  // namespace

DyadicSystem build_system(const PointSpace& space, double delta, int gen_min, int gen_max,
                          RandomGridSeed seed) {
    if (space.empty()) throw Error(errc::empty_space, "point set is empty");
    const double a0 = space.a0();
    if (!(delta > 0.0) || 96.0 * std::pow(a0, 6.0) * delta > 1.0 + 1e-12)
        throw Error(errc::delta_too_large,
                    "need 96*A0^6*delta <= 1, got delta=" + fmt(delta) + " A0=" + fmt(a0));
    if (gen_min >= gen_max) throw Error(errc::bad_config, "need gen_min < gen_max");

    DyadicSystem sys;
    sys.delta = delta;
    sys.gen_min = gen_min;
    sys.gen_max = gen_max;
    sys.seed = seed.value;
    sys.levels.resize(static_cast<std::size_t>(gen_max - gen_min));
    sys.point_cube.assign(static_cast<std::size_t>(gen_max - gen_min),
                          std::vector<int>(static_cast<std::size_t>(space.size()), -1));

    // independent net per generation
    std::vector<std::vector<PointId>> nets;
    for (int g = gen_min; g < gen_max; ++g) {
        Rng rng(mix_seed(seed.value, 0x1000 + static_cast<std::uint64_t>(g - gen_min)));
        nets.push_back(greedy_net(space, std::pow(delta, g), rng));
    }

    // create cubes per generation
    for (int g = gen_min; g < gen_max; ++g) {
        const std::size_t li = static_cast<std::size_t>(g - gen_min);
        for (PointId c : nets[li]) {
            Cube q;
            q.id = static_cast<int>(sys.cubes.size());
            q.gen = g;
            q.center = c;
            q.side = std::pow(delta, g);
            sys.levels[li].push_back(q.id);
            sys.cubes.push_back(std::move(q));
        }
    }

    // parent assignment between consecutive generations (finer -> coarser)
    const int finest = gen_max - 1;
    for (int g = finest; g > gen_min; --g) {
        const std::size_t li = static_cast<std::size_t>(g - gen_min);
        const std::size_t lp = li - 1;
        Rng rng(mix_seed(seed.value, 0x2000 + static_cast<std::uint64_t>(g - gen_min)));
        const double sep = std::pow(delta, g - 1);
        for (int id : sys.levels[li]) {
            Cube& q = sys.cubes[static_cast<std::size_t>(id)];
            const int slot = assign_to_center(space, q.center, nets[lp], sep, rng);
            if (slot < 0)
                throw Error(errc::bad_config, "net maximality broken at generation " + std::to_string(g));
            const int pid = sys.levels[lp][static_cast<std::size_t>(slot)];
            q.parent = pid;
            sys.cubes[static_cast<std::size_t>(pid)].children.push_back(id);
        }
    }

    // point membership at the finest generation, then propagate upward
    {
        Rng rng(mix_seed(seed.value, 0x3000));
        const std::size_t li = static_cast<std::size_t>(finest - gen_min);
        const double sep = std::pow(delta, finest);
        for (PointId p = 0; p < space.size(); ++p) {
            const int slot = assign_to_center(space, p, nets[li], sep, rng);
            if (slot < 0)
                throw Error(errc::bad_config, "net maximality broken at the finest generation");
            const int id = sys.levels[li][static_cast<std::size_t>(slot)];
            sys.cubes[static_cast<std::size_t>(id)].members.push_back(p);
            sys.point_cube[li][static_cast<std::size_t>(p)] = id;
        }
    }
    for (int g = finest - 1; g >= gen_min; --g) {
        const std::size_t li = static_cast<std::size_t>(g - gen_min);
        for (int id : sys.levels[li]) {
            Cube& q = sys.cubes[static_cast<std::size_t>(id)];
            for (int cid : q.children) {
                const Cube& c = sys.cubes[static_cast<std::size_t>(cid)];
                q.members.insert(q.members.end(), c.members.begin(), c.members.end());
            }
            std::sort(q.members.begin(), q.members.end());
            for (PointId p : q.members) sys.point_cube[li][static_cast<std::size_t>(p)] = id;
        }
    }

    for (Cube& q : sys.cubes) q.mass = space.mass(q.members);
    sys.rebuild_caches(space);
    return sys;
}

ValidationReport check_axioms(const DyadicSystem& sys, const PointSpace& space,
                              bool exhaustive_pairs) {
    ValidationReport rep;
    const int n = space.size();
    const double a0 = space.a0();
    const double c_q = cube_inner_constant(a0);
    const double big_c_q = cube_outer_constant(a0);

    // (1) each generation partitions the point set
    for (int g = sys.gen_min; g < sys.gen_max; ++g) {
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        for (int id : sys.level(g))
            for (PointId p : sys.cube(id).members) seen[static_cast<std::size_t>(p)]++;
        for (PointId p = 0; p < n; ++p) {
            if (seen[static_cast<std::size_t>(p)] == 0)
                rep.add("PartitionGap", "gen " + std::to_string(g) + " point " + std::to_string(p));
            if (seen[static_cast<std::size_t>(p)] > 1)
                rep.add("PartitionOverlap", "gen " + std::to_string(g) + " point " + std::to_string(p));
        }
    }

    // (2),(5) nesting through parent links; exhaustive pairwise check optional
    for (const Cube& q : sys.cubes) {
        if (q.gen > sys.gen_min) {
            if (q.parent < 0) {
                rep.add("MissingParent", "cube " + std::to_string(q.id));
                continue;
            }
            const Cube& par = sys.cube(q.parent);
            if (par.gen != q.gen - 1)
                rep.add("ParentGeneration", "cube " + std::to_string(q.id));
            if (!sys.subset(q.id, q.parent))
                rep.add("NestingViolation",
                        "cube " + std::to_string(q.id) + " not inside parent " + std::to_string(q.parent));
        }
        for (int cid : q.children)
            if (sys.cube(cid).parent != q.id)
                rep.add("ChildLinkBroken", "cube " + std::to_string(q.id));
    }
    if (exhaustive_pairs) {
        for (const Cube& a : sys.cubes)
            for (const Cube& b : sys.cubes) {
                if (a.gen > b.gen && !sys.subset(a.id, b.id) && !sys.disjoint(a.id, b.id))
                    rep.add("CrossGenOverlap",
                            std::to_string(a.id) + " vs " + std::to_string(b.id));
            }
    }

    // (3) ball sandwich
    for (const Cube& q : sys.cubes) {
        const double s = q.side;
        for (PointId p : q.members)
            if (!(space.rho(q.center, p) < big_c_q * s)) {
                rep.add("OuterBallViolation",
                        "cube " + std::to_string(q.id) + " point " + std::to_string(p) + " dist " +
                            fmt(space.rho(q.center, p)) + " side " + fmt(s));
                break;
            }
        for (PointId p = 0; p < n; ++p)
            if (space.rho(q.center, p) < c_q * s && !sys.contains(q.id, p)) {
                rep.add("InnerBallViolation",
                        "cube " + std::to_string(q.id) + " misses point " + std::to_string(p));
                break;
            }
        if (!sys.contains(q.id, q.center))
            rep.add("CenterOutsideCube", "cube " + std::to_string(q.id));
    }

    // center separation and covering per generation
    for (int g = sys.gen_min; g < sys.gen_max; ++g) {
        const double s = sys.side(g);
        const auto& lvl = sys.level(g);
        for (std::size_t i = 0; i < lvl.size(); ++i)
            for (std::size_t j = i + 1; j < lvl.size(); ++j) {
                const double d = space.rho(sys.cube(lvl[i]).center, sys.cube(lvl[j]).center);
                if (d < s)
                    rep.add("CenterSeparation", "gen " + std::to_string(g) + " cubes " +
                                                    std::to_string(lvl[i]) + "," + std::to_string(lvl[j]));
            }
        for (PointId p = 0; p < n; ++p) {
            double best = kInf;
            for (int id : lvl) best = std::min(best, space.rho(p, sys.cube(id).center));
            if (!(best < s)) {
                rep.add("CenterCoveringGap", "gen " + std::to_string(g) + " point " + std::to_string(p));
                break;
            }
        }
    }

    // (6) child count bounded by the admissibility packing count, and children
    // admissible to their parent
    int m_bound = 1;
    for (int g = sys.gen_min; g + 1 < sys.gen_max; ++g) {
        const double sep = sys.side(g);
        for (int id : sys.level(g)) {
            int count = 0;
            for (int cid : sys.level(g + 1))
                if (space.rho(sys.cube(id).center, sys.cube(cid).center) < sep) ++count;
            m_bound = std::max(m_bound, count);
        }
    }
    for (const Cube& q : sys.cubes) {
        if (static_cast<int>(q.children.size()) > m_bound)
            rep.add("ChildCountAboveM", "cube " + std::to_string(q.id) + " children " +
                                            std::to_string(q.children.size()) + " M " +
                                            std::to_string(m_bound));
        for (int cid : q.children)
            if (!(space.rho(q.center, sys.cube(cid).center) < q.side))
                rep.add("ChildNotAdmissible", "cube " + std::to_string(q.id) + " child " +
                                                  std::to_string(cid));
    }

    return rep;
}

int containing_cube(const DyadicSystem& sys, PointId p, int gen) {
    if (!sys.has_gen(gen))
        throw Error(errc::generation_out_of_range, "generation " + std::to_string(gen));
    const auto& slot = sys.point_cube[static_cast<std::size_t>(gen - sys.gen_min)];
    if (p < 0 || p >= static_cast<int>(slot.size()))
        throw Error(errc::unknown_point, "point id " + std::to_string(p));
    return slot[static_cast<std::size_t>(p)];
}

}  // namespace carleson
