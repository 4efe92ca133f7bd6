#include "carleson/haar.hpp"

#include <algorithm>
#include <cmath>

#include "carleson/errors.hpp"

namespace carleson {

HaarBasis build_haar(const DyadicSystem& sys, const PointSpace& space) {
    HaarBasis basis;
    basis.sys_ = &sys;
    basis.space_ = &space;
    basis.data_.resize(sys.cubes.size());
    basis.point_cell_.assign(sys.cubes.size(),
                             std::vector<int>(static_cast<std::size_t>(space.size()), -1));

    for (const Cube& q : sys.cubes) {
        CubeHaar h;
        h.cube = q.id;
        h.mass = q.mass;
        h.zero_mass = !(q.mass > 0.0);

        if (q.gen + 1 < sys.gen_max) {
            for (int cid : q.children) {
                const Cube& c = sys.cube(cid);
                HaarCell cell;
                cell.is_point = false;
                cell.ref = cid;
                cell.members = c.members;
                cell.mass = c.mass;
                h.cells.push_back(std::move(cell));
            }
        } else {
            for (PointId p : q.members) {
                HaarCell cell;
                cell.is_point = true;
                cell.ref = p;
                cell.members = {p};
                cell.mass = space.weight(p);
                h.cells.push_back(std::move(cell));
            }
        }
        std::sort(h.cells.begin(), h.cells.end(), [](const HaarCell& x, const HaarCell& y) {
            if (x.mass != y.mass) return x.mass > y.mass;  // descending mass
            return x.ref < y.ref;                          // ties by id
        });

        auto& pc = basis.point_cell_[static_cast<std::size_t>(q.id)];
        for (std::size_t ci = 0; ci < h.cells.size(); ++ci)
            for (PointId p : h.cells[ci].members) pc[static_cast<std::size_t>(p)] = static_cast<int>(ci);

        const int m_q = h.num_children();
        if (m_q >= 2) {
            // suffix masses: hat[u] = mass of cells u..M-1 (0-indexed)
            std::vector<double> hat(static_cast<std::size_t>(m_q) + 1, 0.0);
            for (int i = m_q - 1; i >= 0; --i)
                hat[static_cast<std::size_t>(i)] =
                    hat[static_cast<std::size_t>(i) + 1] + h.cells[static_cast<std::size_t>(i)].mass;
            h.a.assign(static_cast<std::size_t>(m_q - 1), 0.0);
            h.b.assign(static_cast<std::size_t>(m_q - 1), 0.0);
            h.zero.assign(static_cast<std::size_t>(m_q - 1), false);
            for (int u = 1; u < m_q; ++u) {
                const double mu_u = h.cells[static_cast<std::size_t>(u - 1)].mass;   // mu(Q_u)
                const double mu_hat_u = hat[static_cast<std::size_t>(u - 1)];        // mu(hat Q_u)
                const double mu_hat_u1 = hat[static_cast<std::size_t>(u)];           // mu(hat Q_{u+1})
                if (mu_u <= 0.0 || mu_hat_u1 <= 0.0 || mu_hat_u <= 0.0) {
                    h.zero[static_cast<std::size_t>(u - 1)] = true;
                    continue;
                }
                h.a[static_cast<std::size_t>(u - 1)] =
                    std::sqrt(mu_hat_u1) / (std::sqrt(mu_u) * std::sqrt(mu_hat_u));
                h.b[static_cast<std::size_t>(u - 1)] =
                    std::sqrt(mu_u) / (std::sqrt(mu_hat_u) * std::sqrt(mu_hat_u1));
            }
        }
        basis.data_[static_cast<std::size_t>(q.id)] = std::move(h);
    }
    return basis;
}

bool HaarBasis::has_u(int cube_id, int u) const {
    const CubeHaar& h = at(cube_id);
    return u >= 0 && u <= h.num_haar();
}

int HaarBasis::cell_of(int cube_id, PointId p) const {
    return point_cell_[static_cast<std::size_t>(cube_id)][static_cast<std::size_t>(p)];
}

double HaarBasis::value(int cube_id, int u, PointId p) const {
    const CubeHaar& h = at(cube_id);
    const int ci = cell_of(cube_id, p);
    if (ci < 0) return 0.0;
    if (u == 0) return h.zero_mass ? 0.0 : 1.0 / std::sqrt(h.mass);
    if (u > h.num_haar() || h.zero[static_cast<std::size_t>(u - 1)]) return 0.0;
    if (ci == u - 1) return h.a[static_cast<std::size_t>(u - 1)];
    if (ci >= u) return -h.b[static_cast<std::size_t>(u - 1)];
    return 0.0;
}

double HaarBasis::coefficient(int cube_id, int u, const std::vector<double>& f) const {
    const CubeHaar& h = at(cube_id);
    if (u == 0) {
        if (h.zero_mass) return 0.0;
        double s = 0.0;
        for (const HaarCell& cell : h.cells)
            for (PointId p : cell.members) s += f[static_cast<std::size_t>(p)] * space_->weight(p);
        return s / std::sqrt(h.mass);
    }
    if (u > h.num_haar() || h.zero[static_cast<std::size_t>(u - 1)]) return 0.0;
    double head = 0.0, tail = 0.0;
    for (std::size_t ci = static_cast<std::size_t>(u - 1); ci < h.cells.size(); ++ci) {
        double cs = 0.0;
        for (PointId p : h.cells[ci].members) cs += f[static_cast<std::size_t>(p)] * space_->weight(p);
        if (ci == static_cast<std::size_t>(u - 1))
            head = cs;
        else
            tail += cs;
    }
    return h.a[static_cast<std::size_t>(u - 1)] * head - h.b[static_cast<std::size_t>(u - 1)] * tail;
}

double HaarBasis::norm_l1(int cube_id, int u) const {
    const CubeHaar& h = at(cube_id);
    if (u == 0) return h.zero_mass ? 0.0 : std::sqrt(h.mass);
    if (u > h.num_haar() || h.zero[static_cast<std::size_t>(u - 1)]) return 0.0;
    double hat = 0.0;
    for (std::size_t ci = static_cast<std::size_t>(u); ci < h.cells.size(); ++ci)
        hat += h.cells[ci].mass;
    return h.a[static_cast<std::size_t>(u - 1)] * h.cells[static_cast<std::size_t>(u - 1)].mass +
           h.b[static_cast<std::size_t>(u - 1)] * hat;
}

double HaarBasis::norm_l2(int cube_id, int u) const {
    const CubeHaar& h = at(cube_id);
    if (u == 0) return h.zero_mass ? 0.0 : 1.0;
    if (u > h.num_haar() || h.zero[static_cast<std::size_t>(u - 1)]) return 0.0;
    double hat = 0.0;
    for (std::size_t ci = static_cast<std::size_t>(u); ci < h.cells.size(); ++ci)
        hat += h.cells[ci].mass;
    const double a = h.a[static_cast<std::size_t>(u - 1)];
    const double b = h.b[static_cast<std::size_t>(u - 1)];
    return std::sqrt(a * a * h.cells[static_cast<std::size_t>(u - 1)].mass + b * b * hat);
}

double HaarBasis::norm_linf(int cube_id, int u) const {
    const CubeHaar& h = at(cube_id);
    if (u == 0) return h.zero_mass ? 0.0 : 1.0 / std::sqrt(h.mass);
    if (u > h.num_haar() || h.zero[static_cast<std::size_t>(u - 1)]) return 0.0;
    return std::max(h.a[static_cast<std::size_t>(u - 1)], h.b[static_cast<std::size_t>(u - 1)]);
}

std::vector<int> HaarBasis::zero_mass_cubes() const {
    std::vector<int> out;
    for (const CubeHaar& h : data_)
        if (h.zero_mass) out.push_back(h.cube);
    return out;
}

CoefficientField expand(const std::vector<double>& f, const HaarBasis& basis, int m, int k) {
    const DyadicSystem& sys = basis.system();
    if (m < sys.gen_min || k > sys.gen_max || m >= k)
        throw Error(errc::generation_out_of_range,
                    "[" + std::to_string(m) + "," + std::to_string(k) + ")");
    CoefficientField c;
    for (int g = m; g < k; ++g) {
        for (int id : sys.level(g)) {
            const CubeHaar& h = basis.at(id);
            if (g == m) {
                const double v = basis.coefficient(id, 0, f);
                if (v != 0.0) c[{id, 0}] = v;
            }
            for (int u = 1; u <= h.num_haar(); ++u) {
                const double v = basis.coefficient(id, u, f);
                if (v != 0.0) c[{id, u}] = v;
            }
        }
    }
    return c;
}

std::vector<double> reconstruct(const CoefficientField& c, const HaarBasis& basis) {
    const PointSpace& space = basis.space();
    std::vector<double> f(static_cast<std::size_t>(space.size()), 0.0);
    for (const auto& [ix, coef] : c) {
        if (ix.cube < 0 || ix.cube >= static_cast<int>(basis.system().cubes.size()) ||
            !basis.has_u(ix.cube, ix.u))
            throw Error(errc::unknown_index,
                        "(" + std::to_string(ix.cube) + "," + std::to_string(ix.u) + ")");
        const CubeHaar& h = basis.at(ix.cube);
        if (ix.u == 0) {
            if (h.zero_mass) continue;
            const double v = coef / std::sqrt(h.mass);
            for (const HaarCell& cell : h.cells)
                for (PointId p : cell.members) f[static_cast<std::size_t>(p)] += v;
            continue;
        }
        if (h.zero[static_cast<std::size_t>(ix.u - 1)]) continue;
        const double a = h.a[static_cast<std::size_t>(ix.u - 1)];
        const double b = h.b[static_cast<std::size_t>(ix.u - 1)];
        for (std::size_t ci = static_cast<std::size_t>(ix.u - 1); ci < h.cells.size(); ++ci) {
            const double v = (ci == static_cast<std::size_t>(ix.u - 1)) ? coef * a : -coef * b;
            for (PointId p : h.cells[ci].members) f[static_cast<std::size_t>(p)] += v;
        }
    }
    return f;
}

double inner(const PointSpace& space, const std::vector<double>& f, const std::vector<double>& g) {
    double s = 0.0;
    for (PointId p = 0; p < space.size(); ++p)
        s += f[static_cast<std::size_t>(p)] * g[static_cast<std::size_t>(p)] * space.weight(p);
    return s;
}

double norm_l2(const PointSpace& space, const std::vector<double>& f) {
    return std::sqrt(std::max(0.0, inner(space, f, f)));
}

}  // namespace carleson
