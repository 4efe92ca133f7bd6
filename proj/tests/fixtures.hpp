#pragma once

#include <stdexcept>

#include "carleson/product.hpp"
#include "testutil.hpp"

namespace testutil {

// complete two-factor fixture: four grids, Haar bases on the D side (and
// optionally on the D' side), masks and shift maps in both directions
struct ProductFixture {
    carleson::PointSpace s1, s2;
    carleson::DyadicSystem d1, d1p, d2, d2p;
    carleson::HaarBasis b1, b2, b1p, b2p;
    carleson::ProductFrame frame;   // (D1 -> D1', D2 -> D2')
    carleson::ProductFrame mixed;   // (D1 -> D1', D2' -> D2)

    ProductFixture(std::uint64_t seed, int n1 = 48, int n2 = 40, int r = 1, int gmin = -1,
                   int gmax = 2)
        : s1(lattice_space(n1, seed)), s2(lattice_space(n2, seed + 1)) {
        const double delta = carleson::default_delta(1.0);
        d1 = carleson::build_system(s1, delta, gmin, gmax, {seed + 2});
        d1p = carleson::build_system(s1, delta, gmin, gmax, {seed + 3});
        d2 = carleson::build_system(s2, delta, gmin, gmax, {seed + 4});
        d2p = carleson::build_system(s2, delta, gmin, gmax, {seed + 5});
        b1 = carleson::build_haar(d1, s1);
        b2 = carleson::build_haar(d2, s2);
        b1p = carleson::build_haar(d1p, s1);
        b2p = carleson::build_haar(d2p, s2);
        const auto params = carleson::GoodnessParams::make(0.7, 1.0, 1.0, 1.5, r);
        frame.f1 = carleson::make_factor_frame(s1, d1, d1p, b1, params);
        frame.f2 = carleson::make_factor_frame(s2, d2, d2p, b2, params);
        mixed.f1 = frame.f1;
        mixed.f2 = carleson::make_factor_frame(s2, d2p, d2, b2p, params);
    }

    carleson::ProductKey usable_key(const carleson::ProductFrame& fr) const {
        for (const carleson::Cube& q1 : fr.f1.grid->cubes) {
            if (!fr.f1.usable(q1.id)) continue;
            const carleson::CubeHaar& h1 = fr.f1.basis->at(q1.id);
            for (int u1 = 1; u1 <= h1.num_haar(); ++u1) {
                if (h1.zero[static_cast<std::size_t>(u1 - 1)]) continue;
                for (const carleson::Cube& q2 : fr.f2.grid->cubes) {
                    if (!fr.f2.usable(q2.id)) continue;
                    const carleson::CubeHaar& h2 = fr.f2.basis->at(q2.id);
                    for (int u2 = 1; u2 <= h2.num_haar(); ++u2)
                        if (!h2.zero[static_cast<std::size_t>(u2 - 1)])
                            return {q1.id, u1, q2.id, u2};
                }
            }
        }
        throw std::runtime_error("fixture has no usable rectangle");
    }

    carleson::ProductKey usable_key() const { return usable_key(frame); }

    std::vector<carleson::ProductKey> usable_keys(const carleson::ProductFrame& fr) const {
        std::vector<carleson::ProductKey> keys;
        for (const carleson::Cube& q1 : fr.f1.grid->cubes) {
            if (!fr.f1.usable(q1.id)) continue;
            const carleson::CubeHaar& h1 = fr.f1.basis->at(q1.id);
            for (int u1 = 1; u1 <= h1.num_haar(); ++u1) {
                if (h1.zero[static_cast<std::size_t>(u1 - 1)]) continue;
                for (const carleson::Cube& q2 : fr.f2.grid->cubes) {
                    if (!fr.f2.usable(q2.id)) continue;
                    const carleson::CubeHaar& h2 = fr.f2.basis->at(q2.id);
                    for (int u2 = 1; u2 <= h2.num_haar(); ++u2)
                        if (!h2.zero[static_cast<std::size_t>(u2 - 1)])
                            keys.push_back({q1.id, u1, q2.id, u2});
                }
            }
        }
        return keys;
    }

    carleson::ProductField random_field(std::uint64_t seed, int entries) const {
        return random_field_on(frame, seed, entries);
    }

    carleson::ProductField random_field_on(const carleson::ProductFrame& fr, std::uint64_t seed,
                                           int entries) const {
        carleson::Rng rng(carleson::mix_seed(seed, 0xf1e1d));
        const auto keys = usable_keys(fr);
        carleson::ProductField c;
        for (int e = 0; e < entries && !keys.empty(); ++e)
            c[keys[static_cast<std::size_t>(rng.below(keys.size()))]] = rng.uniform(-1.0, 1.0);
        return c;
    }

    std::vector<double> random_product_fn(std::uint64_t seed) const {
        carleson::Rng rng(carleson::mix_seed(seed, 0xf57));
        std::vector<double> f(frame.cells());
        for (auto& v : f) v = rng.uniform(-1.0, 1.0);
        return f;
    }
};

}  // namespace testutil
