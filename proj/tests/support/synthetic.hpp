#ifndef GLR_TESTS_SYNTHETIC_HPP
#define GLR_TESTS_SYNTHETIC_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "glr/metrics.hpp"
#include "glr/types.hpp"

namespace glr::testing {

/// Deterministic uniform generator for fixtures; same bit stream everywhere.
class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) { // inclusive bounds
        return lo + static_cast<int>(gen_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    Vec3 vec(double lo, double hi) {
        double x = uniform(lo, hi), y = uniform(lo, hi), z = uniform(lo, hi);
        return {x, y, z};
    }

    std::mt19937_64& engine() { return gen_; }

private:
    std::mt19937_64 gen_;
};

inline PointCloud random_box_cloud(int n, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cloud.points.push_back(rng.vec(-half, half));
    return cloud;
}

/// Uniform samples on the square [-half, half]^2 at z = 0.
inline PointCloud plane_cloud(int n, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        cloud.points.emplace_back(rng.uniform(-half, half), rng.uniform(-half, half), 0.0);
    return cloud;
}

/// Flat plane with a linear density gradient across x: still exactly planar,
/// but the sampling density (and with it the graph degrees) varies.
inline PointCloud graded_plane_cloud(int n, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = half * (2.0 * std::sqrt(rng.uniform()) - 1.0);
        cloud.points.emplace_back(x, rng.uniform(-half, half), 0.0);
    }
    return cloud;
}

/// Uniform samples on the segment x in [-half, half], y = z = 0.
inline PointCloud line_cloud(int n, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cloud.points.emplace_back(rng.uniform(-half, half), 0.0, 0.0);
    return cloud;
}

/// Uniform samples over the six faces of an axis-aligned cube surface.
inline PointCloud cube_surface_cloud(int n, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        int face = rng.uniform_int(0, 5);
        double u = rng.uniform(-half, half), v = rng.uniform(-half, half);
        double s = face % 2 == 0 ? -half : half;
        switch (face / 2) {
        case 0: cloud.points.emplace_back(s, u, v); break;
        case 1: cloud.points.emplace_back(u, s, v); break;
        default: cloud.points.emplace_back(u, v, s); break;
        }
    }
    return cloud;
}

/// Uniform samples on the sphere of the given radius.
inline PointCloud sphere_cloud(int n, std::uint64_t seed, double radius = 1.0) {
    PortableNormal normal(seed);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vec3 dir(normal(), normal(), normal());
        while (dir.norm() < 1e-12) dir = Vec3(normal(), normal(), normal());
        cloud.points.push_back(radius * dir.normalized());
    }
    return cloud;
}

/// Uniform samples inside the solid ball of the given radius.
inline PointCloud ball_cloud(int n, std::uint64_t seed, double radius = 1.0) {
    PortableNormal normal(seed);
    TestRng rng(seed ^ 0x9e3779b97f4a7c15ull);
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Vec3 dir(normal(), normal(), normal());
        while (dir.norm() < 1e-12) dir = Vec3(normal(), normal(), normal());
        double r = radius * std::cbrt(rng.uniform());
        cloud.points.push_back(r * dir.normalized());
    }
    return cloud;
}

/// Regular grid on z = 0; handy when a structured flat patch is needed.
inline PointCloud grid_plane_cloud(int nx, int ny, double spacing = 0.1) {
    PointCloud cloud;
    cloud.points.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
    for (int i = 0; i < nx; ++i)
        for (int j = 0; j < ny; ++j)
            cloud.points.emplace_back(i * spacing, j * spacing, 0.0);
    return cloud;
}

/// A synthetic patch: k random translated coordinates, member ids 0..k-1.
inline Patch random_patch(int k, std::uint64_t seed, double half = 1.0) {
    TestRng rng(seed);
    Patch patch;
    patch.center_index = 0;
    for (int i = 0; i < k; ++i) {
        patch.member_indices.push_back(i);
        patch.translated.push_back(rng.vec(-half, half));
    }
    return patch;
}

} // namespace glr::testing

#endif // GLR_TESTS_SYNTHETIC_HPP
