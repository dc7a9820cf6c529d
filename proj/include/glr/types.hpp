#ifndef GLR_TYPES_HPP
#define GLR_TYPES_HPP

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace glr {

using Vec3 = Eigen::Vector3d;

/// An ordered set of 3D points. Index i refers to the same point for the
/// whole lifetime of the object; every algorithm in this library relies on
/// that stability.
struct PointCloud {
    std::vector<Vec3> points;

    PointCloud() = default;
    explicit PointCloud(std::vector<Vec3> pts) : points(std::move(pts)) {}

    int size() const { return static_cast<int>(points.size()); }

    /// Throws if the cloud is empty or contains non-finite coordinates.
    void validate() const {
        if (points.empty()) throw std::invalid_argument("empty input");
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (!points[i].allFinite())
                throw std::invalid_argument("non-finite coordinate at point " +
                                            std::to_string(i));
        }
    }
};

/// A surface patch: the k nearest neighbors of a center point, stored in
/// center-translated coordinates (the center itself maps to the origin).
struct Patch {
    int center_index = -1;
    std::vector<int> member_indices;   // exactly k entries, contains center_index
    std::vector<Vec3> translated;      // member position minus center position

    int size() const { return static_cast<int>(member_indices.size()); }
};

enum class CenterSeed {
    FirstPoint,   // farthest point sampling seeded at index 0
};

/// How displacement interpolation splits an edge weight over the three
/// plane vertices. DistanceProportional assigns w*d_va/(d_va+d_vb+d_vc);
/// InverseDistance assigns weights proportional to 1/d instead.
enum class InterpolationWeights {
    DistanceProportional,
    InverseDistance,
};

struct DenoiseConfig {
    double sigma_level = 0.0;       // noise ratio relative to cloud diameter
    int patch_size = 30;            // k, points per patch
    int patch_neighbors = 16;       // K, nearest patch centers searched per patch
    double center_fraction = 0.5;   // fraction of points used as patch centers
    double tau = 1.0;               // projection gap above which interpolation kicks in
    double gamma = 0.5;             // degree-normalization parameter
    int schedule_r = 7;             // denominator of the fidelity-weight schedule
    int max_iterations = 15;
    double convergence_tol = 1e-4;  // mean displacement / input diameter
    double pcg_tol = 1e-8;
    int pcg_max_iters = 1000;
    std::uint64_t rng_seed = 0;
    double radius_multiplier = 0.0; // <= 0: no distance cutoff; else r = C_r * epsilon
    std::optional<double> normalization_exponent; // default -1/gamma
    InterpolationWeights interpolation_weights =
        InterpolationWeights::DistanceProportional;
    bool normalized_laplacian = false; // degraded variant kept for comparison tests

    // Exponent on rho_m * rho_n in the edge weights. The default -gamma keeps
    // the regularizer on the same scale as the mu schedule; at gamma = 0.5 a
    // -1/gamma exponent would raise the degree product to the fourth power
    // and starve it.
    double effective_normalization_exponent() const {
        return normalization_exponent ? *normalization_exponent : -gamma;
    }

    void validate(int cloud_size) const {
        if (sigma_level < 0) throw std::invalid_argument("sigma_level must be >= 0");
        if (patch_size < 1) throw std::invalid_argument("patch_size must be positive");
        if (patch_neighbors < 1)
            throw std::invalid_argument("patch_neighbors must be positive");
        if (!(center_fraction > 0.0) || center_fraction > 1.0)
            throw std::invalid_argument("center_fraction must be in (0,1]");
        if (static_cast<long long>(std::ceil(center_fraction * cloud_size)) < 1)
            throw std::invalid_argument("center_fraction selects no centers");
        if (!(tau > 0)) throw std::invalid_argument("tau must be positive");
        if (!(gamma > 0)) throw std::invalid_argument("gamma must be positive");
        if (schedule_r < 1) throw std::invalid_argument("schedule_r must be positive");
        if (max_iterations < 0)
            throw std::invalid_argument("max_iterations must be >= 0");
        if (!(convergence_tol > 0))
            throw std::invalid_argument("convergence_tol must be positive");
        if (!(pcg_tol > 0)) throw std::invalid_argument("pcg_tol must be positive");
        if (pcg_max_iters < 1)
            throw std::invalid_argument("pcg_max_iters must be positive");
        if (patch_size > cloud_size)
            throw std::invalid_argument("patch larger than cloud");
    }
};

struct IterationStats {
    double mu = 0;
    double mean_displacement = 0;
    std::array<int, 3> pcg_iterations{0, 0, 0};
    std::size_t edge_count = 0;
    double epsilon = 0;
    double objective_before = 0; // quadratic objective at the previous iterate
    double objective_after = 0;  // same objective at the solved iterate
};

struct DenoiseReport {
    int iterations_run = 0;
    std::vector<IterationStats> per_iteration;
    bool converged = false;
};

} // namespace glr

#endif // GLR_TYPES_HPP
