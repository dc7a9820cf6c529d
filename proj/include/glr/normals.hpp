#ifndef GLR_NORMALS_HPP
#define GLR_NORMALS_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "glr/types.hpp"

namespace glr {

/// Unit normal of a patch's reference plane. The plane passes through the
/// patch center, i.e. through the origin of translated coordinates.
struct ReferenceFrame {
    Vec3 normal = Vec3::UnitZ();
    bool degenerate = false; // two smallest covariance eigenvalues coincide
};

struct PlanarProjection {
    std::vector<Vec3> projections;     // in-plane component of each point
    std::vector<double> displacements; // signed offset along the normal
};

/// Second-moment matrix Q = (1/k) sum v v^T over the translated coordinates.
/// No mean subtraction: the patch center, not the centroid, is the origin.
inline Eigen::Matrix3d patch_covariance(const Patch& patch) {
    if (patch.translated.empty()) throw std::invalid_argument("empty patch");
    Eigen::Matrix3d q = Eigen::Matrix3d::Zero();
    for (const Vec3& v : patch.translated) q += v * v.transpose();
    return q / static_cast<double>(patch.translated.size());
}

/// Flips the sign so the component of largest magnitude is nonnegative.
inline Vec3 canonically_oriented(const Vec3& v) {
    int dominant = 0;
    if (std::abs(v[1]) > std::abs(v[dominant])) dominant = 1;
    if (std::abs(v[2]) > std::abs(v[dominant])) dominant = 2;
    return v[dominant] < 0 ? Vec3(-v) : v;
}

/// PCA normal: the unit eigenvector of patch_covariance for the smallest
/// eigenvalue, canonically oriented. When the two smallest eigenvalues agree
/// to 1e-9 relative the patch is flagged degenerate and the lexicographically
/// larger of the two candidate directions is returned, keeping the result
/// deterministic for collinear patches.
inline ReferenceFrame estimate_normal(const Patch& patch) {
    if (patch.size() < 3) throw std::invalid_argument("underdetermined normal");
    Eigen::Matrix3d q = patch_covariance(patch);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(q);
    const auto& values = eig.eigenvalues();   // ascending
    const auto& vectors = eig.eigenvectors();

    ReferenceFrame frame;
    double scale = std::max(std::abs(values[2]), 1.0e-300);
    if (values[1] - values[0] <= 1e-9 * scale) {
        frame.degenerate = true;
        Vec3 a = canonically_oriented(vectors.col(0));
        Vec3 b = canonically_oriented(vectors.col(1));
        bool a_wins = std::lexicographical_compare(b.data(), b.data() + 3,
                                                   a.data(), a.data() + 3);
        frame.normal = a_wins ? a : b;
    } else {
        frame.normal = canonically_oriented(vectors.col(0));
    }
    frame.normal.normalize();
    return frame;
}

/// Splits each point into its in-plane projection and the signed
/// perpendicular displacement: v = projection + displacement * normal.
inline PlanarProjection project_to_plane(std::span<const Vec3> points,
                                         const ReferenceFrame& frame) {
    PlanarProjection out;
    out.projections.reserve(points.size());
    out.displacements.reserve(points.size());
    for (const Vec3& v : points) {
        double disp = v.dot(frame.normal);
        out.projections.push_back(v - disp * frame.normal);
        out.displacements.push_back(disp);
    }
    return out;
}

} // namespace glr

#endif // GLR_NORMALS_HPP
