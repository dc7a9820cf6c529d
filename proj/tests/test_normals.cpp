#include <doctest.h>

#include <Eigen/Geometry>

#include <cmath>

#include "glr/normals.hpp"
#include "support/synthetic.hpp"

using namespace glr;
using namespace glr::testing;

namespace {

Patch patch_from_points(std::vector<Vec3> points) {
    Patch p;
    p.center_index = 0;
    for (std::size_t i = 0; i < points.size(); ++i)
        p.member_indices.push_back(static_cast<int>(i));
    p.translated = std::move(points);
    return p;
}

} // namespace

TEST_SUITE_BEGIN("normals");

TEST_CASE("covariance of a single origin point is zero") {
    Patch p = patch_from_points({Vec3::Zero()});
    CHECK(patch_covariance(p).norm() == doctest::Approx(0.0));
}

TEST_CASE("covariance of an axis pair") {
    Patch p = patch_from_points({{1, 0, 0}, {-1, 0, 0}});
    Eigen::Matrix3d q = patch_covariance(p);
    Eigen::Matrix3d want = Eigen::Vector3d(1, 0, 0).asDiagonal();
    CHECK((q - want).norm() == doctest::Approx(0.0));
}

TEST_CASE("covariance equals the elementwise brute-force sum") {
    Patch p = random_patch(25, 81);
    Eigen::Matrix3d q = patch_covariance(p);
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
            double sum = 0;
            for (const Vec3& v : p.translated) sum += v[r] * v[c];
            CHECK(q(r, c) == doctest::Approx(sum / 25.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("planar patch yields the plane normal") {
    Patch p = patch_from_points({{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {0, -1, 0}});
    ReferenceFrame frame = estimate_normal(p);
    CHECK_FALSE(frame.degenerate);
    CHECK(std::abs(frame.normal.dot(Vec3(0, 0, 1))) == doctest::Approx(1.0));
    CHECK(frame.normal[2] > 0); // canonical orientation
}

TEST_CASE("collinear patch is flagged degenerate but deterministic") {
    Patch p = patch_from_points({{1, 0, 0}, {2, 0, 0}, {-1, 0, 0}, {0.5, 0, 0}});
    ReferenceFrame a = estimate_normal(p);
    ReferenceFrame b = estimate_normal(p);
    CHECK(a.degenerate);
    CHECK(a.normal == b.normal);
    CHECK(std::abs(a.normal.dot(Vec3(1, 0, 0))) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("estimate_normal requires three points") {
    Patch p = patch_from_points({{1, 0, 0}, {0, 1, 0}});
    CHECK_THROWS_WITH_AS(estimate_normal(p), "underdetermined normal",
                         std::invalid_argument);
}

TEST_CASE("noisy plane normal stays within 5 degrees and solves the eigenproblem") {
    TestRng rng(19);
    PortableNormal noise(55);
    std::vector<Vec3> pts;
    for (int i = 0; i < 30; ++i)
        pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1), 0.01 * noise());
    Patch p = patch_from_points(pts);
    ReferenceFrame frame = estimate_normal(p);
    double angle = std::acos(std::min(1.0, std::abs(frame.normal.dot(Vec3(0, 0, 1)))));
    CHECK(angle < 5.0 * M_PI / 180.0);

    Eigen::Matrix3d q = patch_covariance(p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(q);
    Vec3 residual = q * frame.normal - eig.eigenvalues()[0] * frame.normal;
    CHECK(residual.norm() < 1e-9);
}

TEST_CASE("rotating a patch rotates the normal up to sign") {
    Patch p = random_patch(20, 33);
    // flatten to make the normal well defined
    for (Vec3& v : p.translated) v[2] *= 0.05;
    ReferenceFrame before = estimate_normal(p);
    Eigen::Matrix3d rot =
        Eigen::AngleAxisd(0.83, Vec3(1, 2, 3).normalized()).toRotationMatrix();
    Patch rotated = p;
    for (Vec3& v : rotated.translated) v = rot * v;
    ReferenceFrame after = estimate_normal(rotated);
    CHECK(std::abs((rot * before.normal).dot(after.normal)) >= 1.0 - 1e-9);
}

TEST_CASE("projection splits a point into plane and offset parts") {
    ReferenceFrame frame{Vec3(0, 0, 1), false};
    std::vector<Vec3> pts = {{0, 0, 2}, {3, -1, 0}};
    PlanarProjection proj = project_to_plane(pts, frame);
    CHECK(proj.projections[0] == Vec3(0, 0, 0));
    CHECK(proj.displacements[0] == doctest::Approx(2.0));
    CHECK(proj.displacements[1] == doctest::Approx(0.0));
}

TEST_CASE("projection reconstructs and is idempotent") {
    TestRng rng(91);
    for (int trial = 0; trial < 30; ++trial) {
        ReferenceFrame frame{rng.vec(-1, 1).normalized(), false};
        std::vector<Vec3> pts = {rng.vec(-2, 2)};
        PlanarProjection proj = project_to_plane(pts, frame);
        Vec3 rebuilt = proj.projections[0] + proj.displacements[0] * frame.normal;
        CHECK((rebuilt - pts[0]).norm() < 1e-12);
        CHECK(std::abs(proj.projections[0].dot(frame.normal)) < 1e-10);
        PlanarProjection again = project_to_plane(proj.projections, frame);
        CHECK(std::abs(again.displacements[0]) < 1e-10);
    }
}

TEST_SUITE_END();
