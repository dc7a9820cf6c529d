#ifndef GLR_SOLVER_HPP
#define GLR_SOLVER_HPP

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "glr/core.hpp"
#include "glr/graph.hpp"
#include "glr/parallel.hpp"
#include "glr/patch_distance.hpp"
#include "glr/sparse.hpp"
#include "glr/types.hpp"

namespace glr {

/// Fidelity weight schedule 25 (exp(iteration / r) - 1). Iterations count
/// from 1 for the first solve, so the weight is strictly positive whenever a
/// system is built.
inline double mu_schedule(int iteration, int schedule_r) {
    if (iteration < 0) throw std::invalid_argument("negative iteration");
    if (schedule_r < 1) throw std::invalid_argument("schedule_r must be positive");
    return 25.0 * (std::exp(static_cast<double>(iteration) / schedule_r) - 1.0);
}

/// Schedule denominator by noise level: 4, 7, 12 for sigma 0.02, 0.03, 0.04.
/// Unknown levels take the middle setting.
inline int schedule_r_for_sigma(double sigma) {
    if (std::abs(sigma - 0.02) < 1e-9) return 4;
    if (std::abs(sigma - 0.03) < 1e-9) return 7;
    if (std::abs(sigma - 0.04) < 1e-9) return 12;
    return 7;
}

struct LinearSystem {
    SparseSymmetricMatrix matrix;             // folded Laplacian plus mu on the diagonal
    std::array<std::vector<double>, 3> rhs;   // one right-hand side per coordinate
    double mu = 0;
};

namespace detail {

inline std::vector<int> flatten_slot_map(const std::vector<std::vector<int>>& patch_members,
                                         int point_count) {
    std::vector<int> slot_to_point;
    for (const auto& members : patch_members)
        slot_to_point.insert(slot_to_point.end(), members.begin(), members.end());
    std::vector<char> covered(static_cast<std::size_t>(point_count), 0);
    for (int p : slot_to_point) {
        if (p < 0 || p >= point_count)
            throw std::invalid_argument("patch member index out of range");
        covered[static_cast<std::size_t>(p)] = 1;
    }
    for (char c : covered)
        if (!c) throw std::invalid_argument("coverage violated");
    return slot_to_point;
}

} // namespace detail

/// S^T L_p S realized as an index fold: every stacked entry lands on the
/// points its slots sample. The result is itself a combinatorial Laplacian on
/// the point set (coincident-point pairs cancel exactly).
inline SparseSymmetricMatrix fold_point_laplacian(
    const SparseSymmetricMatrix& point_laplacian,
    const std::vector<std::vector<int>>& patch_members, int point_count) {
    std::vector<int> slot_to_point = detail::flatten_slot_map(patch_members, point_count);
    if (static_cast<int>(slot_to_point.size()) != point_laplacian.dimension())
        throw std::invalid_argument("laplacian dimension does not match patches");
    std::vector<SparseTriplet> triplets;
    triplets.reserve(point_laplacian.stored_entries());
    for (const SparseTriplet& t : point_laplacian.entries()) {
        int p = slot_to_point[static_cast<std::size_t>(t.row)];
        int q = slot_to_point[static_cast<std::size_t>(t.col)];
        if (t.row != t.col && p == q) {
            // an off-diagonal entry folding onto one point carries its mirror too
            triplets.push_back({p, p, 2.0 * t.value});
        } else {
            triplets.push_back({std::min(p, q), std::max(p, q), t.value});
        }
    }
    return SparseSymmetricMatrix::from_triplets(point_count, std::move(triplets));
}

/// Builds the per-coordinate normal equations. The sampling operator is
/// realized purely through the patch member index lists: the stacked
/// Laplacian is folded onto the points it samples, mu is added on the
/// diagonal, and the right-hand sides combine the fidelity anchor with the
/// gathered centering term.
inline LinearSystem build_system(const SparseSymmetricMatrix& point_laplacian,
                                 const std::vector<std::vector<int>>& patch_members,
                                 const std::vector<Vec3>& centers,
                                 const std::vector<Vec3>& anchor, double mu) {
    if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
    if (patch_members.size() != centers.size())
        throw std::invalid_argument("centers do not match patches");
    int n = static_cast<int>(anchor.size());
    std::vector<int> slot_to_point = detail::flatten_slot_map(patch_members, n);
    if (static_cast<int>(slot_to_point.size()) != point_laplacian.dimension())
        throw std::invalid_argument("laplacian dimension does not match patches");

    SparseSymmetricMatrix folded =
        fold_point_laplacian(point_laplacian, patch_members, n);
    std::vector<SparseTriplet> triplets(folded.entries().begin(), folded.entries().end());
    triplets.reserve(triplets.size() + static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) triplets.push_back({i, i, mu});

    LinearSystem system;
    system.mu = mu;
    system.matrix = SparseSymmetricMatrix::from_triplets(n, std::move(triplets));

    std::vector<double> center_coord(slot_to_point.size());
    for (int axis = 0; axis < 3; ++axis) {
        std::size_t slot = 0;
        for (std::size_t m = 0; m < patch_members.size(); ++m)
            for (std::size_t j = 0; j < patch_members[m].size(); ++j)
                center_coord[slot++] = centers[m][axis];
        std::vector<double> lc = point_laplacian.multiply(center_coord);
        std::vector<double>& b = system.rhs[static_cast<std::size_t>(axis)];
        b.assign(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = mu * anchor[static_cast<std::size_t>(i)][axis];
        for (std::size_t s = 0; s < slot_to_point.size(); ++s)
            b[static_cast<std::size_t>(slot_to_point[s])] += lc[s];
    }
    return system;
}

struct SolveResult {
    std::vector<double> x;
    int iterations = 0;
    bool converged = true;
};

/// Jacobi-preconditioned conjugate gradients on one coordinate. Returns the
/// best iterate with converged = false when the iteration cap is hit first.
inline SolveResult solve_coordinate(const LinearSystem& system, int axis,
                                    double tol = 1e-8, int max_iters = 1000,
                                    const std::vector<double>* warm_start = nullptr) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("axis out of range");
    const SparseSymmetricMatrix& a = system.matrix;
    const std::vector<double>& b = system.rhs[static_cast<std::size_t>(axis)];
    std::size_t n = b.size();

    SolveResult result;
    double b_norm = 0;
    for (double v : b) b_norm += v * v;
    b_norm = std::sqrt(b_norm);
    if (b_norm == 0) {
        result.x.assign(n, 0.0);
        return result;
    }

    std::vector<double> inv_diag = a.diagonal();
    for (double& d : inv_diag) {
        if (!(d > 0)) throw std::runtime_error("numerical breakdown");
        d = 1.0 / d;
    }

    std::vector<double> x = warm_start && warm_start->size() == n
                                ? *warm_start
                                : std::vector<double>(n, 0.0);
    std::vector<double> r(n), z(n), p(n), ap(n);
    a.multiply(x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - r[i];

    auto residual_norm = [&] {
        double s = 0;
        for (double v : r) s += v * v;
        return std::sqrt(s);
    };

    double rz = 0;
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = inv_diag[i] * r[i];
        rz += r[i] * z[i];
    }
    p = z;

    for (int it = 0; it < max_iters; ++it) {
        double rn = residual_norm();
        if (!std::isfinite(rn)) throw std::runtime_error("numerical breakdown");
        if (rn <= tol * b_norm) {
            result.x = std::move(x);
            result.iterations = it;
            return result;
        }
        a.multiply(p, ap);
        double p_ap = 0;
        for (std::size_t i = 0; i < n; ++i) p_ap += p[i] * ap[i];
        if (!std::isfinite(p_ap) || p_ap <= 0)
            throw std::runtime_error("numerical breakdown");
        double alpha = rz / p_ap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        double rz_next = 0;
        for (std::size_t i = 0; i < n; ++i) {
            z[i] = inv_diag[i] * r[i];
            rz_next += r[i] * z[i];
        }
        double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        result.iterations = it + 1;
    }
    result.x = std::move(x);
    result.converged = residual_norm() <= tol * b_norm;
    return result;
}

/// Dense spectral reference for the per-coordinate solve: eigendecompose
/// L + mu I and apply the inverse filter diag(1/lambda_i) in the eigenbasis,
/// which equals (L + mu I)^{-1} rhs. Test oracle only; capped at 500 rows.
inline std::vector<double> spectral_filter_reference(const SparseSymmetricMatrix& laplacian,
                                                     double mu,
                                                     std::span<const double> rhs) {
    if (laplacian.dimension() > 500) throw std::invalid_argument("oracle limit");
    if (static_cast<int>(rhs.size()) != laplacian.dimension())
        throw std::invalid_argument("dimension mismatch");
    Eigen::MatrixXd dense = laplacian.to_dense();
    dense.diagonal().array() += mu;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
    Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(rhs.data(),
                                                          static_cast<Eigen::Index>(rhs.size()));
    Eigen::VectorXd coeff = eig.eigenvectors().transpose() * v;
    coeff.array() /= eig.eigenvalues().array();
    Eigen::VectorXd x = eig.eigenvectors() * coeff;
    return {x.data(), x.data() + x.size()};
}

/// Quadratic objective: the stacked-coordinate Laplacian form of the
/// translated patches plus mu times the squared distance to the anchor.
inline double objective_value(const SparseSymmetricMatrix& point_laplacian,
                              const std::vector<std::vector<int>>& patch_members,
                              const std::vector<Vec3>& centers,
                              const std::vector<Vec3>& positions,
                              const std::vector<Vec3>& anchor, double mu) {
    std::size_t total = 0;
    for (const auto& members : patch_members) total += members.size();
    if (static_cast<int>(total) != point_laplacian.dimension())
        throw std::invalid_argument("laplacian dimension does not match patches");
    double value = 0;
    std::vector<double> stacked(total);
    for (int axis = 0; axis < 3; ++axis) {
        std::size_t slot = 0;
        for (std::size_t m = 0; m < patch_members.size(); ++m)
            for (int point : patch_members[m])
                stacked[slot++] =
                    positions[static_cast<std::size_t>(point)][axis] - centers[m][axis];
        value += quadratic_form(point_laplacian, stacked);
    }
    double fidelity = 0;
    for (std::size_t i = 0; i < positions.size(); ++i)
        fidelity += (anchor[i] - positions[i]).squaredNorm();
    return value + mu * fidelity;
}

/// One iteration's worth of graph machinery over a set of positions:
/// patches, frames, candidate edges, measured distances, kernel weights.
struct PipelineGraph {
    std::vector<Patch> patches;
    std::vector<ReferenceFrame> frames;
    std::vector<Vec3> centers;
    PatchGraph graph;
};

inline PipelineGraph build_pipeline_graph(const PointCloud& cloud,
                                          const DenoiseConfig& config) {
    cloud.validate();
    config.validate(cloud.size());

    PipelineGraph out;
    KdTree tree(cloud.points);
    std::vector<int> center_indices =
        select_patch_centers(cloud, config.center_fraction);

    out.patches.resize(center_indices.size());
    parallel_for(static_cast<int>(center_indices.size()), [&](int i) {
        out.patches[static_cast<std::size_t>(i)] = extract_patch(
            cloud, tree, center_indices[static_cast<std::size_t>(i)], config.patch_size);
    });
    out.patches = ensure_coverage(cloud, tree, std::move(out.patches), config.patch_size);

    int patch_count = static_cast<int>(out.patches.size());
    out.frames.resize(out.patches.size());
    parallel_for(patch_count, [&](int m) {
        out.frames[static_cast<std::size_t>(m)] =
            estimate_normal(out.patches[static_cast<std::size_t>(m)]);
    });
    out.centers.resize(out.patches.size());
    for (std::size_t m = 0; m < out.patches.size(); ++m)
        out.centers[m] = cloud.points[static_cast<std::size_t>(out.patches[m].center_index)];

    if (patch_count < 2) return out;
    int neighbors = std::min(config.patch_neighbors, patch_count - 1);
    std::vector<std::pair<int, int>> pairs = patch_knn_edges(out.centers, neighbors);

    std::vector<PatchGraphEdge> edges(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int e) {
        auto [m, n] = pairs[static_cast<std::size_t>(e)];
        PatchDistanceResult d = patch_distance(
            out.patches[static_cast<std::size_t>(m)], out.patches[static_cast<std::size_t>(n)],
            out.frames[static_cast<std::size_t>(m)], out.frames[static_cast<std::size_t>(n)],
            config.tau, config.interpolation_weights);
        edges[static_cast<std::size_t>(e)] =
            PatchGraphEdge{m, n, d.distance, 0.0, std::move(d.correspondences)};
    });
    out.graph = finalize_patch_graph(std::move(edges), patch_count,
                                     config.effective_normalization_exponent(),
                                     config.radius_multiplier);
    return out;
}

/// Stacked point-domain Laplacian of a pipeline graph.
inline SparseSymmetricMatrix pipeline_point_laplacian(const PipelineGraph& pipeline,
                                                      int patch_size) {
    int patch_count = static_cast<int>(pipeline.patches.size());
    PointLaplacianBuilder builder(patch_count * patch_size);
    std::vector<int> slot_map(static_cast<std::size_t>(2 * patch_size));
    for (const PatchGraphEdge& edge : pipeline.graph.edges) {
        SparseSymmetricMatrix subgraph =
            build_subgraph_laplacian(edge.correspondences, edge.weight, 2 * patch_size);
        for (int i = 0; i < patch_size; ++i) {
            slot_map[static_cast<std::size_t>(i)] = edge.m * patch_size + i;
            slot_map[static_cast<std::size_t>(patch_size + i)] = edge.n * patch_size + i;
        }
        builder.add(subgraph, slot_map);
    }
    return builder.finish();
}

/// Full denoising loop. Each iteration rebuilds the patch graph from the
/// current iterate, assembles the stacked Laplacian, and solves the three
/// coordinate systems with the scheduled fidelity weight, anchored at the
/// previous iterate. Stops when the mean displacement falls below
/// convergence_tol times the input diameter, or after max_iterations.
inline std::pair<PointCloud, DenoiseReport> denoise(const PointCloud& cloud,
                                                    const DenoiseConfig& config) {
    cloud.validate();
    config.validate(cloud.size());

    int n = cloud.size();
    double diameter = estimate_diameter(cloud);
    PointCloud current = cloud;
    DenoiseReport report;

    for (int iteration = 1; iteration <= config.max_iterations; ++iteration) {
        std::string stage = "graph";
        try {
            PipelineGraph pipeline = build_pipeline_graph(current, config);
            SparseSymmetricMatrix lp =
                pipeline_point_laplacian(pipeline, config.patch_size);
            if (config.normalized_laplacian) lp = normalized_laplacian(lp);

            std::vector<std::vector<int>> patch_members(pipeline.patches.size());
            for (std::size_t m = 0; m < pipeline.patches.size(); ++m)
                patch_members[m] = pipeline.patches[m].member_indices;

            stage = "system";
            double mu = mu_schedule(iteration, config.schedule_r);
            LinearSystem system = build_system(lp, patch_members, pipeline.centers,
                                               current.points, mu);

            IterationStats stats;
            stats.mu = mu;
            stats.edge_count = pipeline.graph.edges.size();
            stats.epsilon = pipeline.graph.epsilon;
            stats.objective_before =
                objective_value(lp, patch_members, pipeline.centers, current.points,
                                current.points, mu);

            stage = "solve";
            std::array<SolveResult, 3> solves;
            parallel_for(3, [&](int axis) {
                std::vector<double> warm(static_cast<std::size_t>(n));
                for (int i = 0; i < n; ++i)
                    warm[static_cast<std::size_t>(i)] = current.points[static_cast<std::size_t>(i)][axis];
                solves[static_cast<std::size_t>(axis)] =
                    solve_coordinate(system, axis, config.pcg_tol,
                                     config.pcg_max_iters, &warm);
            });

            PointCloud next = current;
            for (int i = 0; i < n; ++i)
                for (int axis = 0; axis < 3; ++axis)
                    next.points[static_cast<std::size_t>(i)][axis] =
                        solves[static_cast<std::size_t>(axis)].x[static_cast<std::size_t>(i)];

            stats.objective_after =
                objective_value(lp, patch_members, pipeline.centers, next.points,
                                current.points, mu);
            for (int axis = 0; axis < 3; ++axis)
                stats.pcg_iterations[static_cast<std::size_t>(axis)] =
                    solves[static_cast<std::size_t>(axis)].iterations;

            double displacement = 0;
            for (int i = 0; i < n; ++i)
                displacement +=
                    (next.points[static_cast<std::size_t>(i)] - current.points[static_cast<std::size_t>(i)]).norm();
            displacement /= n;
            stats.mean_displacement = displacement;

            current = std::move(next);
            report.per_iteration.push_back(stats);
            report.iterations_run = iteration;

            if (displacement <= config.convergence_tol * diameter) {
                report.converged = true;
                break;
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("denoise iteration " + std::to_string(iteration) +
                                     ", stage " + stage + ": " + e.what());
        }
    }
    return {std::move(current), std::move(report)};
}

} // namespace glr

#endif // GLR_SOLVER_HPP
