#ifndef GLR_GRAPH_HPP
#define GLR_GRAPH_HPP

#include <algorithm>
#include <cmath>
#include <set>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glr/patch_distance.hpp"
#include "glr/sparse.hpp"
#include "glr/spatial.hpp"
#include "glr/types.hpp"

namespace glr {

/// Candidate edge set: each center nominates its K nearest fellow centers and
/// the union is symmetrized. Pairs come back unordered, each listed once with
/// m < n, sorted.
inline std::vector<std::pair<int, int>> patch_knn_edges(
    const std::vector<Vec3>& centers, int K) {
    int count = static_cast<int>(centers.size());
    if (K < 1) throw std::invalid_argument("patch_knn_edges: K must be positive");
    if (K >= count)
        throw std::invalid_argument("patch_knn_edges: K must be below the patch count");
    KdTree index(centers);
    std::set<std::pair<int, int>> pairs;
    for (int m = 0; m < count; ++m) {
        auto neighbors = index.knn(centers[static_cast<std::size_t>(m)], K + 1);
        int taken = 0;
        for (const auto& [n, dist] : neighbors) {
            if (n == m) continue;
            if (taken == K) break;
            pairs.emplace(std::min(m, n), std::max(m, n));
            ++taken;
        }
    }
    return {pairs.begin(), pairs.end()};
}

/// Kernel bandwidth rule: half the square root of the population standard
/// deviation of the squared distances. Degenerate inputs fall back to the
/// mean distance, and to 1 when even that vanishes, so weights stay usable
/// on perfectly self-similar graphs. The all-equal case is detected with a
/// relative threshold to absorb summation roundoff.
inline double epsilon_from_distances(std::span<const double> distances) {
    if (distances.empty()) throw std::invalid_argument("no distances");
    double n = static_cast<double>(distances.size());
    double mean_sq = 0, mean_d = 0;
    for (double d : distances) {
        mean_sq += d * d;
        mean_d += d;
    }
    mean_sq /= n;
    mean_d /= n;
    double var = 0;
    for (double d : distances) {
        double diff = d * d - mean_sq;
        var += diff * diff;
    }
    var /= n;
    double std_sq = std::sqrt(var);
    if (std_sq > 1e-12 * std::max(mean_sq, 1e-300))
        return 0.5 * std::sqrt(std_sq);
    if (mean_d > 0) return mean_d;
    return 1.0;
}

/// Thresholded Gaussian kernel. radius <= 0 disables the cutoff.
inline double kernel_psi(double distance, double epsilon, double radius) {
    if (!(epsilon > 0)) throw std::invalid_argument("nonpositive epsilon");
    if (radius > 0 && distance >= radius) return 0.0;
    return std::exp(-(distance * distance) / (2.0 * epsilon * epsilon));
}

/// Degree-normalized edge weight with a caller-chosen exponent on rho_m*rho_n.
inline double edge_weight_with_exponent(double distance, double epsilon, double radius,
                                        double rho_m, double rho_n, double exponent) {
    if (!(rho_m > 0) || !(rho_n > 0)) throw std::invalid_argument("nonpositive degree");
    double psi = kernel_psi(distance, epsilon, radius);
    if (psi == 0.0) return 0.0;
    return std::pow(rho_m * rho_n, exponent) * psi;
}

/// Edge weight (rho_m rho_n)^(-1/gamma) * psi(d).
inline double edge_weight(double distance, double epsilon, double radius, double rho_m,
                          double rho_n, double gamma) {
    if (!(gamma > 0)) throw std::invalid_argument("nonpositive gamma");
    return edge_weight_with_exponent(distance, epsilon, radius, rho_m, rho_n,
                                     -1.0 / gamma);
}

/// Laplacian of the point-pair subgraph for one patch edge. Nodes 0..k-1 are
/// the first patch's points, k..2k-1 the second's. Replacement matches become
/// one edge of weight w_mn; interpolation matches split w_mn over the three
/// plane vertices by the stored fractions.
inline SparseSymmetricMatrix build_subgraph_laplacian(
    std::span<const Correspondence> correspondences, double w_mn, int pair_size) {
    std::vector<SparseTriplet> triplets;
    triplets.reserve(correspondences.size() * 9);
    for (const Correspondence& corr : correspondences) {
        int a = corr.source_slot;
        if (a < 0 || a >= pair_size)
            throw std::invalid_argument("correspondence index out of range");
        for (int t = 0; t < corr.target_count; ++t) {
            int b = corr.target_slots[static_cast<std::size_t>(t)];
            if (b < 0 || b >= pair_size)
                throw std::invalid_argument("correspondence index out of range");
            if (a == b) continue; // a self edge contributes nothing
            double w = w_mn * corr.weights[static_cast<std::size_t>(t)];
            triplets.push_back({a, a, w});
            triplets.push_back({b, b, w});
            triplets.push_back({std::min(a, b), std::max(a, b), -w});
        }
    }
    return SparseSymmetricMatrix::from_triplets(pair_size, std::move(triplets));
}

/// Accumulates subgraph Laplacians into the stacked point-domain Laplacian.
/// The slot maps realize the sampling matrices as index scatter; nothing is
/// ever materialized densely.
class PointLaplacianBuilder {
public:
    explicit PointLaplacianBuilder(int dimension) : dim_(dimension) {
        if (dimension < 0) throw std::invalid_argument("negative dimension");
    }

    void add(const SparseSymmetricMatrix& subgraph, std::span<const int> slot_map) {
        if (static_cast<int>(slot_map.size()) != subgraph.dimension())
            throw std::invalid_argument("slot map size mismatch");
        std::vector<int> sorted(slot_map.begin(), slot_map.end());
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("slot map index collision");
        for (int s : slot_map)
            if (s < 0 || s >= dim_)
                throw std::invalid_argument("slot map index out of range");
        for (const SparseTriplet& t : subgraph.entries()) {
            int p = slot_map[static_cast<std::size_t>(t.row)];
            int q = slot_map[static_cast<std::size_t>(t.col)];
            triplets_.push_back({std::min(p, q), std::max(p, q), t.value});
        }
    }

    SparseSymmetricMatrix finish() {
        return SparseSymmetricMatrix::from_triplets(dim_, std::move(triplets_));
    }

private:
    int dim_;
    std::vector<SparseTriplet> triplets_;
};

inline SparseSymmetricMatrix assemble_point_laplacian(
    const std::vector<std::pair<SparseSymmetricMatrix, std::vector<int>>>& subgraphs,
    int total_dimension) {
    PointLaplacianBuilder builder(total_dimension);
    for (const auto& [subgraph, slot_map] : subgraphs) builder.add(subgraph, slot_map);
    return builder.finish();
}

inline double quadratic_form(const SparseSymmetricMatrix& matrix,
                             std::span<const double> f) {
    if (static_cast<int>(f.size()) != matrix.dimension())
        throw std::invalid_argument("dimension mismatch");
    double sum = 0;
    for (const SparseTriplet& t : matrix.entries()) {
        double term = t.value * f[static_cast<std::size_t>(t.row)] *
                      f[static_cast<std::size_t>(t.col)];
        sum += t.row == t.col ? term : 2.0 * term;
    }
    return sum;
}

/// Sum of the quadratic forms of the coordinate functions: the discrete
/// manifold-dimension estimate, equal to sum_(m,n) w_mn d_mn^2 when the
/// Laplacian's pairing matches the distances.
inline double dimension_estimate(const SparseSymmetricMatrix& matrix,
                                 const std::vector<std::vector<double>>& coordinates) {
    double sum = 0;
    for (const auto& coord : coordinates) sum += quadratic_form(matrix, coord);
    return sum;
}

struct GershgorinBound {
    double lambda_max_bound = 0;
    double condition_bound = 1;
};

/// Gershgorin eigenvalue localization for a combinatorial Laplacian: all
/// eigenvalues sit in [0, 2 rho_max], so cond(L + mu I) <= (2 rho_max + mu)/mu.
inline GershgorinBound gershgorin_bound(const SparseSymmetricMatrix& laplacian,
                                        double mu) {
    if (!(mu > 0)) throw std::invalid_argument("mu must be positive");
    for (const SparseTriplet& t : laplacian.entries())
        if (t.row != t.col && t.value > 1e-12)
            throw std::invalid_argument("positive off-diagonal entry in Laplacian");
    double rho_max = laplacian.max_weighted_degree();
    return {2.0 * rho_max, (2.0 * rho_max + mu) / mu};
}

/// D^{-1/2} L D^{-1/2}. Kept as a comparison variant only: its nullspace is
/// not the constant vector, so it distorts flat geometry when used in the
/// denoising objective.
inline SparseSymmetricMatrix normalized_laplacian(const SparseSymmetricMatrix& laplacian) {
    std::vector<double> diag = laplacian.diagonal();
    std::vector<double> scale(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i)
        scale[i] = diag[i] > 0 ? 1.0 / std::sqrt(diag[i]) : 0.0;
    std::vector<SparseTriplet> triplets;
    triplets.reserve(laplacian.stored_entries());
    for (const SparseTriplet& t : laplacian.entries())
        triplets.push_back({t.row, t.col,
                            t.value * scale[static_cast<std::size_t>(t.row)] *
                                scale[static_cast<std::size_t>(t.col)]});
    return SparseSymmetricMatrix::from_triplets(laplacian.dimension(), std::move(triplets));
}

struct PatchGraphEdge {
    int m = 0;
    int n = 0;
    double distance = 0;
    double weight = 0;
    std::vector<Correspondence> correspondences;
};

/// Patch-level graph: unique unordered edges with distances, kernel weights,
/// the bandwidth and cutoff actually used, and the pre-normalization degrees.
struct PatchGraph {
    std::vector<PatchGraphEdge> edges;
    double epsilon = 1.0;
    double radius = 0.0; // <= 0: unbounded
    std::vector<double> degrees;
};

/// Turns measured edge distances into weights: picks the bandwidth from the
/// distance statistics, accumulates kernel degrees (each patch counts its own
/// psi(0) = 1 so normalization never divides by zero), applies the normalized
/// kernel, and drops zero-weight edges.
inline PatchGraph finalize_patch_graph(std::vector<PatchGraphEdge> edges,
                                       int patch_count, double exponent,
                                       double radius_multiplier) {
    PatchGraph graph;
    graph.degrees.assign(static_cast<std::size_t>(patch_count), 1.0);
    if (edges.empty()) return graph;

    std::vector<double> distances;
    distances.reserve(edges.size());
    for (const PatchGraphEdge& e : edges) distances.push_back(e.distance);
    graph.epsilon = epsilon_from_distances(distances);
    graph.radius = radius_multiplier > 0 ? radius_multiplier * graph.epsilon : 0.0;

    for (const PatchGraphEdge& e : edges) {
        double psi = kernel_psi(e.distance, graph.epsilon, graph.radius);
        graph.degrees[static_cast<std::size_t>(e.m)] += psi;
        graph.degrees[static_cast<std::size_t>(e.n)] += psi;
    }
    graph.edges.reserve(edges.size());
    for (PatchGraphEdge& e : edges) {
        e.weight = edge_weight_with_exponent(
            e.distance, graph.epsilon, graph.radius,
            graph.degrees[static_cast<std::size_t>(e.m)],
            graph.degrees[static_cast<std::size_t>(e.n)], exponent);
        if (e.weight > 0) graph.edges.push_back(std::move(e));
    }
    return graph;
}

} // namespace glr

#endif // GLR_GRAPH_HPP
