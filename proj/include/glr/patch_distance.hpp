#ifndef GLR_PATCH_DISTANCE_HPP
#define GLR_PATCH_DISTANCE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glr/normals.hpp"
#include "glr/types.hpp"

namespace glr {

enum class MatchDirection { Forward, Backward };

/// One matched point pair (or triple) between two patches, in pair-local
/// slots: 0..k-1 address the first patch of the pair, k..2k-1 the second.
/// Replacement matches carry a single target of weight 1; interpolation
/// matches split the weight over the three plane vertices, the fractions
/// summing to 1.
struct Correspondence {
    int source_slot = -1;
    std::array<int, 3> target_slots{-1, -1, -1};
    std::array<double, 3> weights{1.0, 0.0, 0.0};
    int target_count = 1;
    MatchDirection direction = MatchDirection::Forward;
    bool interpolation_fallback = false;
};

struct PatchDistanceResult {
    double distance = 0;   // sqrt((forward^2 + backward^2) / 2)
    double forward = 0;
    double backward = 0;
    std::vector<Correspondence> correspondences;
};

/// Signed distance from v, measured along direction n, to the plane through
/// a, b, c. The plane normal is normalized so the value is in model units.
inline double plane_interpolated_displacement(const Vec3& v, const Vec3& a,
                                              const Vec3& b, const Vec3& c,
                                              const Vec3& n) {
    Vec3 plane_normal = (b - a).cross(c - a);
    double edge_scale = (b - a).norm() * (c - a).norm();
    double len = plane_normal.norm();
    if (edge_scale <= 0 || len <= 1e-12 * edge_scale)
        throw std::invalid_argument("degenerate interpolation plane");
    plane_normal /= len;
    double denom = n.dot(plane_normal);
    if (std::abs(denom) < 1e-12)
        throw std::invalid_argument("degenerate interpolation plane");
    double offset = -plane_normal.dot(a);
    return (plane_normal.dot(v) + offset) / denom;
}

namespace detail {

// index ordering inside one patch: by projection gap, then by global point id
struct ProjMatch {
    double gap2;
    int local;
    int global;
};

inline bool closer(const ProjMatch& a, const ProjMatch& b) {
    return a.gap2 < b.gap2 || (a.gap2 == b.gap2 && a.global < b.global);
}

} // namespace detail

/// One-directional patch distance: both patches are projected onto the
/// reference plane of the source patch; each source point borrows the
/// displacement of the target point with the nearest projection, or an
/// interpolated displacement when the projection gap exceeds tau.
///
/// Correspondence slots follow the (source, target) order of the arguments:
/// source points occupy 0..k-1, target points k..2k-1.
inline std::pair<double, std::vector<Correspondence>> directed_distance(
    const Patch& source, const Patch& target, const ReferenceFrame& frame,
    double tau,
    InterpolationWeights rule = InterpolationWeights::DistanceProportional) {
    if (source.size() != target.size())
        throw std::invalid_argument("patch sizes differ");
    if (source.size() == 0) throw std::invalid_argument("empty patch");
    const int k = source.size();

    PlanarProjection src = project_to_plane(source.translated, frame);
    PlanarProjection tgt = project_to_plane(target.translated, frame);

    std::vector<Correspondence> correspondences;
    correspondences.reserve(static_cast<std::size_t>(k));
    double sum_sq = 0;

    std::vector<detail::ProjMatch> matches(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            matches[static_cast<std::size_t>(j)] = {
                (src.projections[static_cast<std::size_t>(i)] -
                 tgt.projections[static_cast<std::size_t>(j)])
                    .squaredNorm(),
                j, target.member_indices[static_cast<std::size_t>(j)]};
        }
        auto best = std::min_element(matches.begin(), matches.end(), detail::closer);

        Correspondence corr;
        corr.source_slot = i;
        double diff = 0;
        bool interpolate = std::sqrt(best->gap2) > tau;
        bool fell_back = false;
        if (interpolate && k >= 3) {
            std::array<detail::ProjMatch, 3> tri;
            std::partial_sort_copy(matches.begin(), matches.end(), tri.begin(),
                                   tri.end(), detail::closer);
            const Vec3& v = source.translated[static_cast<std::size_t>(i)];
            const Vec3& a = target.translated[static_cast<std::size_t>(tri[0].local)];
            const Vec3& b = target.translated[static_cast<std::size_t>(tri[1].local)];
            const Vec3& c = target.translated[static_cast<std::size_t>(tri[2].local)];
            try {
                diff = plane_interpolated_displacement(v, a, b, c, frame.normal);
                double da = (v - a).norm(), db = (v - b).norm(), dc = (v - c).norm();
                double wa, wb, wc;
                if (rule == InterpolationWeights::DistanceProportional) {
                    double total = da + db + dc;
                    wa = da / total;
                    wb = db / total;
                    wc = dc / total;
                } else {
                    double ia = 1.0 / da, ib = 1.0 / db, ic = 1.0 / dc;
                    double total = ia + ib + ic;
                    wa = ia / total;
                    wb = ib / total;
                    wc = ic / total;
                }
                corr.target_slots = {k + tri[0].local, k + tri[1].local, k + tri[2].local};
                corr.weights = {wa, wb, wc};
                corr.target_count = 3;
            } catch (const std::invalid_argument&) {
                fell_back = true;
            }
        } else if (interpolate) {
            fell_back = true; // fewer than 3 target points
        }
        if (!interpolate || fell_back) {
            diff = src.displacements[static_cast<std::size_t>(i)] -
                   tgt.displacements[static_cast<std::size_t>(best->local)];
            corr.target_slots = {k + best->local, -1, -1};
            corr.weights = {1.0, 0.0, 0.0};
            corr.target_count = 1;
            corr.interpolation_fallback = fell_back;
        }
        sum_sq += diff * diff;
        correspondences.push_back(corr);
    }
    return {std::sqrt(sum_sq / k), std::move(correspondences)};
}

/// Symmetric patch distance: the two directed measures, each taken in its own
/// patch's reference frame, combined as the root mean square. Correspondences
/// from both directions are concatenated in (m, n) slot convention, with
/// duplicated replacement pairs kept once.
inline PatchDistanceResult patch_distance(
    const Patch& pm, const Patch& pn, const ReferenceFrame& frame_m,
    const ReferenceFrame& frame_n, double tau,
    InterpolationWeights rule = InterpolationWeights::DistanceProportional) {
    const int k = pm.size();
    auto [forward, corr_f] = directed_distance(pm, pn, frame_m, tau, rule);
    auto [backward, corr_b] = directed_distance(pn, pm, frame_n, tau, rule);

    PatchDistanceResult result;
    result.forward = forward;
    result.backward = backward;
    result.distance = std::sqrt((forward * forward + backward * backward) / 2.0);

    std::set<std::pair<int, int>> replacement_pairs;
    auto add = [&](Correspondence corr) {
        if (corr.target_count == 1) {
            auto key = std::minmax(corr.source_slot, corr.target_slots[0]);
            if (!replacement_pairs.insert(key).second) return;
        }
        result.correspondences.push_back(corr);
    };
    for (const Correspondence& corr : corr_f) add(corr);
    for (Correspondence corr : corr_b) {
        // remap from (n, m) local slots into the (m, n) convention
        corr.source_slot += k;
        for (int t = 0; t < corr.target_count; ++t) corr.target_slots[static_cast<std::size_t>(t)] -= k;
        corr.direction = MatchDirection::Backward;
        add(corr);
    }
    return result;
}

/// Directed modified Hausdorff distance: mean distance from each point of
/// `pm` to its positionally nearest point in `pn`. Used for comparison only;
/// the denoising path matches by projection instead.
inline double modified_hausdorff(const Patch& pm, const Patch& pn) {
    if (pm.size() == 0 || pn.size() == 0) throw std::invalid_argument("empty patch");
    double sum = 0;
    for (const Vec3& v : pm.translated) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vec3& w : pn.translated)
            best = std::min(best, (v - w).squaredNorm());
        sum += std::sqrt(best);
    }
    return sum / pm.size();
}

} // namespace glr

#endif // GLR_PATCH_DISTANCE_HPP
