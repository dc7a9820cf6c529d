#ifndef GLR_CORE_HPP
#define GLR_CORE_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "glr/spatial.hpp"
#include "glr/types.hpp"

namespace glr {

/// Picks ceil(fraction * N) patch centers by farthest point sampling so the
/// selection is spatially uniform. Deterministic: the walk starts at index 0.
inline std::vector<int> select_patch_centers(const PointCloud& cloud, double fraction,
                                             CenterSeed seed = CenterSeed::FirstPoint) {
    cloud.validate();
    if (!(fraction > 0.0) || fraction > 1.0)
        throw std::invalid_argument("center fraction must be in (0,1]");
    (void)seed; // single strategy today; parameter pins the contract
    int count = static_cast<int>(std::ceil(fraction * cloud.size()));
    count = std::clamp(count, 1, cloud.size());
    return farthest_point_sample(cloud.points, count, 0);
}

/// Extracts the k-nearest-neighbor patch around `center_index`, translated so
/// the center sits at the origin. The center always belongs to its own patch,
/// even if other points coincide with it.
inline Patch extract_patch(const PointCloud& cloud, const KdTree& index,
                           int center_index, int k) {
    if (k < 1) throw std::invalid_argument("patch size must be positive");
    if (k > cloud.size()) throw std::invalid_argument("patch larger than cloud");
    if (center_index < 0 || center_index >= cloud.size())
        throw std::invalid_argument("center index out of range");

    const Vec3& center = cloud.points[center_index];
    auto neighbors = index.knn(center, k);
    bool has_center = false;
    for (const auto& [idx, dist] : neighbors)
        if (idx == center_index) { has_center = true; break; }
    if (!has_center) {
        // only possible when coincident lower-index points fill every slot
        neighbors.back() = {center_index, 0.0};
        std::sort(neighbors.begin(), neighbors.end(), [](const auto& a, const auto& b) {
            return a.second < b.second || (a.second == b.second && a.first < b.first);
        });
    }

    Patch patch;
    patch.center_index = center_index;
    patch.member_indices.reserve(static_cast<std::size_t>(k));
    patch.translated.reserve(static_cast<std::size_t>(k));
    for (const auto& [idx, dist] : neighbors) {
        patch.member_indices.push_back(idx);
        patch.translated.push_back(idx == center_index ? Vec3::Zero().eval()
                                                       : (cloud.points[idx] - center).eval());
    }
    return patch;
}

inline Patch extract_patch(const PointCloud& cloud, int center_index, int k) {
    KdTree index(cloud.points);
    return extract_patch(cloud, index, center_index, k);
}

/// Guarantees every point belongs to at least one patch: walks the uncovered
/// indices in ascending order and adds a patch centered at each index that is
/// still uncovered. Idempotent when coverage already holds.
inline std::vector<Patch> ensure_coverage(const PointCloud& cloud, const KdTree& index,
                                          std::vector<Patch> patches, int k) {
    std::vector<char> covered(static_cast<std::size_t>(cloud.size()), 0);
    for (const Patch& p : patches)
        for (int idx : p.member_indices) covered[static_cast<std::size_t>(idx)] = 1;
    for (int i = 0; i < cloud.size(); ++i) {
        if (covered[static_cast<std::size_t>(i)]) continue;
        Patch extra = extract_patch(cloud, index, i, k);
        for (int idx : extra.member_indices) covered[static_cast<std::size_t>(idx)] = 1;
        patches.push_back(std::move(extra));
    }
    return patches;
}

} // namespace glr

#endif // GLR_CORE_HPP
