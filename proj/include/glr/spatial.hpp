#ifndef GLR_SPATIAL_HPP
#define GLR_SPATIAL_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "glr/types.hpp"

namespace glr {

/// Exact k-nearest-neighbor index over a fixed point set.
///
/// Queries return exactly the brute-force answer: neighbors sorted by
/// ascending Euclidean distance, ties broken by ascending point index.
/// The tree is immutable after construction; concurrent reads are safe.
class KdTree {
public:
    explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
        if (points_.empty()) throw std::invalid_argument("empty input");
        order_.resize(points_.size());
        std::iota(order_.begin(), order_.end(), 0);
        nodes_.reserve(2 * points_.size() / kLeafSize + 2);
        root_ = build(0, static_cast<int>(points_.size()));
    }

    int size() const { return static_cast<int>(points_.size()); }

    /// k nearest neighbors of `query` as (point index, Euclidean distance).
    std::vector<std::pair<int, double>> knn(const Vec3& query, int k) const {
        if (k < 1 || k > size())
            throw std::invalid_argument("knn: k out of range");
        std::priority_queue<Cand, std::vector<Cand>, CandLess> heap;
        search_l2(root_, query, k, heap);
        std::vector<std::pair<int, double>> out(heap.size());
        for (auto it = out.rbegin(); it != out.rend(); ++it) {
            Cand c = heap.top();
            heap.pop();
            *it = {c.idx, std::sqrt(c.d2)};
        }
        return out;
    }

    std::pair<int, double> nearest(const Vec3& query) const {
        return knn(query, 1).front();
    }

    /// Nearest neighbor under the city-block (l1) metric. Same tie rule.
    std::pair<int, double> nearest_l1(const Vec3& query) const {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        search_l1(root_, query, best, best_d);
        return {best, best_d};
    }

private:
    static constexpr int kLeafSize = 16;

    struct Node {
        int begin = 0, end = 0;       // leaf: range into order_
        int left = -1, right = -1;    // internal: child node ids
        int axis = -1;
        double split = 0;
        bool leaf() const { return left < 0; }
    };

    struct Cand {
        double d2;
        int idx;
    };
    // priority_queue top() = worst candidate: larger distance, then larger index
    struct CandLess {
        bool operator()(const Cand& a, const Cand& b) const {
            return a.d2 < b.d2 || (a.d2 == b.d2 && a.idx < b.idx);
        }
    };

    int build(int begin, int end) {
        Node node;
        node.begin = begin;
        node.end = end;
        if (end - begin <= kLeafSize) {
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }
        // split on the axis of largest extent at the median point
        Vec3 lo = points_[order_[begin]], hi = lo;
        for (int i = begin + 1; i < end; ++i) {
            lo = lo.cwiseMin(points_[order_[i]]);
            hi = hi.cwiseMax(points_[order_[i]]);
        }
        Vec3 extent = hi - lo;
        int axis = 0;
        if (extent[1] > extent[axis]) axis = 1;
        if (extent[2] > extent[axis]) axis = 2;
        int mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid,
                         order_.begin() + end, [&](int a, int b) {
                             double ca = points_[a][axis], cb = points_[b][axis];
                             return ca < cb || (ca == cb && a < b);
                         });
        node.axis = axis;
        node.split = points_[order_[mid]][axis];
        int self = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        int left = build(begin, mid);
        int right = build(mid, end);
        nodes_[self].left = left;
        nodes_[self].right = right;
        return self;
    }

    void consider(const Vec3& query, int idx, int k,
                  std::priority_queue<Cand, std::vector<Cand>, CandLess>& heap) const {
        double d2 = (points_[idx] - query).squaredNorm();
        Cand c{d2, idx};
        if (static_cast<int>(heap.size()) < k) {
            heap.push(c);
        } else if (CandLess{}(c, heap.top())) {
            heap.pop();
            heap.push(c);
        }
    }

    void search_l2(int node_id, const Vec3& query, int k,
                   std::priority_queue<Cand, std::vector<Cand>, CandLess>& heap) const {
        const Node& node = nodes_[node_id];
        if (node.leaf()) {
            for (int i = node.begin; i < node.end; ++i)
                consider(query, order_[i], k, heap);
            return;
        }
        double diff = query[node.axis] - node.split;
        int near = diff < 0 ? node.left : node.right;
        int far = diff < 0 ? node.right : node.left;
        search_l2(near, query, k, heap);
        // the far side may still hold an equal-distance, lower-index point,
        // so prune only on a strictly larger bound
        if (static_cast<int>(heap.size()) < k || diff * diff <= heap.top().d2)
            search_l2(far, query, k, heap);
    }

    void search_l1(int node_id, const Vec3& query, int& best, double& best_d) const {
        const Node& node = nodes_[node_id];
        if (node.leaf()) {
            for (int i = node.begin; i < node.end; ++i) {
                int idx = order_[i];
                double d = (points_[idx] - query).cwiseAbs().sum();
                if (d < best_d || (d == best_d && idx < best)) {
                    best_d = d;
                    best = idx;
                }
            }
            return;
        }
        double diff = query[node.axis] - node.split;
        int near = diff < 0 ? node.left : node.right;
        int far = diff < 0 ? node.right : node.left;
        search_l1(near, query, best, best_d);
        if (std::abs(diff) <= best_d) search_l1(far, query, best, best_d);
    }

    const std::vector<Vec3> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = 0;
};

/// Greedy max-min subset selection. The first element is `start`; every
/// following element maximizes its minimum distance to the already-selected
/// set, with ties going to the lower index.
inline std::vector<int> farthest_point_sample(const std::vector<Vec3>& points,
                                              int count, int start) {
    int n = static_cast<int>(points.size());
    if (n == 0) throw std::invalid_argument("empty input");
    if (count < 1 || count > n)
        throw std::invalid_argument("farthest_point_sample: count out of range");
    if (start < 0 || start >= n)
        throw std::invalid_argument("farthest_point_sample: start out of range");

    std::vector<int> selected;
    selected.reserve(static_cast<std::size_t>(count));
    selected.push_back(start);
    std::vector<double> min_d2(n);
    for (int i = 0; i < n; ++i)
        min_d2[i] = (points[i] - points[start]).squaredNorm();
    while (static_cast<int>(selected.size()) < count) {
        int next = 0;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (min_d2[i] > best) {   // strict > keeps the lowest index on ties
                best = min_d2[i];
                next = i;
            }
        }
        selected.push_back(next);
        for (int i = 0; i < n; ++i)
            min_d2[i] = std::min(min_d2[i], (points[i] - points[next]).squaredNorm());
    }
    return selected;
}

/// Diameter estimate: the maximum pairwise distance among (up to) 200 points
/// chosen by farthest point sampling. Exact when the cloud has at most 200
/// points, otherwise a lower bound on the true diameter.
inline double estimate_diameter(const PointCloud& cloud) {
    cloud.validate();
    int n = cloud.size();
    if (n == 1) return 0.0;
    auto sample = farthest_point_sample(cloud.points, std::min(n, 200), 0);
    double best = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i)
        for (std::size_t j = i + 1; j < sample.size(); ++j)
            best = std::max(best,
                            (cloud.points[sample[i]] - cloud.points[sample[j]]).squaredNorm());
    return std::sqrt(best);
}

} // namespace glr

#endif // GLR_SPATIAL_HPP
