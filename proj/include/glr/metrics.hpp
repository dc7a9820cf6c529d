#ifndef GLR_METRICS_HPP
#define GLR_METRICS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

#include "glr/spatial.hpp"
#include "glr/types.hpp"

namespace glr {

/// Standard-normal generator with a fully pinned algorithm: 64-bit Mersenne
/// Twister driving a Box-Muller transform. Unlike std::normal_distribution,
/// every step is specified by the standard, so the stream is identical on
/// every platform for a given seed.
class PortableNormal {
public:
    explicit PortableNormal(std::uint64_t seed) : rng_(seed) {}

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 1.0 - uniform();      // (0, 1], keeps the log finite
        double u2 = uniform();
        double radius = std::sqrt(-2.0 * std::log(u1));
        double angle = 2.0 * kPi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    static constexpr double kPi = 3.141592653589793238462643383279502884;

    double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0;
};

/// Adds i.i.d. zero-mean Gaussian noise per coordinate with standard
/// deviation sigma_level times the estimated cloud diameter.
inline PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma_level,
                                     std::uint64_t seed) {
    cloud.validate();
    if (sigma_level < 0) throw std::invalid_argument("sigma_level must be >= 0");
    if (sigma_level == 0) return cloud;
    double std_dev = sigma_level * estimate_diameter(cloud);
    PortableNormal normal(seed);
    PointCloud noisy = cloud;
    for (Vec3& p : noisy.points)
        for (int axis = 0; axis < 3; ++axis) p[axis] += std_dev * normal();
    return noisy;
}

struct MetricsResult {
    double mse = 0;
    double snr_db = 0;
    double mcd = 0;
};

/// Two-sided mean squared nearest-neighbor distance. Cloud sizes may differ.
inline double mse(const PointCloud& truth, const PointCloud& estimate) {
    truth.validate();
    estimate.validate();
    KdTree truth_tree(truth.points);
    KdTree estimate_tree(estimate.points);
    double to_estimate = 0;
    for (const Vec3& u : truth.points) {
        double d = estimate_tree.nearest(u).second;
        to_estimate += d * d;
    }
    double to_truth = 0;
    for (const Vec3& v : estimate.points) {
        double d = truth_tree.nearest(v).second;
        to_truth += d * d;
    }
    return to_estimate / (2.0 * truth.size()) + to_truth / (2.0 * estimate.size());
}

/// Signal-to-noise ratio in dB: mean squared point norm of the estimate over
/// the two-sided MSE. +infinity when the clouds coincide; -infinity when an
/// all-zero estimate meets a nonzero error.
inline double snr(const PointCloud& truth, const PointCloud& estimate) {
    double error = mse(truth, estimate);
    if (error == 0) return std::numeric_limits<double>::infinity();
    double power = 0;
    for (const Vec3& v : estimate.points) power += v.squaredNorm();
    power /= estimate.size();
    if (power == 0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(power / error);
}

/// Two-sided mean city-block distance; the nearest neighbor is chosen under
/// the l1 metric itself for internal consistency.
inline double mcd(const PointCloud& truth, const PointCloud& estimate) {
    truth.validate();
    estimate.validate();
    KdTree truth_tree(truth.points);
    KdTree estimate_tree(estimate.points);
    double to_estimate = 0;
    for (const Vec3& u : truth.points) to_estimate += estimate_tree.nearest_l1(u).second;
    double to_truth = 0;
    for (const Vec3& v : estimate.points) to_truth += truth_tree.nearest_l1(v).second;
    return to_estimate / (2.0 * truth.size()) + to_truth / (2.0 * estimate.size());
}

inline MetricsResult evaluate(const PointCloud& truth, const PointCloud& estimate) {
    return {mse(truth, estimate), snr(truth, estimate), mcd(truth, estimate)};
}

} // namespace glr

#endif // GLR_METRICS_HPP
