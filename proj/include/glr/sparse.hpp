#ifndef GLR_SPARSE_HPP
#define GLR_SPARSE_HPP

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace glr {

struct SparseTriplet {
    int row = 0;
    int col = 0;
    double value = 0;
};

/// Symmetric sparse matrix stored as the sorted upper triangle (row <= col).
/// Duplicate coordinates passed to from_triplets are accumulated in sorted
/// input order, so sums are bit-reproducible across runs and thread counts.
class SparseSymmetricMatrix {
public:
    SparseSymmetricMatrix() = default;

    explicit SparseSymmetricMatrix(int dimension) : dim_(dimension) {
        if (dimension < 0) throw std::invalid_argument("negative dimension");
    }

    static SparseSymmetricMatrix from_triplets(int dimension,
                                               std::vector<SparseTriplet> triplets) {
        SparseSymmetricMatrix m(dimension);
        for (const SparseTriplet& t : triplets) {
            if (t.row < 0 || t.col < 0 || t.row >= dimension || t.col >= dimension)
                throw std::invalid_argument("triplet index out of range");
            if (t.row > t.col)
                throw std::invalid_argument("triplet below the diagonal");
        }
        std::stable_sort(triplets.begin(), triplets.end(),
                         [](const SparseTriplet& a, const SparseTriplet& b) {
                             return a.row < b.row || (a.row == b.row && a.col < b.col);
                         });
        m.upper_.reserve(triplets.size());
        for (const SparseTriplet& t : triplets) {
            if (!m.upper_.empty() && m.upper_.back().row == t.row &&
                m.upper_.back().col == t.col) {
                m.upper_.back().value += t.value;
            } else {
                m.upper_.push_back(t);
            }
        }
        return m;
    }

    int dimension() const { return dim_; }
    std::size_t stored_entries() const { return upper_.size(); }
    std::span<const SparseTriplet> entries() const { return upper_; }

    /// y = A x (full symmetric product).
    void multiply(std::span<const double> x, std::span<double> y) const {
        if (static_cast<int>(x.size()) != dim_ || static_cast<int>(y.size()) != dim_)
            throw std::invalid_argument("dimension mismatch");
        std::fill(y.begin(), y.end(), 0.0);
        for (const SparseTriplet& t : upper_) {
            y[static_cast<std::size_t>(t.row)] += t.value * x[static_cast<std::size_t>(t.col)];
            if (t.col != t.row)
                y[static_cast<std::size_t>(t.col)] += t.value * x[static_cast<std::size_t>(t.row)];
        }
    }

    std::vector<double> multiply(const std::vector<double>& x) const {
        std::vector<double> y(x.size());
        multiply(x, y);
        return y;
    }

    std::vector<double> diagonal() const {
        std::vector<double> d(static_cast<std::size_t>(dim_), 0.0);
        for (const SparseTriplet& t : upper_)
            if (t.row == t.col) d[static_cast<std::size_t>(t.row)] += t.value;
        return d;
    }

    std::vector<double> row_sums() const {
        std::vector<double> sums(static_cast<std::size_t>(dim_), 0.0);
        for (const SparseTriplet& t : upper_) {
            sums[static_cast<std::size_t>(t.row)] += t.value;
            if (t.col != t.row) sums[static_cast<std::size_t>(t.col)] += t.value;
        }
        return sums;
    }

    /// max_i sum_{j != i} |A_ij|: the largest Gershgorin disc radius, which
    /// for a combinatorial Laplacian equals the maximum weighted degree.
    double max_weighted_degree() const {
        std::vector<double> radius(static_cast<std::size_t>(dim_), 0.0);
        for (const SparseTriplet& t : upper_) {
            if (t.col == t.row) continue;
            radius[static_cast<std::size_t>(t.row)] += std::abs(t.value);
            radius[static_cast<std::size_t>(t.col)] += std::abs(t.value);
        }
        double best = 0;
        for (double r : radius) best = std::max(best, r);
        return best;
    }

    Eigen::MatrixXd to_dense() const {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const SparseTriplet& t : upper_) {
            m(t.row, t.col) += t.value;
            if (t.col != t.row) m(t.col, t.row) += t.value;
        }
        return m;
    }

private:
    int dim_ = 0;
    std::vector<SparseTriplet> upper_;
};

} // namespace glr

#endif // GLR_SPARSE_HPP
