#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/graph.hpp"

namespace gak {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

AffinityMatrix::AffinityMatrix(DenseMatrix W) : W_(std::move(W)) {
    if (W_.rows() != W_.cols()) throw DimensionError("AffinityMatrix: matrix is not square");
    const std::size_t n = W_.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            const double a = W_(i, j), b = W_(j, i);
            if (!std::isfinite(a) || !std::isfinite(b)) throw NumericalError("AffinityMatrix: non-finite entry");
            if (a < 0.0 || b < 0.0) throw InvalidArgument("AffinityMatrix: negative entry");
            if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
                throw InvalidArgument("AffinityMatrix: not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
        }
    }
}

AffinityMatrix AffinityMatrix::restrict_to(std::span<const std::size_t> idx) const {
    AffinityMatrix out;
    out.W_ = W_.select(idx, idx);
    return out;
}

namespace graph {

double median_pairwise_distance(const DenseMatrix& points) {
    const std::size_t n = points.rows(), D = points.cols();
    if (n < 2) throw InvalidArgument("median_pairwise_distance: need at least 2 points");
    std::vector<double> d;
    d.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < D; ++c) {
                const double t = points(i, c) - points(j, c);
                s += t * t;
            }
            d.push_back(std::sqrt(s));
        }
    const std::size_t mid = d.size() / 2;
    std::nth_element(d.begin(), d.begin() + mid, d.end());
    const double upper = d[mid];
    if (d.size() % 2 == 1) return upper;
    const double lower = *std::max_element(d.begin(), d.begin() + mid);
    return 0.5 * (lower + upper);
}

AffinityMatrix gaussian_affinity(const DenseMatrix& points, Bandwidth bw) {
    const std::size_t n = points.rows(), D = points.cols();
    if (n < 2) throw InvalidArgument("gaussian_affinity: need at least 2 points");
    double sigma = bw.sigma;
    if (bw.use_median) {
        sigma = median_pairwise_distance(points);
        if (sigma == 0.0) throw NumericalError("gaussian_affinity: median pairwise distance is zero");
    } else if (!(sigma > 0.0)) {
        throw InvalidArgument("gaussian_affinity: sigma must be positive");
    }
    const double denom = 2.0 * sigma * sigma;
    DenseMatrix W(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        W(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            double s = 0.0;
            for (std::size_t c = 0; c < D; ++c) {
                const double t = points(i, c) - points(j, c);
                s += t * t;
            }
            const double w = std::exp(-s / denom);
            W(i, j) = w;
            W(j, i) = w;
        }
    }
    return AffinityMatrix(std::move(W));
}

AffinityMatrix cosine_affinity(const DenseMatrix& vectors) {
    const std::size_t m = vectors.rows(), n = vectors.cols();
    Eigen::Map<const RowMat> V(vectors.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    Eigen::VectorXd norms = V.colwise().norm().transpose();
    for (Eigen::Index j = 0; j < norms.size(); ++j)
        if (norms[j] == 0.0) throw InvalidArgument("cosine_affinity: zero vector at column " + std::to_string(j));
    const Eigen::MatrixXd U = V * norms.cwiseInverse().asDiagonal();
    const Eigen::MatrixXd G = U.transpose() * U;
    DenseMatrix W(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        W(i, i) = 1.0;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double g = std::min(1.0, std::abs(G(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))));
            W(i, j) = g;
            W(j, i) = g;
        }
    }
    return AffinityMatrix(std::move(W));
}

}  // namespace graph
}  // namespace gak
