#include <cmath>

#include "gak/pairwise.hpp"

namespace gak::ref {

void matvec(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y) {
    for (std::size_t i = 0; i < rows; ++i) {
        const double* a = A + i * cols;
        double s = 0.0;
        for (std::size_t j = 0; j < cols; ++j) s += a[j] * x[j];
        y[i] = s;
    }
}

DenseMatrix pairwise_weighted_l1(const DenseMatrix& F, std::span<const double> w) {
    const std::size_t m = F.rows(), n = F.cols();
    DenseMatrix D(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* fi = F.data() + i * n;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* fj = F.data() + j * n;
            double s = 0.0;
            for (std::size_t c = 0; c < n; ++c) s += w[c] * std::abs(fi[c] - fj[c]);
            D(i, j) = s;
            D(j, i) = s;
        }
    }
    return D;
}

DenseMatrix pairwise_segment_l2(const DenseMatrix& F, std::span<const Segment> segs) {
    const std::size_t m = F.rows(), n = F.cols();
    DenseMatrix D(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* fi = F.data() + i * n;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double* fj = F.data() + j * n;
            double s = 0.0;
            for (const Segment& g : segs) {
                double q = 0.0;
                for (std::size_t c = g.start; c < g.start + g.len; ++c) {
                    const double d = fi[c] - fj[c];
                    q += d * d;
                }
                s += g.weight * std::sqrt(q);
            }
            D(i, j) = s;
            D(j, i) = s;
        }
    }
    return D;
}

DenseMatrix pairwise_segment_abs_dot(const DenseMatrix& Z, std::span<const Segment> segs) {
    const std::size_t m = Z.rows(), n = Z.cols();
    DenseMatrix S(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        const double* zi = Z.data() + i * n;
        for (std::size_t j = i; j < m; ++j) {
            const double* zj = Z.data() + j * n;
            double s = 0.0;
            for (const Segment& g : segs) {
                double q = 0.0;
                for (std::size_t c = g.start; c < g.start + g.len; ++c) q += zi[c] * zj[c];
                s += g.weight * std::abs(q);
            }
            S(i, j) = s;
            S(j, i) = s;
        }
    }
    return S;
}

}  // namespace gak::ref
