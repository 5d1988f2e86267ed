#pragma once

// Hot all-pairs loops. gak::par holds the OpenMP versions used by the
// library; gak::ref holds plain serial loops kept as test oracles and as the
// baseline in bench/. Both evaluate each pair in the same order, so results
// agree bit for bit.

#include <cstddef>
#include <span>

#include "gak/dense_matrix.hpp"

namespace gak {

// Contiguous column range of a row-major matrix with a weight.
struct Segment {
    std::size_t start = 0;
    std::size_t len = 0;
    double weight = 1.0;
};

namespace par {

void matvec(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
// D[i][j] = sum_c w[c] |F[i][c] - F[j][c]|
DenseMatrix pairwise_weighted_l1(const DenseMatrix& F, std::span<const double> w);
// D[i][j] = sum_s weight_s * ||F[i][s] - F[j][s]||_2
DenseMatrix pairwise_segment_l2(const DenseMatrix& F, std::span<const Segment> segs);
// S[i][j] = sum_s weight_s * |<Z[i][s], Z[j][s]>|
DenseMatrix pairwise_segment_abs_dot(const DenseMatrix& Z, std::span<const Segment> segs);

}  // namespace par

namespace ref {

void matvec(const double* A, std::size_t rows, std::size_t cols, const double* x, double* y);
DenseMatrix pairwise_weighted_l1(const DenseMatrix& F, std::span<const double> w);
DenseMatrix pairwise_segment_l2(const DenseMatrix& F, std::span<const Segment> segs);
DenseMatrix pairwise_segment_abs_dot(const DenseMatrix& Z, std::span<const Segment> segs);

}  // namespace ref

}  // namespace gak
