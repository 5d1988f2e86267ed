#include "gak/dense_matrix.hpp"

#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/pairwise.hpp"

namespace gak {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, const std::vector<double>& data)
    : DenseMatrix(rows, cols, AlignedVector(data.begin(), data.end())) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, AlignedVector data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
        throw DimensionError("DenseMatrix: data length " + std::to_string(data_.size()) +
                             " != " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    require_finite("DenseMatrix");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
    return I;
}

bool DenseMatrix::all_finite() const noexcept {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

void DenseMatrix::require_finite(const char* what) const {
    if (!all_finite()) throw NumericalError(std::string(what) + ": non-finite entry");
}

DenseMatrix DenseMatrix::transpose() const {
    DenseMatrix T(cols_, rows_);
    constexpr std::size_t B = 32;
    for (std::size_t i0 = 0; i0 < rows_; i0 += B)
        for (std::size_t j0 = 0; j0 < cols_; j0 += B)
            for (std::size_t i = i0; i < std::min(i0 + B, rows_); ++i)
                for (std::size_t j = j0; j < std::min(j0 + B, cols_); ++j) T(j, i) = (*this)(i, j);
    return T;
}

DenseMatrix DenseMatrix::select(std::span<const std::size_t> row_idx,
                                std::span<const std::size_t> col_idx) const {
    DenseMatrix out(row_idx.size(), col_idx.size());
    for (std::size_t i = 0; i < row_idx.size(); ++i) {
        if (row_idx[i] >= rows_) throw DimensionError("select: row index out of range");
        const double* src = data_.data() + row_idx[i] * cols_;
        double* dst = out.data() + i * col_idx.size();
        for (std::size_t j = 0; j < col_idx.size(); ++j) {
            if (col_idx[j] >= cols_) throw DimensionError("select: column index out of range");
            dst[j] = src[col_idx[j]];
        }
    }
    return out;
}

double DenseMatrix::frobenius_norm() const noexcept {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

std::vector<double> matvec(const DenseMatrix& K, std::span<const double> f) {
    if (f.size() != K.cols())
        throw DimensionError("matvec: vector length " + std::to_string(f.size()) + " != " +
                             std::to_string(K.cols()) + " columns");
    std::vector<double> y(K.rows());
    par::matvec(K.data(), K.rows(), K.cols(), f.data(), y.data());
    return y;
}

double norm2(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace gak
