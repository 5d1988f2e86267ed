#pragma once

#include <cstddef>
#include <initializer_list>
#include <new>
#include <span>
#include <vector>

namespace gak {

// Fixed 64-byte alignment keeps vectorized reductions independent of where
// the heap happens to place a buffer, so results are reproducible run to run.
template <class T>
struct AlignedAllocator {
    using value_type = T;
    static constexpr std::align_val_t alignment{64};

    AlignedAllocator() noexcept = default;
    template <class U>
    AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

    T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
    void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

    template <class U>
    bool operator==(const AlignedAllocator<U>&) const noexcept {
        return true;
    }
};

using AlignedVector = std::vector<double, AlignedAllocator<double>>;

// Row-major matrix of doubles. Entries must stay finite; constructors that
// take data check this.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols);
    DenseMatrix(std::size_t rows, std::size_t cols, const std::vector<double>& data);
    DenseMatrix(std::size_t rows, std::size_t cols, AlignedVector data);
    DenseMatrix(std::size_t rows, std::size_t cols, std::initializer_list<double> data)
        : DenseMatrix(rows, cols, AlignedVector(data)) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
    std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }

    const double* data() const noexcept { return data_.data(); }
    double* data() noexcept { return data_.data(); }
    const AlignedVector& values() const noexcept { return data_; }

    bool all_finite() const noexcept;
    // Throws NumericalError naming `what` if any entry is NaN or Inf.
    void require_finite(const char* what) const;

    DenseMatrix transpose() const;
    DenseMatrix select(std::span<const std::size_t> row_idx, std::span<const std::size_t> col_idx) const;
    double frobenius_norm() const noexcept;

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    AlignedVector data_;
};

std::vector<double> matvec(const DenseMatrix& K, std::span<const double> f);

double norm2(std::span<const double> v) noexcept;

}  // namespace gak
