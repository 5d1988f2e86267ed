#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "gak/butterfly.hpp"
#include "gak/error.hpp"

namespace gak {

namespace bf {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;

constexpr double kSwapBound = 4.0 * (1.0 + 1e-9);  // f^2 with f = 2
constexpr int kMaxSwaps = 128;

MatrixXd upper_r(const MatrixXd& qr, Index k, Index n) {
    MatrixXd R = qr.topRows(k).triangularView<Eigen::Upper>();
    return R.leftCols(n);
}

}  // namespace

InterpBlock interp_block(const double* a, std::size_t m_, std::size_t n_, double eps) {
    if (m_ == 0 || n_ == 0) throw InvalidArgument("interpolative_decomposition: empty matrix");
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("interpolative_decomposition: eps must lie in (0,1)");
    const Index m = static_cast<Index>(m_), n = static_cast<Index>(n_);
    const MatrixXd A = Eigen::Map<const MatrixXd>(a, m, n);
    const Index k = std::min(m, n);

    InterpBlock out;
    out.n_in = n_;

    Eigen::ColPivHouseholderQR<MatrixXd> qr(A);
    MatrixXd R = upper_r(qr.matrixQR(), k, n);
    std::vector<Index> piv(static_cast<std::size_t>(n));
    for (Index j = 0; j < n; ++j) piv[static_cast<std::size_t>(j)] = qr.colsPermutation().indices()[j];

    const double r00 = std::abs(R(0, 0));
    Index r = 0;
    if (r00 > 0.0) {
        r = k;
        for (Index i = 1; i < k; ++i)
            if (std::abs(R(i, i)) <= eps * r00) {
                r = i;
                break;
            }
    }
    if (r == n) {
        out.identity = true;
        return out;
    }

    MatrixXd T;
    for (int swaps = 0;; ++swaps) {
        if (r == 0) {
            T.resize(0, n);
            break;
        }
        const auto R11 = R.topLeftCorner(r, r).triangularView<Eigen::Upper>();
        T = R11.solve(R.block(0, r, r, n - r));
        const MatrixXd Rinv = R11.solve(MatrixXd::Identity(r, r));
        Eigen::VectorXd gamma = Eigen::VectorXd::Zero(n - r);
        if (k > r) gamma = R.block(r, r, k - r, n - r).colwise().norm().transpose();
        const Eigen::VectorXd rinv_norm = Rinv.rowwise().norm();

        double worst = 0.0;
        Index wi = 0, wj = 0;
        for (Index j = 0; j < n - r; ++j)
            for (Index i = 0; i < r; ++i) {
                const double g = gamma[j] * rinv_norm[i];
                const double v = T(i, j) * T(i, j) + g * g;
                if (v > worst) {
                    worst = v;
                    wi = i;
                    wj = j;
                }
            }
        if (worst <= kSwapBound || swaps >= kMaxSwaps) break;

        std::swap(piv[static_cast<std::size_t>(wi)], piv[static_cast<std::size_t>(r + wj)]);
        MatrixXd Ap(m, n);
        for (Index j = 0; j < n; ++j) Ap.col(j) = A.col(piv[static_cast<std::size_t>(j)]);
        Eigen::HouseholderQR<MatrixXd> hq(Ap);
        R = upper_r(hq.matrixQR(), k, n);
    }

    out.skel.resize(static_cast<std::size_t>(r));
    out.red.resize(static_cast<std::size_t>(n - r));
    for (Index i = 0; i < r; ++i) out.skel[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(piv[static_cast<std::size_t>(i)]);
    for (Index j = 0; j < n - r; ++j)
        out.red[static_cast<std::size_t>(j)] = static_cast<std::uint32_t>(piv[static_cast<std::size_t>(r + j)]);
    out.T.resize(static_cast<std::size_t>(r * (n - r)));
    for (Index i = 0; i < r; ++i)
        for (Index j = 0; j < n - r; ++j) out.T[static_cast<std::size_t>(i * (n - r) + j)] = T(i, j);
    return out;
}

void InterpBlock::apply(const double* x, double* y) const {
    if (identity) {
        std::copy(x, x + n_in, y);
        return;
    }
    const std::size_t r = skel.size(), nr = red.size();
    thread_local std::vector<double> xr;
    xr.resize(nr);
    for (std::size_t j = 0; j < nr; ++j) xr[j] = x[red[j]];
    for (std::size_t i = 0; i < r; ++i) {
        const double* t = T.data() + i * nr;
        double s = x[skel[i]];
        for (std::size_t j = 0; j < nr; ++j) s += t[j] * xr[j];
        y[i] = s;
    }
}

DenseMatrix InterpBlock::dense() const {
    const std::size_t r = rank();
    DenseMatrix P(r, n_in);
    if (identity) return DenseMatrix::identity(n_in);
    const std::size_t nr = red.size();
    for (std::size_t i = 0; i < r; ++i) {
        P(i, skel[i]) = 1.0;
        for (std::size_t j = 0; j < nr; ++j) P(i, red[j]) = T[i * nr + j];
    }
    return P;
}

StorageCount InterpBlock::storage() const noexcept {
    if (identity) return {};
    return {T.size(), skel.size() + red.size()};
}

}  // namespace bf

InterpDecomp interpolative_decomposition(const DenseMatrix& A, double eps) {
    if (A.rows() == 0 || A.cols() == 0) throw InvalidArgument("interpolative_decomposition: empty matrix");
    Eigen::MatrixXd colmajor(static_cast<Eigen::Index>(A.rows()), static_cast<Eigen::Index>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j)
            colmajor(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A(i, j);
    const bf::InterpBlock b = bf::interp_block(colmajor.data(), A.rows(), A.cols(), eps);
    InterpDecomp out;
    if (b.identity) {
        out.skeleton_cols.resize(A.cols());
        std::iota(out.skeleton_cols.begin(), out.skeleton_cols.end(), std::size_t{0});
    } else {
        out.skeleton_cols.assign(b.skel.begin(), b.skel.end());
    }
    out.P = b.dense();
    return out;
}

}  // namespace gak
