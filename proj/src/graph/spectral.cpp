#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/graph.hpp"
#include "gak/rng.hpp"

namespace gak::graph {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> view(const DenseMatrix& A) {
    return {A.data(), static_cast<Index>(A.rows()), static_cast<Index>(A.cols())};
}

VectorXd degrees(const DenseMatrix& W) {
    VectorXd d = view(W).rowwise().sum();
    d.array() += kDegreeFloor;
    return d;
}

std::vector<double> to_std(const VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Normalized operator M = D^-1/2 W D^-1/2 and its trivial top eigenvector.
struct NormalizedOp {
    MatrixXd M;
    VectorXd q0;
};

NormalizedOp normalized(const DenseMatrix& W) {
    const VectorXd s = degrees(W).cwiseSqrt().cwiseInverse();
    NormalizedOp op;
    op.M = s.asDiagonal() * view(W) * s.asDiagonal();
    op.M = 0.5 * (op.M + op.M.transpose());
    op.q0 = s.cwiseInverse();
    op.q0.normalize();
    return op;
}

VectorXd fiedler_dense(const NormalizedOp& op) {
    // Shift the trivial direction to the bottom of the spectrum of M; the
    // largest eigenvector is then orthogonal to q0 even when the graph is
    // disconnected and the eigenvalue 1 is repeated.
    const MatrixXd A = op.M - 3.0 * op.q0 * op.q0.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("fiedler_vector: dense eigensolver failed");
    return es.eigenvectors().col(A.rows() - 1);
}

// Lanczos with full reorthogonalization on M restricted to the complement of
// q0, with explicit restarts from the current Ritz vector.
VectorXd fiedler_lanczos(const NormalizedOp& op) {
    const Index n = op.M.rows();
    const Index kmax = std::min<Index>(n - 1, 160);
    constexpr int kMaxRestarts = 40;
    constexpr double kTol = 1e-11;

    auto deflate = [&](VectorXd& v) { v -= op.q0 * op.q0.dot(v); };

    SeededRng rng = SeededRng::derive(0x4c414e43, static_cast<std::uint64_t>(n));
    VectorXd start(n);
    for (Index i = 0; i < n; ++i) start[i] = rng.uniform(-1.0, 1.0);

    std::size_t iterations = 0;
    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        deflate(start);
        deflate(start);
        const double sn = start.norm();
        if (sn == 0.0) throw NumericalError("fiedler_vector: Lanczos start vector collapsed", iterations);
        MatrixXd V(n, kmax + 1);
        V.col(0) = start / sn;
        VectorXd alpha(kmax), beta(kmax);
        Index k = 0;
        VectorXd ritz;
        bool converged = false;
        for (; k < kmax; ++k) {
            ++iterations;
            VectorXd w = op.M * V.col(k);
            alpha[k] = V.col(k).dot(w);
            for (int pass = 0; pass < 2; ++pass) {
                w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
                deflate(w);
            }
            beta[k] = w.norm();
            const bool breakdown = beta[k] <= 1e-14;
            if (breakdown || (k + 1) % 5 == 0 || k + 1 == kmax) {
                const Index m = k + 1;
                MatrixXd T = MatrixXd::Zero(m, m);
                for (Index i = 0; i < m; ++i) {
                    T(i, i) = alpha[i];
                    if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
                }
                Eigen::SelfAdjointEigenSolver<MatrixXd> es(T);
                if (es.info() != Eigen::Success)
                    throw NumericalError("fiedler_vector: tridiagonal eigensolver failed", iterations);
                const VectorXd s = es.eigenvectors().col(m - 1);
                const double resid = std::abs(beta[k] * s[m - 1]);
                ritz = V.leftCols(m) * s;
                if (breakdown || resid <= kTol) {
                    converged = true;
                    break;
                }
            }
            V.col(k + 1) = w / beta[k];
        }
        if (converged) return ritz.normalized();
        start = ritz;
    }
    throw NumericalError("fiedler_vector: Lanczos did not converge after " + std::to_string(iterations) +
                             " iterations",
                         iterations);
}

}  // namespace

void fix_sign(std::vector<double>& v) {
    double mx = 0.0;
    for (double x : v) mx = std::max(mx, std::abs(x));
    for (double x : v) {
        if (std::abs(x) > 1e-10 * mx) {
            if (x < 0.0)
                for (double& y : v) y = -y;
            return;
        }
    }
}

DenseMatrix sym_laplacian(const AffinityMatrix& W) {
    const std::size_t n = W.size();
    const VectorXd d = degrees(W.matrix());
    DenseMatrix L(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double m = W(i, j) / std::sqrt(d[static_cast<Index>(i)] * d[static_cast<Index>(j)]);
            L(i, j) = (i == j ? 1.0 : 0.0) - m;
        }
    return L;
}

std::vector<double> fiedler_vector(const AffinityMatrix& W, EigenMethod method) {
    const std::size_t n = W.size();
    if (n < 2) throw InvalidArgument("fiedler_vector: need at least 2 nodes");
    const NormalizedOp op = normalized(W.matrix());
    if (method == EigenMethod::automatic)
        method = n <= kDenseEigenLimit ? EigenMethod::dense : EigenMethod::lanczos;
    if (n == 2) method = EigenMethod::dense;
    std::vector<double> v = to_std(method == EigenMethod::dense ? fiedler_dense(op) : fiedler_lanczos(op));
    fix_sign(v);
    return v;
}

std::vector<double> landmark_fiedler(const DenseMatrix& W_cross, std::span<const std::size_t> landmarks) {
    const std::size_t n = W_cross.rows(), m = W_cross.cols();
    if (m < 2) throw InvalidArgument("landmark_fiedler: need at least 2 landmarks");
    if (landmarks.size() != m) throw DimensionError("landmark_fiedler: landmark count != W_cross columns");
    for (std::size_t l : landmarks)
        if (l >= n) throw DimensionError("landmark_fiedler: landmark index out of range");

    const auto C = view(W_cross);
    VectorXd d = C.rowwise().sum() * (static_cast<double>(n) / static_cast<double>(m));
    for (Index i = 0; i < d.size(); ++i) {
        if (!(d[i] > 0.0)) throw InvalidArgument("landmark_fiedler: row with zero affinity sum");
        d[i] += kDegreeFloor;
    }
    const VectorXd s = d.cwiseSqrt().cwiseInverse();
    VectorXd sl(static_cast<Index>(m));
    for (std::size_t l = 0; l < m; ++l) sl[static_cast<Index>(l)] = s[static_cast<Index>(landmarks[l])];
    const MatrixXd Mc = s.asDiagonal() * C * sl.asDiagonal();

    MatrixXd Mll(static_cast<Index>(m), static_cast<Index>(m));
    for (std::size_t a = 0; a < m; ++a) Mll.row(static_cast<Index>(a)) = Mc.row(static_cast<Index>(landmarks[a]));
    Mll = 0.5 * (Mll + Mll.transpose());
    const VectorXd q0 = sl.cwiseInverse().normalized();
    const MatrixXd A = Mll - 3.0 * q0 * q0.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
    if (es.info() != Eigen::Success) throw NumericalError("landmark_fiedler: eigensolver failed");
    const double mu = es.eigenvalues()[static_cast<Index>(m) - 1];
    const double top = std::max(1.0, std::abs(es.eigenvalues()[0]));
    if (!(std::abs(mu) > 1e-12 * top)) throw NumericalError("landmark_fiedler: rank-deficient landmark block");
    VectorXd u = Mc * es.eigenvectors().col(static_cast<Index>(m) - 1) / mu;
    const VectorXd q_full = s.cwiseInverse().normalized();
    u -= q_full * q_full.dot(u);
    const double un = u.norm();
    if (!(un > 0.0)) throw NumericalError("landmark_fiedler: extension vanished");
    std::vector<double> v = to_std(u / un);
    fix_sign(v);
    return v;
}

EmbeddingCoords diffusion_embedding(const AffinityMatrix& W, std::size_t d) {
    const std::size_t n = W.size();
    if (d < 1 || d >= n) throw InvalidArgument("diffusion_embedding: need 1 <= d < n");
    const NormalizedOp op = normalized(W.matrix());
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(op.M);
    if (es.info() != Eigen::Success) throw NumericalError("diffusion_embedding: eigensolver failed");
    const VectorXd s = degrees(W.matrix()).cwiseSqrt().cwiseInverse();
    EmbeddingCoords out{DenseMatrix(n, d), {}};
    for (std::size_t c = 0; c < d; ++c) {
        const Index col = static_cast<Index>(n) - 2 - static_cast<Index>(c);
        const double lam = es.eigenvalues()[col];
        std::vector<double> psi = to_std(s.cwiseProduct(es.eigenvectors().col(col)));
        fix_sign(psi);
        for (std::size_t i = 0; i < n; ++i) out.coords(i, c) = lam * psi[i];
        out.eigenvalues.push_back(lam);
    }
    return out;
}

}  // namespace gak::graph
