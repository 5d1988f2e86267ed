#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "gak/butterfly.hpp"
#include "gak/error.hpp"
#include "gak/kernels.hpp"
#include "gak/rng.hpp"

using namespace gak;

namespace {

Eigen::MatrixXd to_eigen(const DenseMatrix& A) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(A.rows()), static_cast<Eigen::Index>(A.cols()));
    for (std::size_t i = 0; i < A.rows(); ++i)
        for (std::size_t j = 0; j < A.cols(); ++j) M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = A(i, j);
    return M;
}

// U diag(sigma) V^T with random orthonormal U, V.
DenseMatrix planted(std::size_t m, std::size_t n, const std::vector<double>& sigma, SeededRng& rng) {
    const auto k = static_cast<Eigen::Index>(sigma.size());
    Eigen::MatrixXd G(static_cast<Eigen::Index>(m), k), H(static_cast<Eigen::Index>(n), k);
    for (Eigen::Index i = 0; i < G.size(); ++i) G.data()[i] = rng.normal();
    for (Eigen::Index i = 0; i < H.size(); ++i) H.data()[i] = rng.normal();
    const Eigen::MatrixXd U = Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ() * Eigen::MatrixXd::Identity(G.rows(), k);
    const Eigen::MatrixXd V = Eigen::HouseholderQR<Eigen::MatrixXd>(H).householderQ() * Eigen::MatrixXd::Identity(H.rows(), k);
    Eigen::VectorXd s(k);
    for (Eigen::Index i = 0; i < k; ++i) s[i] = sigma[static_cast<std::size_t>(i)];
    const Eigen::MatrixXd A = U * s.asDiagonal() * V.transpose();
    DenseMatrix out(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return out;
}

double rel_err(const std::vector<double>& a, const std::vector<double>& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (a[i] - b[i]) * (a[i] - b[i]);
        den += b[i] * b[i];
    }
    return std::sqrt(num / den);
}

}  // namespace

TEST_CASE("ID of an exactly low-rank matrix") {
    SeededRng rng(51);
    std::vector<double> sigma{5, 4, 3, 2, 1};
    const DenseMatrix A = planted(40, 30, sigma, rng);
    const InterpDecomp id = interpolative_decomposition(A, 1e-10);
    CHECK(id.rank() == 5);
    const Eigen::MatrixXd E = to_eigen(A);
    Eigen::MatrixXd S(40, 5);
    for (Eigen::Index c = 0; c < 5; ++c) S.col(c) = E.col(static_cast<Eigen::Index>(id.skeleton_cols[static_cast<std::size_t>(c)]));
    CHECK((E - S * to_eigen(id.P)).norm() <= 1e-12 * E.norm());
    CHECK(to_eigen(id.P).cwiseAbs().maxCoeff() <= 2.0 + 1e-9);
    for (std::size_t c = 0; c < 5; ++c) CHECK(id.P(c, id.skeleton_cols[c]) == 1.0);
}

TEST_CASE("ID error bound with a decaying spectrum") {
    SeededRng rng(52);
    for (int t = 0; t < 20; ++t) {
        std::vector<double> sigma;
        for (int i = 0; i < 24; ++i) sigma.push_back(std::pow(10.0, -0.5 * i));
        const DenseMatrix A = planted(32, 24, sigma, rng);
        const InterpDecomp id = interpolative_decomposition(A, 1e-6);
        const std::size_t r = id.rank();
        REQUIRE(r < 24);
        const Eigen::MatrixXd E = to_eigen(A);
        Eigen::MatrixXd S(32, static_cast<Eigen::Index>(r));
        for (std::size_t c = 0; c < r; ++c) S.col(static_cast<Eigen::Index>(c)) = E.col(static_cast<Eigen::Index>(id.skeleton_cols[c]));
        const double err = Eigen::JacobiSVD<Eigen::MatrixXd>(E - S * to_eigen(id.P)).singularValues()[0];
        const double bound = std::sqrt(1.0 + 4.0 * static_cast<double>(r * (24 - r))) * sigma[r];
        CHECK(err <= bound);
    }
}

TEST_CASE("ID edge cases") {
    CHECK(interpolative_decomposition(DenseMatrix(3, 4), 1e-8).rank() == 0);
    const InterpDecomp full = interpolative_decomposition(DenseMatrix::identity(3), 1e-8);
    CHECK(full.rank() == 3);
    CHECK(full.P == DenseMatrix::identity(3));
    CHECK_THROWS_AS(interpolative_decomposition(DenseMatrix(2, 2), 0.0), InvalidArgument);
    CHECK_THROWS_AS(interpolative_decomposition(DenseMatrix(), 0.1), InvalidArgument);
}

TEST_CASE("butterfly on the sine kernel in natural order") {
    const KernelMatrix km = sine_kernel(256, 1);
    const DenseMatrix K = km.natural();
    const PartitionTree rt = PartitionTree::dyadic(K.rows()), ct = PartitionTree::dyadic(K.cols());
    const ButterflyFactorization F = butterfly_factor(K, rt, ct);
    CHECK(F.start_level == 4);
    SeededRng rng(53);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> f(K.cols());
        for (double& v : f) v = rng.uniform();
        CHECK(rel_err(F.apply(f), matvec(K, f)) <= 1e-8);
    }
    CHECK(F.storage().bytes() < 8 * K.size());
}

TEST_CASE("butterfly on shuffled trees stays accurate") {
    const KernelMatrix km = acoustic_kernel(96, 1.0, 2);
    SeededRng rng(54);
    const PartitionTree rt = PartitionTree::dyadic(Permutation::random(96, rng));
    const PartitionTree ct = PartitionTree::dyadic(Permutation::random(96, rng));
    ButterflyOptions o;
    o.block_cap = 8;
    const ButterflyFactorization F = butterfly_factor(km.K, rt, ct, o);
    std::vector<double> f(96);
    for (double& v : f) v = rng.normal();
    CHECK(rel_err(F.apply(f), matvec(km.K, f)) <= 1e-8);
}

TEST_CASE("butterfly save and load") {
    const KernelMatrix km = sine_kernel(64, 4);
    const ButterflyFactorization F =
        butterfly_factor(km.K, PartitionTree::dyadic(64), PartitionTree::dyadic(km.col_natural), {1e-9, 16});
    const auto dir = std::filesystem::temp_directory_path() / "gak_test_butterfly";
    std::filesystem::remove_all(dir);
    F.save(dir);
    const ButterflyFactorization G = ButterflyFactorization::load(dir);
    std::vector<double> f(128, 0.0);
    f[3] = 1.0;
    f[77] = -2.0;
    CHECK(G.apply(f) == F.apply(f));
    CHECK(G.storage().bytes() == F.storage().bytes());
    std::filesystem::remove(dir / "final.kmat");
    CHECK_THROWS_AS(ButterflyFactorization::load(dir), FormatError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("butterfly argument checks") {
    const DenseMatrix K(8, 8);
    CHECK_THROWS_AS(butterfly_factor(K, PartitionTree::dyadic(7), PartitionTree::dyadic(8)), DimensionError);
    CHECK_THROWS_AS(butterfly_factor(K, PartitionTree::dyadic(8), PartitionTree::dyadic(8), {1.5, 4}), InvalidArgument);
    const PartitionTree coarse({{{0, 1, 2, 3, 4, 5, 6, 7}, {}}});
    CHECK_THROWS_AS(butterfly_start_level(coarse, 4), InvalidArgument);
    const ButterflyFactorization F = butterfly_factor(DenseMatrix::identity(8), PartitionTree::dyadic(8), PartitionTree::dyadic(8), {1e-8, 2});
    CHECK_THROWS_AS(F.apply(std::vector<double>(7)), DimensionError);
}
