#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "gak/error.hpp"
#include "gak/ghwt.hpp"
#include "gak/rng.hpp"

using namespace gak;

namespace {

std::vector<double> random_vec(std::size_t n, SeededRng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.normal();
    return v;
}

DenseMatrix random_mat(std::size_t r, std::size_t c, SeededRng& rng) {
    DenseMatrix M(r, c);
    for (std::size_t i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
    return M;
}

// Balanced tree with randomly chosen members at each split.
PartitionTree random_balanced_tree(std::size_t n, SeededRng& rng) {
    return PartitionTree::dyadic(Permutation::random(n, rng));
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

TEST_CASE("tiles: time-frequency rectangles") {
    const Tile t{2, 1, 3};
    CHECK(t.time_lo() == doctest::Approx(0.25));
    CHECK(t.time_hi() == doctest::Approx(0.5));
    CHECK(t.band_lo() == doctest::Approx(12.0));
    CHECK(t.band_hi() == doctest::Approx(16.0));
    CHECK(tiles_disjoint(Tile{1, 0, 0}, Tile{1, 1, 0}));
    CHECK_FALSE(tiles_disjoint(Tile{0, 0, 0}, Tile{1, 0, 0}));
    CHECK(tiles_disjoint(Tile{0, 0, 2}, Tile{1, 0, 0}));
}

TEST_CASE("walsh: functions and transforms") {
    const auto w3 = ghwt::walsh_function(3, 4);
    CHECK(w3 == std::vector<double>{1, -1, 1, -1});
    const auto w1 = ghwt::walsh_function(1, 4);
    CHECK(w1 == std::vector<double>{1, 1, -1, -1});
    CHECK_THROWS_AS(ghwt::walsh_function(4, 4), InvalidArgument);
    CHECK_THROWS_AS(ghwt::walsh_function(0, 6), InvalidArgument);

    SeededRng rng(3);
    const auto f = random_vec(64, rng);
    const auto c = ghwt::walsh_transform(f);
    for (std::size_t n = 0; n < 64; n += 7) {
        const auto w = ghwt::walsh_function(n, 64);
        CHECK(c[n] == doctest::Approx(dot(f, w) / 8.0).epsilon(1e-12));
    }
    const auto back = ghwt::fwht(ghwt::fwht(f));
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
}

TEST_CASE("ghwt layout: virtual completion of an odd-sized tree") {
    const ghwt::GhwtLayout G(PartitionTree::dyadic(5));
    CHECK(G.depth() == 3);
    CHECK(G.size(1, 0) == 3);
    CHECK(G.size(1, 1) == 2);
    CHECK(G.size(3, 0) == 1);
    CHECK(G.size(3, 3) == 0);
    const auto s = G.sizes_flat();
    const auto G2 = ghwt::GhwtLayout::from_sizes(G.order(), s);
    for (std::size_t l = 0; l <= 3; ++l)
        for (std::size_t k = 0; k < (std::size_t{1} << l); ++k) {
            CHECK(G2.start(l, k) == G.start(l, k));
            CHECK(G2.size(l, k) == G.size(l, k));
        }
    for (std::size_t pos = 0; pos < 5; ++pos) {
        const Tile t = G.tile_at(2, pos);
        CHECK(G.tile_exists(t));
        CHECK(G.position(t) == pos);
    }
}

TEST_CASE("ghwt: unbalanced trees are rejected") {
    std::vector<TreeNodeSpec> spec(5);
    spec[0] = {{0, 1, 2, 3}, {1, 2}};
    spec[1] = {{0}, {}};
    spec[2] = {{1, 2, 3}, {3, 4}};
    spec[3] = {{1}, {}};
    spec[4] = {{2, 3}, {}};
    CHECK_THROWS_AS(ghwt::GhwtLayout(PartitionTree(spec)), InvalidArgument);
}

TEST_CASE("ghwt: every level is an orthonormal basis") {
    SeededRng rng(11);
    for (std::size_t n : {7u, 12u, 16u}) {
        const ghwt::GhwtLayout G(random_balanced_tree(n, rng));
        for (std::size_t l = 0; l <= G.depth(); ++l) {
            std::vector<std::vector<double>> atoms;
            for (std::size_t p = 0; p < n; ++p) atoms.push_back(ghwt::atom(G, l, p));
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = 0; b < n; ++b)
                    CHECK(dot(atoms[a], atoms[b]) == doctest::Approx(a == b ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("ghwt: dyadic power-of-two tree reproduces restricted Walsh functions") {
    const ghwt::GhwtLayout G(PartitionTree::dyadic(8));
    for (std::size_t l = 0; l <= 3; ++l) {
        const std::size_t seg = 8 >> l;
        for (std::size_t k = 0; k < (std::size_t{1} << l); ++k)
            for (std::size_t n = 0; n < seg; ++n) {
                const auto a = ghwt::atom(G, l, G.start(l, k) + n);
                const auto w = ghwt::walsh_function(n, seg);
                for (std::size_t i = 0; i < 8; ++i) {
                    const bool inside = i >= k * seg && i < (k + 1) * seg;
                    const double expect = inside ? w[i - k * seg] / std::sqrt(static_cast<double>(seg)) : 0.0;
                    CHECK(a[i] == doctest::Approx(expect).epsilon(1e-12));
                }
            }
    }
}

TEST_CASE("ghwt: analysis and synthesis are inverse per level") {
    SeededRng rng(5);
    const PartitionTree T = random_balanced_tree(37, rng);
    const ghwt::GhwtLayout G(T);
    const auto f = random_vec(37, rng);
    const auto tab = ghwt::ghwt_analyze(f, G);
    for (std::size_t l = 0; l <= G.depth(); ++l) {
        std::vector<double> only(tab.c.size(), 0.0);
        std::copy(tab.level(l).begin(), tab.level(l).end(), only.begin() + static_cast<std::ptrdiff_t>(l * 37));
        const auto back = G.order().scatter(ghwt::synthesize_leaf(G, only));
        for (std::size_t i = 0; i < 37; ++i) CHECK(back[i] == doctest::Approx(f[i]).epsilon(1e-12));
    }
    const GhwtDictionary d = ghwt_analyze(f, T);
    CHECK(d.table.c == tab.c);
}

TEST_CASE("best basis: complete expansion reconstructs the matrix") {
    SeededRng rng(21);
    const DenseMatrix K = random_mat(11, 6, rng);
    const PartitionTree rt = random_balanced_tree(11, rng), ct = random_balanced_tree(6, rng);
    const BestBasis2D B = best_basis_2d(K, rt, ct);
    CHECK(B.tiling.size() == 66);
    CHECK(B.coefficient_norm() == doctest::Approx(K.frobenius_norm()).epsilon(1e-12));
    double cost = 0.0;
    for (const auto& t : B.tiling) cost += std::fabs(t.coef);
    CHECK(cost == doctest::Approx(B.cost).epsilon(1e-12));

    // Pairwise admissibility: tiles of distinct pairs never overlap on both axes.
    for (std::size_t a = 0; a < B.tiling.size(); ++a)
        for (std::size_t b = a + 1; b < B.tiling.size(); ++b)
            CHECK((tiles_disjoint(B.tiling[a].q, B.tiling[b].q) || tiles_disjoint(B.tiling[a].p, B.tiling[b].p)));

    const GhwtCompression C = threshold_compress(B, rt, ct, K.frobenius_norm(), 1e-14);
    const DenseMatrix R = C.reconstruct();
    DenseMatrix D(K.rows(), K.cols());
    for (std::size_t i = 0; i < K.size(); ++i) D.data()[i] = K.data()[i] - R.data()[i];
    CHECK(D.frobenius_norm() <= 1e-10 * K.frobenius_norm());
}

TEST_CASE("best basis: never worse than any fixed level pair") {
    SeededRng rng(8);
    const DenseMatrix K = random_mat(16, 8, rng);
    const PartitionTree rt = PartitionTree::dyadic(16), ct = PartitionTree::dyadic(8);
    const BestBasis2D B = best_basis_2d(K, rt, ct);
    for (std::size_t ly = 0; ly <= 4; ++ly)
        for (std::size_t lx = 0; lx <= 3; ++lx) CHECK(B.cost <= level_basis_cost(K, rt, ct, ly, lx) + 1e-12);
}

TEST_CASE("threshold: boundary cases and monotonicity") {
    SeededRng rng(2);
    const DenseMatrix K = random_mat(8, 8, rng);
    const PartitionTree t = PartitionTree::dyadic(8);
    const BestBasis2D B = best_basis_2d(K, t, t);
    CHECK(threshold_compress(B, t, t, B.coefficient_norm(), 1.0).n_kept() == 0);
    std::size_t prev = 65;
    for (double eps : {1e-6, 1e-3, 1e-2, 0.1, 0.3, 0.9}) {
        const GhwtCompression C = threshold_compress(B, t, t, B.coefficient_norm(), eps);
        CHECK(C.n_kept() <= prev);
        prev = C.n_kept();
        CHECK(C.dropped_norm <= eps * B.coefficient_norm());
        // Minimal: dropping one more coefficient breaks the bound.
        if (C.n_kept() > 0) {
            const double last = C.retained.back().coef;
            CHECK(std::sqrt(C.dropped_norm * C.dropped_norm + last * last) > eps * B.coefficient_norm());
        }
    }

    DenseMatrix ones(8, 8);
    for (std::size_t i = 0; i < 64; ++i) ones.data()[i] = 1.0;
    const BestBasis2D B1 = best_basis_2d(ones, t, t);
    const GhwtCompression C1 = threshold_compress(B1, t, t, ones.frobenius_norm(), 1e-3);
    CHECK(C1.n_kept() == 1);
    std::vector<double> f(8);
    std::iota(f.begin(), f.end(), 1.0);
    for (double y : C1.apply(f)) CHECK(y == doctest::Approx(36.0).epsilon(1e-12));
}

TEST_CASE("ghwt apply: transform path equals the reconstructed matrix") {
    SeededRng rng(13);
    const DenseMatrix K = random_mat(12, 20, rng);
    const PartitionTree rt = random_balanced_tree(12, rng), ct = random_balanced_tree(20, rng);
    const BestBasis2D B = best_basis_2d(K, rt, ct);
    const GhwtCompression C = threshold_compress(B, rt, ct, K.frobenius_norm(), 0.2);
    const DenseMatrix R = C.reconstruct();
    const auto f = random_vec(20, rng);
    const auto y = C.apply(f);
    const auto z = matvec(R, f);
    CHECK(norm2(std::vector<double>(y.begin(), y.end())) > 0.0);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(y[i] == doctest::Approx(z[i]).epsilon(1e-10));
    const std::vector<double> zero(20, 0.0);
    for (double v : C.apply(zero)) CHECK(v == 0.0);
    CHECK_THROWS_AS(C.apply(std::vector<double>(19)), DimensionError);
}

TEST_CASE("ghwt compression: save and load round trip") {
    SeededRng rng(17);
    const DenseMatrix K = random_mat(9, 13, rng);
    const PartitionTree rt = random_balanced_tree(9, rng), ct = random_balanced_tree(13, rng);
    const GhwtCompression C = threshold_compress(best_basis_2d(K, rt, ct), rt, ct, K.frobenius_norm(), 0.1);
    const auto dir = std::filesystem::temp_directory_path() / "gak_test_ghwt";
    std::filesystem::remove_all(dir);
    C.save(dir);
    const GhwtCompression L = GhwtCompression::load(dir);
    CHECK(L.n_kept() == C.n_kept());
    CHECK(L.storage() == C.storage());
    const auto f = random_vec(13, rng);
    CHECK(L.apply(f) == C.apply(f));
    std::filesystem::remove_all(dir);
}
