#include <doctest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "gak/error.hpp"
#include "gak/graph.hpp"
#include "gak/rng.hpp"

using namespace gak;

namespace {

AffinityMatrix path_graph(std::size_t n) {
    DenseMatrix W(n, n);
    for (std::size_t i = 0; i + 1 < n; ++i) W(i, i + 1) = W(i + 1, i) = 1.0;
    return AffinityMatrix(W);
}

DenseMatrix random_points(std::size_t n, std::size_t d, SeededRng& rng) {
    DenseMatrix P(n, d);
    for (std::size_t i = 0; i < P.size(); ++i) P.data()[i] = rng.uniform();
    return P;
}

double abs_cosine(const std::vector<double>& a, const std::vector<double>& b) {
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return std::fabs(ab) / std::sqrt(aa * bb);
}

}  // namespace

TEST_CASE("affinity matrix validation") {
    CHECK_THROWS_AS(AffinityMatrix(DenseMatrix(2, 3)), DimensionError);
    CHECK_THROWS_AS(AffinityMatrix(DenseMatrix(2, 2, {1, 0.5, 0.4, 1})), InvalidArgument);
    CHECK_THROWS_AS(AffinityMatrix(DenseMatrix(2, 2, {1, -0.5, -0.5, 1})), InvalidArgument);
    const AffinityMatrix W(DenseMatrix(3, 3, {1, 0.2, 0.3, 0.2, 1, 0.4, 0.3, 0.4, 1}));
    const std::vector<std::size_t> idx{2, 0};
    CHECK(W.restrict_to(idx).matrix() == DenseMatrix(2, 2, {1, 0.3, 0.3, 1}));
}

TEST_CASE("gaussian and cosine affinities: closed forms") {
    const DenseMatrix P(3, 1, {0, 1, 3});
    CHECK(graph::median_pairwise_distance(P) == 2.0);
    const AffinityMatrix G = graph::gaussian_affinity(P, graph::Bandwidth::fixed(1.0));
    CHECK(G(0, 1) == doctest::Approx(std::exp(-0.5)));
    CHECK(G(0, 2) == doctest::Approx(std::exp(-4.5)));
    const AffinityMatrix Gm = graph::gaussian_affinity(P);
    CHECK(Gm(1, 2) == doctest::Approx(std::exp(-4.0 / 8.0)));
    CHECK_THROWS_AS(graph::gaussian_affinity(DenseMatrix(2, 1, {1, 1})), NumericalError);

    const DenseMatrix V(2, 3, {1, 0, -2, 0, 1, 0});
    const AffinityMatrix C = graph::cosine_affinity(V);
    CHECK(C(0, 1) == doctest::Approx(0.0));
    CHECK(C(0, 2) == doctest::Approx(1.0));
    CHECK(C(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("laplacian: symmetric normalization") {
    const AffinityMatrix W(DenseMatrix(2, 2, {0, 2, 2, 0}));
    const DenseMatrix L = graph::sym_laplacian(W);
    CHECK(L(0, 0) == 1.0);
    CHECK(L(0, 1) == doctest::Approx(-1.0));
}

TEST_CASE("fiedler: path graph matches the cosine mode") {
    for (std::size_t n : {10u, 300u}) {
        const auto v = graph::fiedler_vector(path_graph(n));
        std::vector<double> expect(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double deg = (i == 0 || i + 1 == n) ? 1.0 : 2.0;
            expect[i] = std::sqrt(deg) * std::cos(std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1));
        }
        CHECK(abs_cosine(v, expect) == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(v[0] > 0.0);
        CHECK(std::fabs(norm2(v) - 1.0) < 1e-12);
    }
}

TEST_CASE("fiedler: dense and Lanczos agree") {
    SeededRng rng(3);
    const AffinityMatrix W = graph::gaussian_affinity(random_points(300, 2, rng));
    const auto a = graph::fiedler_vector(W, graph::EigenMethod::dense);
    const auto b = graph::fiedler_vector(W, graph::EigenMethod::lanczos);
    CHECK(abs_cosine(a, b) == doctest::Approx(1.0).epsilon(1e-8));
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-6));
}

TEST_CASE("fiedler: disconnected graph splits the components") {
    DenseMatrix W(6, 6);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) {
            W(i, j) = 1.0;
            W(i + 3, j + 3) = 1.0;
        }
    const auto v = graph::fiedler_vector(AffinityMatrix(W));
    CHECK(v[0] * v[1] > 0);
    CHECK(v[0] * v[3] < 0);
}

TEST_CASE("landmark extension with every point as landmark equals the dense vector") {
    SeededRng rng(6);
    const AffinityMatrix W = graph::gaussian_affinity(random_points(60, 2, rng));
    std::vector<std::size_t> all(60);
    std::iota(all.begin(), all.end(), 0);
    const auto a = graph::landmark_fiedler(W.matrix(), all);
    const auto b = graph::fiedler_vector(W);
    CHECK(abs_cosine(a, b) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("diffusion embedding: path graph eigenpairs") {
    const std::size_t n = 20;
    const EmbeddingCoords e = graph::diffusion_embedding(path_graph(n), 2);
    CHECK(e.eigenvalues[0] == doctest::Approx(std::cos(std::numbers::pi / 19.0)).epsilon(1e-10));
    CHECK(e.eigenvalues[1] == doctest::Approx(std::cos(2.0 * std::numbers::pi / 19.0)).epsilon(1e-10));
    std::vector<double> c0(n), expect(n);
    for (std::size_t i = 0; i < n; ++i) {
        c0[i] = e.coords(i, 0);
        expect[i] = std::cos(std::numbers::pi * static_cast<double>(i) / 19.0);
    }
    CHECK(abs_cosine(c0, expect) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK_THROWS_AS(graph::diffusion_embedding(path_graph(3), 3), InvalidArgument);
}

TEST_CASE("fix_sign") {
    std::vector<double> v{0.0, 1e-20, -0.5, 0.3};
    graph::fix_sign(v);
    CHECK(v[2] == 0.5);
    CHECK(v[3] == -0.3);
}
