#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/rng.hpp"
#include "gak/sfc.hpp"

using namespace gak;

namespace {

double path_length(const DenseMatrix& P, const Permutation& order) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        double d = 0.0;
        for (std::size_t c = 0; c < P.cols(); ++c) {
            const double t = P(order[i], c) - P(order[i + 1], c);
            d += t * t;
        }
        s += std::sqrt(d);
    }
    return s;
}

}  // namespace

TEST_CASE("ordered tree on a line traverses it monotonically") {
    SeededRng rng(31);
    for (std::size_t n : {16u, 64u, 256u}) {
        const Permutation p = Permutation::random(n, rng);
        DenseMatrix P(n, 1);
        for (std::size_t i = 0; i < n; ++i) P(i, 0) = static_cast<double>(p[i]);
        const AffinityMatrix W = graph::gaussian_affinity(P);
        const OrderedTree ot = order_tree(build_tree(W), W);
        INFO("n = " << n);
        CHECK(path_length(P, ot.order) == doctest::Approx(static_cast<double>(n - 1)));
        CHECK(ot.order == ot.tree.leaf_order());
    }
}

TEST_CASE("single split with no neighbours swaps the children") {
    const PartitionTree T({{{0, 1}, {1, 2}}, {{0}, {}}, {{1}, {}}});
    const AffinityMatrix W(DenseMatrix(2, 2, {1, 0.5, 0.5, 1}));
    CHECK(order_tree(T, W).order == Permutation({1, 0}));
}

TEST_CASE("ordering keeps folder membership") {
    SeededRng rng(32);
    DenseMatrix P(64, 2);
    for (std::size_t i = 0; i < P.size(); ++i) P.data()[i] = rng.uniform();
    const AffinityMatrix W = graph::gaussian_affinity(P);
    const PartitionTree T = build_tree(W);
    const OrderedTree ot = order_tree(T, W);
    CHECK(ot.tree.node_count() == T.node_count());
    auto folder_sets = [](const PartitionTree& t) {
        std::vector<std::vector<std::size_t>> out;
        for (const Folder& f : t.folders()) {
            auto m = f.members;
            std::sort(m.begin(), m.end());
            out.push_back(std::move(m));
        }
        std::sort(out.begin(), out.end());
        return out;
    };
    CHECK(folder_sets(ot.tree) == folder_sets(T));
    CHECK_THROWS_AS(order_tree(PartitionTree::dyadic(10), W), DimensionError);
}

TEST_CASE("grid curve is local") {
    const std::size_t side = 16;
    DenseMatrix P(side * side, 2);
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j) {
            P(i * side + j, 0) = static_cast<double>(i);
            P(i * side + j, 1) = static_cast<double>(j);
        }
    const AffinityMatrix W = graph::gaussian_affinity(P);
    const OrderedTree ot = order_tree(build_tree(W), W);
    SeededRng rng(33);
    const double random_len = path_length(P, Permutation::random(P.rows(), rng));
    CHECK(path_length(P, ot.order) < 0.25 * random_len);
}

TEST_CASE("curve path csv") {
    const DenseMatrix P(3, 2, {0, 1, 2, 3, 4, 5});
    const std::string csv = curve_path_csv(P, Permutation({2, 0, 1}));
    CHECK(csv.rfind("x0,x1\n4", 0) == 0);
    CHECK_THROWS_AS(curve_path_csv(P, Permutation::identity(2)), DimensionError);
}
