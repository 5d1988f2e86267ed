#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "gak/error.hpp"
#include "gak/graph.hpp"
#include "gak/rng.hpp"
#include "gak/tree.hpp"

using namespace gak;

namespace {

// Points 0, 1, ..., n-1 on a line with listed index order shuffled.
DenseMatrix line_points(const Permutation& p) {
    DenseMatrix P(p.size(), 1);
    for (std::size_t i = 0; i < p.size(); ++i) P(i, 0) = static_cast<double>(p[i]);
    return P;
}

bool contiguous(const std::vector<double>& pos) {
    const auto [lo, hi] = std::minmax_element(pos.begin(), pos.end());
    return *hi - *lo + 1.0 == static_cast<double>(pos.size());
}

}  // namespace

TEST_CASE("dyadic tree structure") {
    const PartitionTree T = PartitionTree::dyadic(5);
    CHECK(T.n() == 5);
    CHECK(T.depth() == 3);
    CHECK(T.is_balanced());
    CHECK(T.folder(0).members.size() == 5);
    CHECK(T.folder(T.folder(0).children[0]).size() == 3);
    CHECK(T.leaf_order() == Permutation::identity(5));
    for (std::size_t l = 0; l <= T.depth(); ++l) {
        std::size_t total = 0, expect_off = 0;
        for (std::size_t id : T.folders_at_level(l)) {
            CHECK(T.folder(id).offset == expect_off);
            expect_off += T.folder(id).size();
            total += T.folder(id).size();
        }
        CHECK(total == 5);
    }
    CHECK_THROWS_AS(T.folders_at_level(4), InvalidArgument);
    CHECK_THROWS_AS(PartitionTree::dyadic(0), InvalidArgument);
}

TEST_CASE("dyadic tree over a given order") {
    const Permutation order({3, 1, 0, 2});
    const PartitionTree T = PartitionTree::dyadic(order);
    CHECK(T.leaf_order() == order);
    const auto& kids = T.folder(0).children;
    std::vector<std::size_t> left = T.folder(kids[0]).members;
    std::sort(left.begin(), left.end());
    CHECK(left == std::vector<std::size_t>{1, 3});
}

TEST_CASE("tree validation") {
    CHECK_THROWS_AS(PartitionTree({{{0, 1, 2}, {1}}, {{0, 1}, {}}}), InvalidArgument);
    CHECK_THROWS_AS(PartitionTree({{{0, 1, 2}, {1, 2}}, {{0, 1}, {}}, {{1, 2}, {}}}), InvalidArgument);
    CHECK_THROWS_AS(PartitionTree({{{0, 2}, {}}}), InvalidArgument);
    const PartitionTree ok({{{0, 1, 2}, {1, 2}}, {{2}, {}}, {{0, 1}, {3, 4}}, {{1}, {}}, {{0}, {}}});
    CHECK(ok.depth() == 2);
    CHECK(ok.is_balanced());
    CHECK(ok.leaf_order() == Permutation({2, 1, 0}));
    // The shallow leaf {2} is carried into level 2.
    CHECK(ok.folders_at_level(2).size() == 3);
    CHECK(ok.split_of(1) == std::vector<std::size_t>{1});
}

TEST_CASE("tree json round trip") {
    SeededRng rng(4);
    const PartitionTree T = PartitionTree::dyadic(Permutation::random(37, rng));
    const PartitionTree U = PartitionTree::from_json(T.to_json());
    CHECK(U.leaf_order() == T.leaf_order());
    CHECK(U.node_count() == T.node_count());
    CHECK(U.to_json() == T.to_json());
    CHECK_THROWS_AS(PartitionTree::from_json("{\"nodes\": 3"), FormatError);
}

TEST_CASE("build_tree on a line gives interval folders") {
    SeededRng rng(9);
    for (std::size_t n : {17u, 64u, 301u}) {
        const Permutation p = Permutation::random(n, rng);
        const DenseMatrix P = line_points(p);
        const AffinityMatrix W = graph::gaussian_affinity(P);
        const PartitionTree T = build_tree(W);
        CHECK(T.n() == n);
        CHECK(T.is_balanced());
        for (const Folder& f : T.folders()) {
            std::vector<double> pos;
            for (std::size_t i : f.members) pos.push_back(P(i, 0));
            CHECK(contiguous(pos));
            if (!f.is_leaf()) CHECK(f.children.size() == 2);
            else CHECK(f.size() == 1);
        }
    }
}

TEST_CASE("build_tree options") {
    SeededRng rng(2);
    const DenseMatrix P = line_points(Permutation::random(40, rng));
    const AffinityMatrix W = graph::gaussian_affinity(P);
    TreeOptions o;
    o.leaf_max = 5;
    const PartitionTree T = build_tree(W, o);
    for (std::size_t id : T.leaf_folders()) CHECK(T.folder(id).size() <= 5);
    o.mode = SplitMode::sign;
    o.leaf_max = 1;
    const PartitionTree S = build_tree(W, o);
    for (const Folder& f : S.folders()) CHECK((f.is_leaf() || f.children.size() == 2));
    o.leaf_max = 0;
    CHECK_THROWS_AS(build_tree(W, o), InvalidArgument);
    CHECK(build_tree(W).to_json() == build_tree(W).to_json());
}
