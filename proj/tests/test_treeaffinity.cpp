#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gak/error.hpp"
#include "gak/rng.hpp"
#include "gak/tree_affinity.hpp"

using namespace gak;

namespace {

DenseMatrix random_mat(std::size_t r, std::size_t c, SeededRng& rng) {
    DenseMatrix M(r, c);
    for (std::size_t i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
    return M;
}

// Weighted sum of |correlation| over non-root folders with at least 2 members.
double corr_oracle(std::span<const double> f, std::span<const double> g, const PartitionTree& T,
                   const TreeWeightParams& p) {
    double total = 0.0;
    for (const Folder& V : T.folders()) {
        if (V.parent == kNoFolder || V.size() < 2) continue;
        double mf = 0, mg = 0;
        for (std::size_t x : V.members) {
            mf += f[x];
            mg += g[x];
        }
        mf /= static_cast<double>(V.size());
        mg /= static_cast<double>(V.size());
        double fg = 0, ff = 0, gg = 0;
        for (std::size_t x : V.members) {
            fg += (f[x] - mf) * (g[x] - mg);
            ff += (f[x] - mf) * (f[x] - mf);
            gg += (g[x] - mg) * (g[x] - mg);
        }
        const double w = static_cast<double>(V.size()) /
                         (static_cast<double>(T.folder(V.parent).size()) * treeaff::folder_weight(V, p));
        total += w * std::fabs(fg) / std::sqrt(ff * gg);
    }
    return total;
}

}  // namespace

TEST_CASE("folder weights") {
    TreeWeightParams p;
    CHECK(treeaff::folder_weight(2, 8, p) == doctest::Approx(4.0));
    const TreeWeightParams c = default_weight_params(Metric::corr);
    CHECK(c.alpha == -1.0);
    CHECK(c.beta == 0.0);
    CHECK(treeaff::folder_weight(3, 5, c) == doctest::Approx(8.0));
    p.epsilon_scale = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("tree EMD: hand-computed two-point tree") {
    const PartitionTree T = PartitionTree::dyadic(2);
    const std::vector<double> f{1, 0}, g{0, 0};
    CHECK(treeaff::emd_tree_distance(f, g, T, {}) == doctest::Approx(1.0 + std::sqrt(0.5)));
}

TEST_CASE("tree EMD matrix matches the folder-by-folder sum") {
    SeededRng rng(11);
    const PartitionTree T = PartitionTree::dyadic(Permutation::random(23, rng));
    const DenseMatrix F = random_mat(9, 23, rng);
    for (FolderNorm norm : {FolderNorm::l1, FolderNorm::l2}) {
        TreeWeightParams p;
        p.norm = norm;
        p.alpha = 0.3;
        p.beta = 0.7;
        const DenseMatrix D = treeaff::emd_distance_matrix(F, T, p);
        for (std::size_t i = 0; i < 9; ++i) {
            CHECK(D(i, i) == 0.0);
            for (std::size_t j = 0; j < 9; ++j)
                CHECK(D(i, j) == doctest::Approx(treeaff::emd_tree_distance(F.row(i), F.row(j), T, p)).epsilon(1e-12));
        }
    }
}

TEST_CASE("EMD affinity uses the median distance as scale") {
    SeededRng rng(12);
    const PartitionTree T = PartitionTree::dyadic(16);
    const DenseMatrix F = random_mat(5, 16, rng);
    TreeWeightParams p;
    p.epsilon_scale = 2.0;
    const DenseMatrix D = treeaff::emd_distance_matrix(F, T, p);
    std::vector<double> off;
    for (std::size_t i = 0; i < 5; ++i)
        for (std::size_t j = i + 1; j < 5; ++j) off.push_back(D(i, j));
    std::sort(off.begin(), off.end());
    const double med = 0.5 * (off[4] + off[5]);
    const AffinityMatrix W = treeaff::emd_affinity_matrix(F, T, p);
    CHECK(W(0, 0) == 1.0);
    CHECK(W(1, 3) == doctest::Approx(std::exp(-D(1, 3) / (2.0 * med))));
    CHECK_THROWS_AS(treeaff::emd_affinity_matrix(DenseMatrix(3, 16), T, p), NumericalError);
}

TEST_CASE("correlation affinity matches a direct loop") {
    SeededRng rng(13);
    const PartitionTree T = PartitionTree::dyadic(Permutation::random(19, rng));
    const DenseMatrix F = random_mat(7, 19, rng);
    const TreeWeightParams p = default_weight_params(Metric::corr);
    const AffinityMatrix W = treeaff::corr_affinity_matrix(F, T, p);
    for (std::size_t i = 0; i < 7; ++i)
        for (std::size_t j = 0; j < 7; ++j)
            CHECK(W(i, j) == doctest::Approx(corr_oracle(F.row(i), F.row(j), T, p)).epsilon(1e-12));
}

TEST_CASE("dual affinity axes") {
    SeededRng rng(14);
    const DenseMatrix K = random_mat(6, 10, rng);
    const PartitionTree Tc = PartitionTree::dyadic(10);
    const PartitionTree Tr = PartitionTree::dyadic(6);
    const TreeWeightParams p;
    CHECK(treeaff::dual_affinity(K, Tc, Metric::emd, p, Axis::rows).size() == 6);
    const AffinityMatrix Wc = treeaff::dual_affinity(K, Tr, Metric::emd, p, Axis::cols);
    CHECK(Wc == treeaff::emd_affinity_matrix(K.transpose(), Tr, p));
    CHECK_THROWS_AS(treeaff::dual_affinity(K, Tr, Metric::corr, p, Axis::rows), DimensionError);
}
