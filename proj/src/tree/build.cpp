#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "gak/error.hpp"
#include "gak/rng.hpp"
#include "gak/tree.hpp"

namespace gak {

namespace {

std::vector<double> folder_fiedler(const AffinityMatrix& W, const std::vector<std::size_t>& members,
                                   std::uint64_t seed, std::size_t node_tag) {
    if (members.size() <= graph::kLandmarkThreshold) return graph::fiedler_vector(W.restrict_to(members));

    const std::size_t n = members.size();
    const auto m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
    SeededRng rng = SeededRng::derive(seed, node_tag);
    // Partial Fisher-Yates: first m entries are a uniform sample without replacement.
    std::vector<std::size_t> pick(n);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) std::swap(pick[i], pick[i + rng.below(n - i)]);
    pick.resize(m);
    std::sort(pick.begin(), pick.end());
    std::vector<std::size_t> cols(m);
    for (std::size_t l = 0; l < m; ++l) cols[l] = members[pick[l]];
    const DenseMatrix cross = W.matrix().select(members, cols);
    return graph::landmark_fiedler(cross, pick);
}

}  // namespace

PartitionTree build_tree(const AffinityMatrix& W, const TreeOptions& opts) {
    const std::size_t n = W.size();
    if (n == 0) throw InvalidArgument("build_tree: empty index set");
    if (opts.leaf_max < 1) throw InvalidArgument("build_tree: leaf_max must be >= 1");

    std::vector<TreeNodeSpec> specs;
    std::function<std::size_t(std::vector<std::size_t>)> grow = [&](std::vector<std::size_t> members) {
        const std::size_t id = specs.size();
        specs.push_back({members, {}});
        const std::size_t sz = members.size();
        if (sz <= opts.leaf_max || sz == 1) return id;

        std::vector<std::size_t> left, right;
        if (sz == 2) {
            left = {members[0]};
            right = {members[1]};
        } else {
            const std::vector<double> v = folder_fiedler(W, members, opts.seed, id);
            if (opts.mode == SplitMode::sign) {
                for (std::size_t i = 0; i < sz; ++i) (v[i] >= 0.0 ? left : right).push_back(members[i]);
            }
            if (left.empty() || right.empty()) {
                left.clear();
                right.clear();
                std::vector<std::size_t> idx(sz);
                std::iota(idx.begin(), idx.end(), std::size_t{0});
                // Members arrive sorted, so index order breaks ties toward the left.
                std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
                const std::size_t half = (sz + 1) / 2;
                for (std::size_t i = 0; i < sz; ++i) (i < half ? left : right).push_back(members[idx[i]]);
            }
            std::sort(left.begin(), left.end());
            std::sort(right.begin(), right.end());
        }
        const std::size_t a = grow(std::move(left));
        const std::size_t b = grow(std::move(right));
        specs[id].children = {a, b};
        return id;
    };
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    grow(std::move(all));
    return PartitionTree(std::move(specs));
}

}  // namespace gak
