#include "gak/sfc.hpp"

#include <string>

#include "gak/error.hpp"
#include "gak/io.hpp"

namespace gak {

namespace {

constexpr double kZeroSentinel = 1e-300;

double block_sum(const AffinityMatrix& W, const Folder& a, const Folder& b) {
    double s = 0.0;
    for (std::size_t i : a.members)
        for (std::size_t j : b.members) s += W(i, j);
    return s;
}

}  // namespace

OrderedTree order_tree(const PartitionTree& T, const AffinityMatrix& W) {
    if (W.size() != T.n())
        throw DimensionError("order_tree: affinity size " + std::to_string(W.size()) + " != tree size " +
                             std::to_string(T.n()));
    std::vector<TreeNodeSpec> specs = T.spec();

    std::vector<std::size_t> prev{0};
    for (std::size_t level = 1; level <= T.depth(); ++level) {
        std::vector<std::size_t> cur;
        for (std::size_t idx = 0; idx < prev.size(); ++idx) {
            const std::size_t e = prev[idx];
            auto& kids = specs[e].children;
            if (kids.empty()) {
                cur.push_back(e);
                continue;
            }
            const Folder& l = T.folder(kids[0]);
            const Folder& r = T.folder(kids[1]);
            double A = 1.0, B = 1.0, C = 1.0, D = 1.0;
            if (!cur.empty()) {
                const Folder& sib = T.folder(cur.back());
                A = block_sum(W, l, sib);
                B = block_sum(W, r, sib);
            }
            if (idx + 1 < prev.size()) {
                const Folder& nb = T.folder(prev[idx + 1]);
                C = block_sum(W, l, nb);
                D = block_sum(W, r, nb);
            }
            if (C == 0.0) C = kZeroSentinel;
            if (D == 0.0) D = kZeroSentinel;
            if (A / C <= B / D) std::swap(kids[0], kids[1]);
            cur.insert(cur.end(), kids.begin(), kids.end());
        }
        prev = std::move(cur);
    }
    OrderedTree out{PartitionTree(std::move(specs)), {}};
    out.order = out.tree.leaf_order();
    return out;
}

std::string curve_path_csv(const DenseMatrix& points, const Permutation& perm) {
    if (perm.size() != points.rows()) throw DimensionError("curve_path_csv: permutation length != point count");
    CsvTable rows;
    rows.reserve(points.rows());
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const auto r = points.row(perm[i]);
        rows.emplace_back(r.begin(), r.end());
    }
    std::vector<std::string> header;
    for (std::size_t c = 0; c < points.cols(); ++c) header.push_back("x" + std::to_string(c));
    return to_csv(rows, header);
}

}  // namespace gak
