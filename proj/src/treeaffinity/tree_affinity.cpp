#include <algorithm>
#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/pairwise.hpp"
#include "gak/tree_affinity.hpp"

namespace gak {

void TreeWeightParams::validate() const {
    if (!(epsilon_scale > 0.0) || !std::isfinite(epsilon_scale))
        throw InvalidArgument("TreeWeightParams: epsilon_scale must be positive");
    if (!std::isfinite(alpha) || !std::isfinite(beta)) throw InvalidArgument("TreeWeightParams: non-finite weight");
}

TreeWeightParams default_weight_params(Metric metric) {
    TreeWeightParams p;
    if (metric == Metric::corr) {
        p.alpha = -1.0;
        p.beta = 0.0;
    }
    return p;
}

namespace treeaff {

namespace {

void check_functions(const DenseMatrix& F, const PartitionTree& T, const char* who) {
    if (F.cols() != T.n())
        throw DimensionError(std::string(who) + ": function length " + std::to_string(F.cols()) +
                             " != tree size " + std::to_string(T.n()));
    if (F.rows() < 2) throw InvalidArgument(std::string(who) + ": need at least 2 functions");
}

// Columns of F reordered into the tree's leaf order, optionally row-normalized.
DenseMatrix leaf_ordered(const DenseMatrix& F, const PartitionTree& T, bool normalize_rows) {
    const std::size_t m = F.rows(), n = F.cols();
    const auto& order = T.leaf_order().map();
    DenseMatrix G(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const auto src = F.row(i);
        auto dst = G.row(i);
        for (std::size_t p = 0; p < n; ++p) dst[p] = src[order[p]];
        if (normalize_rows) {
            const double nr = norm2(dst);
            if (nr > 0.0)
                for (double& v : dst) v /= nr;
        }
    }
    return G;
}

double median_offdiag(const DenseMatrix& D) {
    const std::size_t m = D.rows();
    std::vector<double> v;
    v.reserve(m * (m - 1) / 2);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) v.push_back(D(i, j));
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    return 0.5 * (*std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)) + upper);
}

}  // namespace

double folder_weight(std::size_t level, std::size_t size, const TreeWeightParams& p) {
    return std::exp2(-p.alpha * static_cast<double>(level)) * std::pow(static_cast<double>(size), p.beta);
}

double folder_weight(const Folder& f, const TreeWeightParams& p) { return folder_weight(f.level, f.size(), p); }

double emd_tree_distance(std::span<const double> f, std::span<const double> g, const PartitionTree& T,
                         const TreeWeightParams& p) {
    if (f.size() != T.n() || g.size() != T.n()) throw DimensionError("emd_tree_distance: length mismatch");
    double total = 0.0;
    for (const Folder& V : T.folders()) {
        double s = 0.0;
        for (std::size_t x : V.members) {
            const double d = f[x] - g[x];
            s += p.norm == FolderNorm::l1 ? std::abs(d) : d * d;
        }
        if (p.norm == FolderNorm::l2) s = std::sqrt(s);
        total += s * folder_weight(V, p) / static_cast<double>(V.size());
    }
    return total;
}

DenseMatrix emd_distance_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p) {
    check_functions(F, T, "emd_distance_matrix");
    p.validate();
    const DenseMatrix G = leaf_ordered(F, T, p.normalize_rows);
    if (p.norm == FolderNorm::l1) {
        // With l1 per folder the sum collapses to one weighted l1 distance.
        std::vector<double> w(T.n(), 0.0);
        for (const Folder& V : T.folders()) {
            const double c = folder_weight(V, p) / static_cast<double>(V.size());
            for (std::size_t q = V.offset; q < V.offset + V.size(); ++q) w[q] += c;
        }
        return par::pairwise_weighted_l1(G, w);
    }
    std::vector<Segment> segs;
    for (const Folder& V : T.folders())
        segs.push_back({V.offset, V.size(), folder_weight(V, p) / static_cast<double>(V.size())});
    return par::pairwise_segment_l2(G, segs);
}

AffinityMatrix emd_affinity_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p) {
    DenseMatrix D = emd_distance_matrix(F, T, p);
    const std::size_t m = D.rows();
    double scale = median_offdiag(D);
    if (scale == 0.0) {
        // More than half the pairs coincide; fall back to the mean positive distance.
        double s = 0.0;
        std::size_t c = 0;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i + 1; j < m; ++j)
                if (D(i, j) > 0.0) {
                    s += D(i, j);
                    ++c;
                }
        if (c == 0) throw NumericalError("emd_affinity_matrix: all pairwise EMDs are zero");
        scale = s / static_cast<double>(c);
    }
    const double eps = p.epsilon_scale * scale;
    for (std::size_t i = 0; i < m; ++i) {
        D(i, i) = 1.0;
        for (std::size_t j = i + 1; j < m; ++j) {
            const double w = std::exp(-D(i, j) / eps);
            D(i, j) = w;
            D(j, i) = w;
        }
    }
    return AffinityMatrix(std::move(D));
}

AffinityMatrix corr_affinity_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p) {
    check_functions(F, T, "corr_affinity_matrix");
    p.validate();
    const DenseMatrix G = leaf_ordered(F, T, p.normalize_rows);
    const std::size_t m = G.rows();

    struct Piece {
        std::size_t src;  // offset in leaf order
        std::size_t len;
        double weight;
    };
    std::vector<Piece> pieces;
    std::size_t width = 0;
    for (const Folder& V : T.folders()) {
        if (V.parent == kNoFolder || V.size() < 2) continue;
        const Folder& P = T.folder(V.parent);
        const double w = static_cast<double>(V.size()) / (static_cast<double>(P.size()) * folder_weight(V, p));
        pieces.push_back({V.offset, V.size(), w});
        width += V.size();
    }

    // Each row becomes the concatenation of its centered, unit-norm pieces, so
    // a correlation is one segment dot product.
    DenseMatrix Z(m, width);
    std::vector<Segment> segs;
    segs.reserve(pieces.size());
    std::size_t at = 0;
    for (const Piece& pc : pieces) {
        segs.push_back({at, pc.len, pc.weight});
        for (std::size_t i = 0; i < m; ++i) {
            const double* x = G.data() + i * G.cols() + pc.src;
            double* z = Z.data() + i * width + at;
            double mean = 0.0, raw = 0.0;
            for (std::size_t q = 0; q < pc.len; ++q) {
                mean += x[q];
                raw += x[q] * x[q];
            }
            mean /= static_cast<double>(pc.len);
            double cn = 0.0;
            for (std::size_t q = 0; q < pc.len; ++q) {
                z[q] = x[q] - mean;
                cn += z[q] * z[q];
            }
            cn = std::sqrt(cn);
            if (cn == 0.0 || cn <= 1e-12 * std::sqrt(raw)) {
                std::fill(z, z + pc.len, 0.0);
            } else {
                for (std::size_t q = 0; q < pc.len; ++q) z[q] /= cn;
            }
        }
        at += pc.len;
    }
    return AffinityMatrix(par::pairwise_segment_abs_dot(Z, segs));
}

AffinityMatrix dual_affinity(const DenseMatrix& K, const PartitionTree& T, Metric metric, const TreeWeightParams& p,
                             Axis axis) {
    const bool rows = axis == Axis::rows;
    const std::size_t expect = rows ? K.cols() : K.rows();
    if (T.n() != expect)
        throw DimensionError("dual_affinity: tree over " + std::to_string(T.n()) + " indices, matrix side has " +
                             std::to_string(expect));
    if (rows) {
        return metric == Metric::emd ? emd_affinity_matrix(K, T, p) : corr_affinity_matrix(K, T, p);
    }
    const DenseMatrix Kt = K.transpose();
    return metric == Metric::emd ? emd_affinity_matrix(Kt, T, p) : corr_affinity_matrix(Kt, T, p);
}

}  // namespace treeaff
}  // namespace gak
