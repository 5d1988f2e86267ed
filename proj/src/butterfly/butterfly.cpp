#include <algorithm>
#include <cstdint>
#include <string>

#include "gak/butterfly.hpp"
#include "gak/error.hpp"

namespace gak {

namespace {

// K[rows, cols] as a column-major buffer.
std::vector<double> gather_colmajor(const DenseMatrix& K, std::span<const std::size_t> rows,
                                    std::span<const std::size_t> cols) {
    const std::size_t m = rows.size(), n = cols.size();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* src = K.data() + rows[i] * K.cols();
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = src[cols[j]];
    }
    return out;
}

std::span<const std::size_t> members_of(const Folder& f) { return f.members; }

// For each entry of `next` (level l+1), the index of the level-l entry that covers it.
std::vector<std::size_t> cover_index(const PartitionTree& T, const std::vector<std::size_t>& cur) {
    std::vector<std::size_t> out;
    for (std::size_t a = 0; a < cur.size(); ++a)
        for (std::size_t id : T.split_of(cur[a])) {
            (void)id;
            out.push_back(a);
        }
    return out;
}

void assign_offsets(bf::Level& L) {
    std::size_t off = 0;
    for (bf::Block& b : L.blocks) {
        b.out_off = off;
        off += b.id.rank();
    }
    L.buffer_len = off;
}

std::vector<std::size_t> skeleton_of(const bf::InterpBlock& id, std::span<const std::size_t> candidates) {
    if (id.identity) return {candidates.begin(), candidates.end()};
    std::vector<std::size_t> s(id.skel.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = candidates[id.skel[i]];
    return s;
}

}  // namespace

std::size_t butterfly_start_level(const PartitionTree& col_tree, std::size_t block_cap) {
    if (block_cap < 1) throw InvalidArgument("butterfly: block_cap must be >= 1");
    for (std::size_t l = 0; l <= col_tree.depth(); ++l) {
        std::size_t mx = 0;
        for (std::size_t id : col_tree.folders_at_level(l)) mx = std::max(mx, col_tree.folder(id).size());
        if (mx <= block_cap) return l;
    }
    throw InvalidArgument("butterfly: column tree leaves exceed block_cap " + std::to_string(block_cap));
}

ButterflyFactorization butterfly_factor(const DenseMatrix& K, const PartitionTree& row_tree,
                                        const PartitionTree& col_tree, const ButterflyOptions& opts) {
    if (row_tree.n() != K.rows() || col_tree.n() != K.cols())
        throw DimensionError("butterfly_factor: tree sizes do not match the matrix");
    if (!(opts.eps > 0.0 && opts.eps < 1.0)) throw InvalidArgument("butterfly_factor: eps must lie in (0,1)");

    ButterflyFactorization F;
    F.n_rows = K.rows();
    F.n_cols = K.cols();
    F.row_perm = row_tree.leaf_order();
    F.col_perm = col_tree.leaf_order();
    const std::size_t s = butterfly_start_level(col_tree, opts.block_cap);
    F.start_level = s;
    F.passes = std::min(row_tree.depth(), s);

    // Initial skeletons: every row against one column block.
    {
        const auto& cols = col_tree.folders_at_level(s);
        const Folder& root = row_tree.folder(0);
        bf::Level L;
        L.blocks.resize(cols.size());
        const auto nb = static_cast<std::int64_t>(cols.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t c = 0; c < nb; ++c) {
            const Folder& C = col_tree.folder(cols[static_cast<std::size_t>(c)]);
            const auto A = gather_colmajor(K, members_of(root), members_of(C));
            bf::Block& b = L.blocks[static_cast<std::size_t>(c)];
            b.id = bf::interp_block(A.data(), root.size(), C.size(), opts.eps);
            b.in_off = C.offset;
            b.in_len = C.size();
            b.skel_global = skeleton_of(b.id, members_of(C));
        }
        assign_offsets(L);
        F.levels.push_back(std::move(L));
    }

    for (std::size_t t = 0; t < F.passes; ++t) {
        const auto& rows_cur = row_tree.folders_at_level(t);
        const auto& cols_cur = col_tree.folders_at_level(s - t);
        const auto& rows_next = row_tree.folders_at_level(t + 1);
        const auto& cols_next = col_tree.folders_at_level(s - t - 1);
        const std::vector<std::size_t> row_parent = cover_index(row_tree, rows_cur);
        // First level-(s-t) entry under each level-(s-t-1) entry, and how many.
        std::vector<std::size_t> col_first(cols_next.size()), col_count(cols_next.size());
        {
            std::size_t at = 0;
            for (std::size_t c = 0; c < cols_next.size(); ++c) {
                col_first[c] = at;
                col_count[c] = col_tree.split_of(cols_next[c]).size();
                at += col_count[c];
            }
        }
        const bf::Level& prev = F.levels.back();
        bf::Level L;
        L.blocks.resize(rows_next.size() * cols_next.size());
        const auto nb = static_cast<std::int64_t>(L.blocks.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t q = 0; q < nb; ++q) {
            const std::size_t a2 = static_cast<std::size_t>(q) / cols_next.size();
            const std::size_t c2 = static_cast<std::size_t>(q) % cols_next.size();
            const std::size_t a = row_parent[a2];
            const bf::Block& first = prev.blocks[a * cols_cur.size() + col_first[c2]];
            const bf::Block& last = prev.blocks[a * cols_cur.size() + col_first[c2] + col_count[c2] - 1];
            std::vector<std::size_t> cand = first.skel_global;
            if (&last != &first) cand.insert(cand.end(), last.skel_global.begin(), last.skel_global.end());

            bf::Block& b = L.blocks[static_cast<std::size_t>(q)];
            b.in_off = first.out_off;
            b.in_len = last.out_off + last.id.rank() - first.out_off;
            const Folder& R = row_tree.folder(rows_next[a2]);
            if (cand.empty()) {
                b.id.n_in = 0;
                b.id.identity = true;
                continue;
            }
            const auto A = gather_colmajor(K, members_of(R), cand);
            b.id = bf::interp_block(A.data(), R.size(), cand.size(), opts.eps);
            b.skel_global = skeleton_of(b.id, cand);
        }
        assign_offsets(L);
        F.levels.push_back(std::move(L));
    }

    const auto& rows_f = row_tree.folders_at_level(F.passes);
    const auto& cols_f = col_tree.folders_at_level(s - F.passes);
    const bf::Level& last = F.levels.back();
    F.finals.resize(rows_f.size() * cols_f.size());
    const auto nf = static_cast<std::int64_t>(F.finals.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t q = 0; q < nf; ++q) {
        const std::size_t a = static_cast<std::size_t>(q) / cols_f.size();
        const bf::Block& src = last.blocks[static_cast<std::size_t>(q)];
        const Folder& R = row_tree.folder(rows_f[a]);
        bf::FinalBlock& fb = F.finals[static_cast<std::size_t>(q)];
        fb.row_off = R.offset;
        fb.row_len = R.size();
        fb.in_off = src.out_off;
        fb.in_len = src.id.rank();
        fb.B.resize(fb.row_len * fb.in_len);
        for (std::size_t i = 0; i < fb.row_len; ++i) {
            const double* krow = K.data() + R.members[i] * K.cols();
            for (std::size_t j = 0; j < fb.in_len; ++j) fb.B[i * fb.in_len + j] = krow[src.skel_global[j]];
        }
    }
    return F;
}

std::vector<double> ButterflyFactorization::apply(std::span<const double> f) const {
    if (f.size() != n_cols)
        throw DimensionError("butterfly_apply: vector length " + std::to_string(f.size()) + " != " +
                             std::to_string(n_cols));
    std::vector<double> x = col_perm.gather(f);
    std::vector<double> buf;
    for (const bf::Level& L : levels) {
        std::vector<double> next(L.buffer_len);
        const auto nb = static_cast<std::int64_t>(L.blocks.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t q = 0; q < nb; ++q) {
            const bf::Block& b = L.blocks[static_cast<std::size_t>(q)];
            if (b.id.rank() == 0) continue;
            b.id.apply(x.data() + b.in_off, next.data() + b.out_off);
        }
        x.swap(next);
    }
    std::vector<double> y(n_rows, 0.0);
    // Finals are grouped by row folder; each group writes a disjoint row range.
    std::vector<std::size_t> group_start{0};
    for (std::size_t q = 1; q < finals.size(); ++q)
        if (finals[q].row_off != finals[q - 1].row_off) group_start.push_back(q);
    group_start.push_back(finals.size());
    const auto ng = static_cast<std::int64_t>(group_start.size() - 1);
#pragma omp parallel for schedule(static)
    for (std::int64_t g = 0; g < ng; ++g) {
        for (std::size_t q = group_start[static_cast<std::size_t>(g)]; q < group_start[static_cast<std::size_t>(g) + 1];
             ++q) {
            const bf::FinalBlock& fb = finals[q];
            const double* in = x.data() + fb.in_off;
            for (std::size_t i = 0; i < fb.row_len; ++i) {
                const double* brow = fb.B.data() + i * fb.in_len;
                double s = 0.0;
                for (std::size_t j = 0; j < fb.in_len; ++j) s += brow[j] * in[j];
                y[fb.row_off + i] += s;
            }
        }
    }
    return row_perm.scatter(y);
}

StorageCount ButterflyFactorization::storage() const noexcept {
    StorageCount c{0, n_rows + n_cols};
    for (const bf::Level& L : levels)
        for (const bf::Block& b : L.blocks) {
            c += b.id.storage();
            c.indices += 2;
        }
    for (const bf::FinalBlock& fb : finals) {
        c.floats += fb.B.size();
        c.indices += 4;
    }
    return c;
}

}  // namespace gak
