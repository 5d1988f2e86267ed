#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "gak/dense_matrix.hpp"
#include "gak/io.hpp"
#include "gak/permutation.hpp"
#include "gak/tree.hpp"

namespace gak {

// A ~ A[:, skeleton_cols] * P
struct InterpDecomp {
    std::vector<std::size_t> skeleton_cols;
    DenseMatrix P;  // r x n
    std::size_t rank() const noexcept { return skeleton_cols.size(); }
};

InterpDecomp interpolative_decomposition(const DenseMatrix& A, double eps);

namespace bf {

// Compact interpolation operator: y = x[skel] + T * x[red].
struct InterpBlock {
    std::size_t n_in = 0;
    bool identity = false;
    std::vector<std::uint32_t> skel;
    std::vector<std::uint32_t> red;
    std::vector<double> T;  // skel.size() x red.size(), row-major

    std::size_t rank() const noexcept { return identity ? n_in : skel.size(); }
    void apply(const double* x, double* y) const;
    DenseMatrix dense() const;
    StorageCount storage() const noexcept;
};

// Column-pivoted QR with rank cut |R_kk| <= eps |R_11|, followed by
// Gu-Eisenstat swaps (f = 2), so |T| <= 2 and
// ||A - A[:,skel] P||_2 <= sqrt(1 + 4 r (n - r)) sigma_{r+1}.
// A is column-major, m x n, with leading dimension m.
InterpBlock interp_block(const double* A, std::size_t m, std::size_t n, double eps);

struct Block {
    InterpBlock id;
    std::size_t in_off = 0;  // input range in the previous level's buffer
    std::size_t in_len = 0;
    std::size_t out_off = 0;
    std::vector<std::size_t> skel_global;  // original column indices of the skeleton
};

struct Level {
    std::vector<Block> blocks;
    std::size_t buffer_len = 0;
};

struct FinalBlock {
    std::size_t row_off = 0;  // range in row leaf order
    std::size_t row_len = 0;
    std::size_t in_off = 0;  // range in the last level's buffer
    std::size_t in_len = 0;
    std::vector<double> B;  // row_len x in_len, row-major
};

}  // namespace bf

struct ButterflyOptions {
    double eps = 1e-10;
    std::size_t block_cap = 32;
};

class ButterflyFactorization {
public:
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::size_t start_level = 0;  // column-tree level of the initial blocks
    std::size_t passes = 0;       // merge passes performed
    Permutation row_perm;         // row leaf order
    Permutation col_perm;         // column leaf order
    std::vector<bf::Level> levels;
    std::vector<bf::FinalBlock> finals;

    std::vector<double> apply(std::span<const double> f) const;
    StorageCount storage() const noexcept;

    void save(const std::filesystem::path& dir) const;
    static ButterflyFactorization load(const std::filesystem::path& dir);
};

// Coarsest column-tree level whose folders all have at most block_cap members.
std::size_t butterfly_start_level(const PartitionTree& col_tree, std::size_t block_cap);

ButterflyFactorization butterfly_factor(const DenseMatrix& K, const PartitionTree& row_tree,
                                        const PartitionTree& col_tree, const ButterflyOptions& opts = {});

inline std::vector<double> butterfly_apply(const ButterflyFactorization& F, std::span<const double> f) {
    return F.apply(f);
}

}  // namespace gak
