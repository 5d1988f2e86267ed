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

// Unit-area dyadic tile: time [k 2^-j, (k+1) 2^-j), band [n 2^j, (n+1) 2^j).
// In a tree dictionary j is the level, k the folder and n the tag.
struct Tile {
    std::uint32_t j = 0;
    std::uint32_t k = 0;
    std::uint32_t n = 0;

    double time_lo() const noexcept;
    double time_hi() const noexcept;
    double band_lo() const noexcept;
    double band_hi() const noexcept;
    friend bool operator==(const Tile&, const Tile&) = default;
};

// True when two tiles do not overlap as time-frequency rectangles.
bool tiles_disjoint(const Tile& a, const Tile& b) noexcept;

namespace ghwt {

// Samples of W_n on a dyadic grid of `grid_size` points.
std::vector<double> walsh_function(std::size_t n, std::size_t grid_size);

// Orthonormal Walsh-Hadamard transform in natural (Hadamard) order; an involution.
std::vector<double> fwht(std::span<const double> f);

// Index in Hadamard order of the Walsh function with n sign changes, length 2^L.
std::size_t sequency_to_hadamard(std::size_t n, std::size_t L);

// c[n] = <f, W_n> / sqrt(N), n in sequency order.
std::vector<double> walsh_transform(std::span<const double> f);

// The tree completed to a full binary tree of depth ceil(log2 n): leaves of
// size >= 2 are halved and singletons get an empty sibling. Folder (l, k)
// covers leaf-order positions [start, start + size).
class GhwtLayout {
public:
    GhwtLayout() = default;
    explicit GhwtLayout(const PartitionTree& T);

    std::size_t n() const noexcept { return order_.size(); }
    std::size_t depth() const noexcept { return L_; }
    std::size_t start(std::size_t level, std::size_t k) const { return start_[level][k]; }
    std::size_t size(std::size_t level, std::size_t k) const { return size_[level][k]; }
    const Permutation& order() const noexcept { return order_; }
    // Folder sizes, level by level; enough to rebuild the layout with order().
    std::vector<std::size_t> sizes_flat() const;
    static GhwtLayout from_sizes(const Permutation& order, std::span<const std::size_t> sizes_flat);

    bool tile_exists(const Tile& t) const { return t.n < size(t.j, t.k); }
    std::size_t position(const Tile& t) const { return start(t.j, t.k) + t.n; }
    Tile tile_at(std::size_t level, std::size_t pos) const;

private:
    std::size_t L_ = 0;
    Permutation order_;
    std::vector<std::vector<std::size_t>> start_;
    std::vector<std::vector<std::size_t>> size_;
};

// (depth+1) x n coefficients: entry [l][start(l,k) + tag].
struct GhwtTable {
    std::size_t levels = 0;
    std::size_t n = 0;
    std::vector<double> c;

    double at(std::size_t level, std::size_t pos) const { return c[level * n + pos]; }
    std::span<const double> level(std::size_t l) const { return {c.data() + l * n, n}; }
};

// Full table from a vector already in leaf order; `table` holds (L+1) n values.
void analyze_leaf(const GhwtLayout& G, const double* f_leaf, double* table);
// Sum of every table entry times its atom, returned in leaf order.
std::vector<double> synthesize_leaf(const GhwtLayout& G, std::span<const double> table);

// f in original index order.
GhwtTable ghwt_analyze(std::span<const double> f, const GhwtLayout& G);
// Atom of (level, pos) in original index order.
std::vector<double> atom(const GhwtLayout& G, std::size_t level, std::size_t pos);

}  // namespace ghwt

struct GhwtDictionary {
    PartitionTree tree;
    ghwt::GhwtTable table;
};

GhwtDictionary ghwt_analyze(std::span<const double> f, const PartitionTree& T);

// Row tile q (over the row tree) paired with column tile p (over the column tree).
struct TilePair {
    Tile q;
    Tile p;
    double coef = 0.0;
};

struct BestBasis2D {
    std::vector<TilePair> tiling;  // every pair of the chosen basis with its coefficient
    double cost = 0.0;
    double coefficient_norm() const;  // sqrt(sum coef^2), summed smallest first
};

BestBasis2D best_basis_2d(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                          double cost_exponent = 1.0);

// Cost of the basis made of all row tiles at level ly and all column tiles at level lx.
double level_basis_cost(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                        std::size_t ly, std::size_t lx, double cost_exponent = 1.0);

class GhwtCompression {
public:
    ghwt::GhwtLayout row_layout;
    ghwt::GhwtLayout col_layout;
    std::vector<std::pair<Tile, Tile>> best_tiling;  // not persisted by save()
    std::vector<TilePair> retained;  // |coef| descending
    double frobenius_norm_K = 0.0;
    double eps = 0.0;
    double dropped_norm = 0.0;

    std::size_t n_kept() const noexcept { return retained.size(); }
    std::vector<double> apply(std::span<const double> f) const;
    DenseMatrix reconstruct() const;
    StorageCount storage() const noexcept;

    void save(const std::filesystem::path& dir) const;
    static GhwtCompression load(const std::filesystem::path& dir);
};

// Smallest prefix of |coef|-sorted coefficients with dropped l2 norm <= eps * K_frobenius.
GhwtCompression threshold_compress(const BestBasis2D& basis, const PartitionTree& row_tree,
                                   const PartitionTree& col_tree, double K_frobenius, double eps);

inline std::vector<double> ghwt_apply(const GhwtCompression& C, std::span<const double> f) { return C.apply(f); }

}  // namespace gak
