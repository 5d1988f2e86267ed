#pragma once

#include <cstddef>
#include <span>

#include "gak/dense_matrix.hpp"
#include "gak/graph.hpp"
#include "gak/tree.hpp"

namespace gak {

enum class Metric { emd, corr };
enum class FolderNorm { l1, l2 };
enum class Axis { rows, cols };

// omega(V) = 2^(-alpha * level) * |V|^beta
struct TreeWeightParams {
    double alpha = 0.5;
    double beta = 1.0;
    double epsilon_scale = 1.0;
    FolderNorm norm = FolderNorm::l1;
    bool normalize_rows = false;

    void validate() const;
};

// EMD keeps (0.5, 1). For corr, omega divides, so the per-level weight goes
// like 2^(l(1 + alpha + beta)); (-1, 0) weights every level equally.
TreeWeightParams default_weight_params(Metric metric);

namespace treeaff {

double folder_weight(std::size_t level, std::size_t size, const TreeWeightParams& p);
double folder_weight(const Folder& f, const TreeWeightParams& p);

// sum over all folders V of ||f(V) - g(V)|| * omega(V) / |V|
double emd_tree_distance(std::span<const double> f, std::span<const double> g, const PartitionTree& T,
                         const TreeWeightParams& p);

// Pairwise EMDs between the rows of F (each row is a function on T's index set).
DenseMatrix emd_distance_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p);

AffinityMatrix emd_affinity_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p);
AffinityMatrix corr_affinity_matrix(const DenseMatrix& F, const PartitionTree& T, const TreeWeightParams& p);

// Axis::rows: affinity between rows of K using a tree on its columns.
// Axis::cols: affinity between columns of K using a tree on its rows.
AffinityMatrix dual_affinity(const DenseMatrix& K, const PartitionTree& T, Metric metric,
                             const TreeWeightParams& p, Axis axis = Axis::rows);

}  // namespace treeaff
}  // namespace gak
