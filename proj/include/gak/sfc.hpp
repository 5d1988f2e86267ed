#pragma once

#include <string>

#include "gak/dense_matrix.hpp"
#include "gak/graph.hpp"
#include "gak/permutation.hpp"
#include "gak/tree.hpp"

namespace gak {

struct OrderedTree {
    PartitionTree tree;
    Permutation order;  // in-order leaf traversal of `tree`
};

// Orients every sibling pair level by level, parents left to right, by
// comparing the children's affinity to the folder already placed on their
// left and to the parent's right neighbour.
OrderedTree order_tree(const PartitionTree& T, const AffinityMatrix& W);

// Points (rows) in traversal order, header x0,x1,...
std::string curve_path_csv(const DenseMatrix& points, const Permutation& perm);

}  // namespace gak
