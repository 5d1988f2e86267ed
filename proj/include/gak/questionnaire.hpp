#pragma once

#include <cstddef>
#include <cstdint>

#include "gak/graph.hpp"
#include "gak/tree.hpp"
#include "gak/tree_affinity.hpp"

namespace gak {

struct CoupledGeometry {
    PartitionTree row_tree;
    PartitionTree col_tree;
    AffinityMatrix row_affinity;
    AffinityMatrix col_affinity;
    std::size_t iterations_run = 0;
};

struct QuestionnaireOptions {
    std::size_t max_iters = 3;
    double tolerance = 1e-3;
    std::size_t leaf_max = 1;
    std::uint64_t seed = 0;
};

// ||W_next - W_prev||_F / ||W_prev||_F
double affinity_delta(const AffinityMatrix& W_prev, const AffinityMatrix& W_next);

// Alternating refinement: column tree from W_init, then row dual affinity ->
// row tree, column dual affinity -> column tree, repeated.
CoupledGeometry run_questionnaire(const DenseMatrix& K, const AffinityMatrix& W_init, Metric metric,
                                  const TreeWeightParams& params, const QuestionnaireOptions& opts = {});

}  // namespace gak
