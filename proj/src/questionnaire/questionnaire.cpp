#include "gak/questionnaire.hpp"

#include <cmath>

#include "gak/error.hpp"

namespace gak {

double affinity_delta(const AffinityMatrix& W_prev, const AffinityMatrix& W_next) {
    if (W_prev.size() != W_next.size()) throw DimensionError("affinity_delta: dimension mismatch");
    const auto& a = W_prev.matrix().values();
    const auto& b = W_next.matrix().values();
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += (b[i] - a[i]) * (b[i] - a[i]);
        den += a[i] * a[i];
    }
    if (den == 0.0) throw NumericalError("affinity_delta: previous affinity is zero");
    return std::sqrt(num / den);
}

CoupledGeometry run_questionnaire(const DenseMatrix& K, const AffinityMatrix& W_init, Metric metric,
                                  const TreeWeightParams& params, const QuestionnaireOptions& opts) {
    if (W_init.size() != K.cols())
        throw DimensionError("run_questionnaire: initial affinity does not match column count");
    if (opts.max_iters < 1) throw InvalidArgument("run_questionnaire: max_iters must be >= 1");
    params.validate();

    TreeOptions topt;
    topt.mode = SplitMode::median;
    topt.leaf_max = opts.leaf_max;
    topt.seed = opts.seed;

    CoupledGeometry g;
    g.col_tree = build_tree(W_init, topt);
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        topt.seed = opts.seed + 2 * it + 1;
        AffinityMatrix row_aff = treeaff::dual_affinity(K, g.col_tree, metric, params, Axis::rows);
        g.row_tree = build_tree(row_aff, topt);
        topt.seed = opts.seed + 2 * it + 2;
        AffinityMatrix col_aff = treeaff::dual_affinity(K, g.row_tree, metric, params, Axis::cols);
        g.col_tree = build_tree(col_aff, topt);

        const bool converged = it > 0 && affinity_delta(g.row_affinity, row_aff) < opts.tolerance &&
                               affinity_delta(g.col_affinity, col_aff) < opts.tolerance;
        g.row_affinity = std::move(row_aff);
        g.col_affinity = std::move(col_aff);
        g.iterations_run = it + 1;
        if (converged) break;
    }
    return g;
}

}  // namespace gak
