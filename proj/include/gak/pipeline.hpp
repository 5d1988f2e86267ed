#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gak/butterfly.hpp"
#include "gak/dense_matrix.hpp"
#include "gak/ghwt.hpp"
#include "gak/kernels.hpp"
#include "gak/questionnaire.hpp"
#include "gak/sfc.hpp"
#include "gak/tree_affinity.hpp"

namespace gak {

enum class Method { butterfly, eghwt };

Method parse_method(const std::string& s);
Metric parse_metric(const std::string& s);
std::string to_string(Method m);
std::string to_string(Metric m);

struct RunConfig {
    KernelSpec kernel;
    Metric metric = Metric::emd;
    TreeWeightParams weights = default_weight_params(Metric::emd);
    QuestionnaireOptions questionnaire;
    Method method = Method::butterfly;
    double eps = 1e-10;
    std::size_t block_cap = 32;
    double cost_exponent = 1.0;
    std::size_t trials = 100;
    std::size_t timing_reps = 20;
    bool with_natural = true;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir;  // empty: keep everything in memory

    void validate() const;
};

struct CompressionReport {
    std::string family;
    std::string method;
    std::size_t N = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    double matrix_mb = 0.0;
    std::size_t bytes_permuted = 0;
    std::size_t bytes_reorganized = 0;
    std::optional<std::size_t> bytes_natural;
    double compressed_mb_permuted = 0.0;
    double compressed_mb_reorganized = 0.0;
    std::optional<double> compressed_mb_natural;
    double direct_seconds = 0.0;
    double fast_seconds = 0.0;
    double relative_l2_error = 0.0;
    double eps = 0.0;
    std::uint64_t seed = 0;
    std::size_t trial_count = 0;
    std::size_t questionnaire_iterations = 0;

    std::string to_json() const;
    static std::vector<std::string> csv_header();
    std::vector<double> csv_row() const;
};

using ApplyFn = std::function<std::vector<double>(std::span<const double>)>;

// Mean of ||K f - fast(f)|| / ||K f|| over f uniform in [0,1]^n; trials
// with K f = 0 are skipped with a warning on stderr.
double measure_error(const DenseMatrix& K, const ApplyFn& fast_apply, std::size_t trials, std::uint64_t seed);

struct ApplyTiming {
    double direct_seconds = 0.0;  // median dense matvec
    double fast_seconds = 0.0;    // median fast apply
};
ApplyTiming time_apply(const DenseMatrix& K, const ApplyFn& fast_apply, std::size_t reps, std::uint64_t seed);

// Column-side starting affinity: Gaussian on the sources for the acoustic
// family, cosine similarity of the columns otherwise.
AffinityMatrix initial_affinity(KernelFamily family, const DenseMatrix& K, const DenseMatrix& col_points);

struct LearnedGeometry {
    CoupledGeometry coupled;
    OrderedTree rows;
    OrderedTree cols;
};

LearnedGeometry learn_geometry(const DenseMatrix& K, const AffinityMatrix& W_init, const RunConfig& cfg);

class CompressedOperator {
public:
    Method method = Method::butterfly;
    std::optional<ButterflyFactorization> butterfly;
    std::optional<GhwtCompression> ghwt;

    std::vector<double> apply(std::span<const double> f) const;
    StorageCount storage() const;
    ApplyFn fn() const;

    void save(const std::filesystem::path& dir) const;
    static CompressedOperator load(const std::filesystem::path& dir);
};

CompressedOperator compress(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                            const RunConfig& cfg);

struct RunResult {
    CompressionReport report;
    KernelMatrix kernel;
    ShuffledVariants variants;  // input of the geometry stage is variants.permuted
    LearnedGeometry geometry;
    CompressedOperator reorganized;
};

// Generate, shuffle, learn geometry, order, compress the reorganized,
// permuted and (optionally) natural variants, measure error and timing.
// Writes the artifact layout below when cfg.out_dir is set.
RunResult run_factorization(const RunConfig& cfg);

// Artifact layout inside an output directory.
namespace artifacts {
inline constexpr const char* kernel = "kernel.kmat";
inline constexpr const char* sidecar = "kernel.json";
inline constexpr const char* permutation = "permuted.json";
inline constexpr const char* geometry = "geometry";
inline constexpr const char* order = "order";
inline constexpr const char* report = "report.json";
inline constexpr const char* plots = "plots";
}  // namespace artifacts

// Stage helpers shared by run_factorization and the CLI.
void save_permutation(const std::filesystem::path& path, const KernelVariant& v);
KernelVariant load_permutation(const std::filesystem::path& path, const DenseMatrix& K);
void save_geometry(const std::filesystem::path& dir, const CoupledGeometry& g);
CoupledGeometry load_geometry(const std::filesystem::path& dir);
void save_order(const std::filesystem::path& dir, const OrderedTree& rows, const OrderedTree& cols);
std::pair<OrderedTree, OrderedTree> load_order(const std::filesystem::path& dir);

// Runs every stage from the kernel matrix onwards, reading nothing from disk.
CompressionReport factorize_variants(const KernelMatrix& km, const KernelVariant& permuted,
                                     const LearnedGeometry& geom, const RunConfig& cfg,
                                     CompressedOperator* reorganized_out = nullptr);

struct BenchRow {
    std::size_t N = 0;
    std::optional<CompressionReport> report;
    std::string error;
};

std::vector<BenchRow> bench_sweep(KernelFamily family, std::span<const std::size_t> N_list, Method method,
                                  const RunConfig& base);
std::string bench_csv(std::span<const BenchRow> rows);
std::string bench_json(std::span<const BenchRow> rows);

struct PlotOptions {
    std::size_t embedding_dim = 3;
    std::size_t ratio_points = 20;
};

// Reads kernel, permutation, geometry and order artifacts from `dir`,
// writes CSVs under dir/plots and returns their paths.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& dir, const RunConfig& cfg,
                                                  const PlotOptions& opts = {});

// Relative Frobenius error (percent) after keeping the largest round(r * total)
// coefficients of the best basis, for each r in `ratios`.
std::vector<double> error_vs_ratio(const BestBasis2D& basis, double K_frobenius, std::span<const double> ratios);

}  // namespace gak
