#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <string>

#include "gak/error.hpp"
#include "gak/pipeline.hpp"

namespace gak {

using nlohmann::json;
namespace fs = std::filesystem;

std::string CompressionReport::to_json() const {
    json j;
    j["family"] = family;
    j["method"] = method;
    j["N"] = N;
    j["rows"] = rows;
    j["cols"] = cols;
    j["matrix_mb"] = matrix_mb;
    j["compressed_bytes_permuted"] = bytes_permuted;
    j["compressed_bytes_reorganized"] = bytes_reorganized;
    j["compressed_mb_permuted"] = compressed_mb_permuted;
    j["compressed_mb_reorganized"] = compressed_mb_reorganized;
    if (bytes_natural) j["compressed_bytes_natural"] = *bytes_natural;
    if (compressed_mb_natural) j["compressed_mb_natural"] = *compressed_mb_natural;
    j["direct_seconds"] = direct_seconds;
    j["fast_seconds"] = fast_seconds;
    j["relative_l2_error"] = relative_l2_error;
    j["eps"] = eps;
    j["seed"] = seed;
    j["trial_count"] = trial_count;
    j["questionnaire_iterations"] = questionnaire_iterations;
    return j.dump(2) + "\n";
}

std::vector<std::string> CompressionReport::csv_header() {
    return {"N",           "matrix_mb",     "compressed_mb_permuted", "compressed_mb_reorganized",
            "compressed_mb_natural", "direct_seconds", "fast_seconds", "relative_l2_error"};
}

std::vector<double> CompressionReport::csv_row() const {
    return {static_cast<double>(N),
            matrix_mb,
            compressed_mb_permuted,
            compressed_mb_reorganized,
            compressed_mb_natural.value_or(NAN),
            direct_seconds,
            fast_seconds,
            relative_l2_error};
}

std::string bench_csv(std::span<const BenchRow> rows) {
    CsvTable t;
    for (const BenchRow& r : rows) {
        if (r.report) {
            t.push_back(r.report->csv_row());
        } else {
            std::vector<double> v(CompressionReport::csv_header().size(), NAN);
            v[0] = static_cast<double>(r.N);
            t.push_back(std::move(v));
        }
    }
    const auto header = CompressionReport::csv_header();
    return to_csv(t, header);
}

std::string bench_json(std::span<const BenchRow> rows) {
    json out = json::array();
    for (const BenchRow& r : rows) {
        json j;
        j["N"] = r.N;
        if (r.report)
            j["report"] = json::parse(r.report->to_json());
        else
            j["error"] = r.error;
        out.push_back(std::move(j));
    }
    return out.dump(2) + "\n";
}

std::vector<double> error_vs_ratio(const BestBasis2D& basis, double K_frobenius, std::span<const double> ratios) {
    if (!(K_frobenius > 0.0)) throw InvalidArgument("error_vs_ratio: matrix norm must be positive");
    std::vector<double> sq;
    sq.reserve(basis.tiling.size());
    for (const TilePair& t : basis.tiling) sq.push_back(t.coef * t.coef);
    std::sort(sq.begin(), sq.end());  // ascending: the tail comes first
    // tail[i] = sum of the i smallest squares
    std::vector<double> tail(sq.size() + 1, 0.0);
    for (std::size_t i = 0; i < sq.size(); ++i) tail[i + 1] = tail[i] + sq[i];
    std::vector<double> out;
    for (double r : ratios) {
        if (!(r >= 0.0 && r <= 1.0)) throw InvalidArgument("error_vs_ratio: ratio outside [0,1]");
        const auto kept = static_cast<std::size_t>(std::llround(r * static_cast<double>(sq.size())));
        out.push_back(100.0 * std::sqrt(tail[sq.size() - kept]) / K_frobenius);
    }
    return out;
}

namespace {

void require(const fs::path& p) {
    if (!fs::exists(p)) throw FormatError(FormatError::Kind::io, "missing artifact " + p.string());
}

std::string embedding_csv(const EmbeddingCoords& e, const Permutation& order) {
    const std::size_t n = e.coords.rows(), d = e.coords.cols();
    std::vector<std::size_t> rank(n);
    for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i;
    std::vector<std::string> header{"index", "sfc_rank"};
    for (std::size_t c = 0; c < d; ++c) header.push_back("psi" + std::to_string(c + 1));
    CsvTable t;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row{static_cast<double>(i), static_cast<double>(rank[i])};
        for (std::size_t c = 0; c < d; ++c) row.push_back(e.coords(i, c));
        t.push_back(std::move(row));
    }
    return to_csv(t, header);
}

}  // namespace

std::vector<fs::path> emit_plot_data(const fs::path& dir, const RunConfig& cfg, const PlotOptions& opts) {
    for (const char* a : {artifacts::kernel, artifacts::sidecar, artifacts::permutation}) require(dir / a);
    require(dir / artifacts::geometry / "row_affinity.kmat");
    require(dir / artifacts::order / "row_tree.json");
    if (opts.ratio_points < 1) throw InvalidArgument("plot-data: need at least one ratio point");

    const DenseMatrix K = read_kmat(dir / artifacts::kernel);
    const KernelVariant perm = load_permutation(dir / artifacts::permutation, K);
    const CoupledGeometry g = load_geometry(dir / artifacts::geometry);
    const auto [row_order, col_order] = load_order(dir / artifacts::order);
    Permutation row_nat, col_nat;
    try {
        const json side = json::parse(read_text(dir / artifacts::sidecar));
        row_nat = Permutation(side.at("row_natural").get<std::vector<std::size_t>>());
        col_nat = Permutation(side.at("col_natural").get<std::vector<std::size_t>>());
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("sidecar: ") + e.what());
    }

    const fs::path out = dir / artifacts::plots;
    fs::create_directories(out);
    std::vector<fs::path> written;
    auto emit = [&](const std::string& name, const std::string& text) {
        write_text(out / name, text);
        written.push_back(out / name);
    };

    const EmbeddingCoords er = graph::diffusion_embedding(g.row_affinity, opts.embedding_dim);
    const EmbeddingCoords ec = graph::diffusion_embedding(g.col_affinity, opts.embedding_dim);
    emit("embedding_rows.csv", embedding_csv(er, row_order.order));
    emit("embedding_cols.csv", embedding_csv(ec, col_order.order));
    emit("sfc_rows.csv", curve_path_csv(er.coords, row_order.order));
    emit("sfc_cols.csv", curve_path_csv(ec.coords, col_order.order));

    std::vector<double> ratios(opts.ratio_points);
    for (std::size_t i = 0; i < ratios.size(); ++i)
        ratios[i] = static_cast<double>(i + 1) / static_cast<double>(ratios.size());
    const double fro = K.frobenius_norm();
    const DenseMatrix Kn = permute_matrix(K, row_nat, col_nat);
    const auto nat = error_vs_ratio(
        best_basis_2d(Kn, PartitionTree::dyadic(Kn.rows()), PartitionTree::dyadic(Kn.cols()), cfg.cost_exponent),
        fro, ratios);
    const auto prm = error_vs_ratio(best_basis_2d(perm.K, PartitionTree::dyadic(K.rows()),
                                                  PartitionTree::dyadic(K.cols()), cfg.cost_exponent),
                                    fro, ratios);
    const auto reo =
        error_vs_ratio(best_basis_2d(perm.K, row_order.tree, col_order.tree, cfg.cost_exponent), fro, ratios);
    CsvTable t;
    for (std::size_t i = 0; i < ratios.size(); ++i) t.push_back({ratios[i], nat[i], prm[i], reo[i]});
    const std::vector<std::string> header{"ratio", "error_pct_natural", "error_pct_permuted",
                                          "error_pct_reorganized"};
    emit("error_vs_ratio.csv", to_csv(t, header));
    return written;
}

}  // namespace gak
