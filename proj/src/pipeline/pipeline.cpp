#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <json.hpp>
#include <string>

#include "gak/error.hpp"
#include "gak/pairwise.hpp"
#include "gak/pipeline.hpp"
#include "gak/rng.hpp"

namespace gak {

using nlohmann::json;
namespace fs = std::filesystem;

Method parse_method(const std::string& s) {
    if (s == "butterfly") return Method::butterfly;
    if (s == "eghwt") return Method::eghwt;
    throw InvalidArgument("unknown method '" + s + "'");
}

Metric parse_metric(const std::string& s) {
    if (s == "emd") return Metric::emd;
    if (s == "corr") return Metric::corr;
    throw InvalidArgument("unknown metric '" + s + "'");
}

std::string to_string(Method m) { return m == Method::butterfly ? "butterfly" : "eghwt"; }
std::string to_string(Metric m) { return m == Metric::emd ? "emd" : "corr"; }

void RunConfig::validate() const {
    kernel.validate();
    weights.validate();
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidArgument("eps must lie in (0,1)");
    if (block_cap < 1) throw InvalidArgument("block_cap must be >= 1");
    if (trials < 1) throw InvalidArgument("trials must be >= 1");
    if (timing_reps < 1) throw InvalidArgument("timing_reps must be >= 1");
    if (!(cost_exponent > 0.0)) throw InvalidArgument("cost_exponent must be positive");
}

namespace {

// Re-throws with the stage name prefixed, keeping the error class.
template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
    const std::string tag = std::string("[") + name + "] ";
    try {
        return f();
    } catch (const NumericalError& e) {
        throw NumericalError(tag + e.what(), e.iterations());
    } catch (const FormatError& e) {
        throw FormatError(e.kind(), tag + e.what());
    } catch (const DimensionError& e) {
        throw DimensionError(tag + e.what());
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(tag + e.what());
    } catch (const Error& e) {
        throw Error(tag + e.what());
    }
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> uniform_vector(std::size_t n, SeededRng& rng) {
    std::vector<double> f(n);
    for (double& v : f) v = rng.uniform();
    return f;
}

}  // namespace

double measure_error(const DenseMatrix& K, const ApplyFn& fast_apply, std::size_t trials, std::uint64_t seed) {
    if (trials < 1) throw InvalidArgument("measure_error: trials must be >= 1");
    SeededRng rng = SeededRng::derive(seed, 7);
    double sum = 0.0;
    std::size_t used = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::vector<double> f = uniform_vector(K.cols(), rng);
        const std::vector<double> exact = matvec(K, f);
        const std::vector<double> approx = fast_apply(f);
        if (approx.size() != exact.size()) throw DimensionError("measure_error: fast apply returned wrong length");
        const double den = norm2(exact);
        if (den == 0.0) {
            std::cerr << "warning: measure_error trial " << t << " has K f = 0; skipped\n";
            continue;
        }
        std::vector<double> d(exact.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = exact[i] - approx[i];
        sum += norm2(d) / den;
        ++used;
    }
    if (used == 0) throw NumericalError("measure_error: K f = 0 in every trial");
    const double err = sum / static_cast<double>(used);
    if (!std::isfinite(err)) throw NumericalError("measure_error: non-finite error");
    return err;
}

ApplyTiming time_apply(const DenseMatrix& K, const ApplyFn& fast_apply, std::size_t reps, std::uint64_t seed) {
    SeededRng rng = SeededRng::derive(seed, 8);
    const std::vector<double> f = uniform_vector(K.cols(), rng);
    std::vector<double> y(K.rows());
    std::vector<double> td, tf;
    double sink = 0.0;
    for (std::size_t r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        par::matvec(K.data(), K.rows(), K.cols(), f.data(), y.data());
        td.push_back(seconds_since(t0));
        sink += y[0];
        t0 = std::chrono::steady_clock::now();
        const std::vector<double> z = fast_apply(f);
        tf.push_back(seconds_since(t0));
        sink += z[0];
    }
    if (!std::isfinite(sink)) throw NumericalError("time_apply: non-finite output");
    return {median(td), median(tf)};
}

AffinityMatrix initial_affinity(KernelFamily family, const DenseMatrix& K, const DenseMatrix& col_points) {
    if (family == KernelFamily::acoustic) return graph::gaussian_affinity(col_points);
    return graph::cosine_affinity(K);
}

LearnedGeometry learn_geometry(const DenseMatrix& K, const AffinityMatrix& W_init, const RunConfig& cfg) {
    LearnedGeometry g;
    QuestionnaireOptions q = cfg.questionnaire;
    q.seed = cfg.seed;
    g.coupled = stage("questionnaire", [&] { return run_questionnaire(K, W_init, cfg.metric, cfg.weights, q); });
    g.rows = stage("order", [&] { return order_tree(g.coupled.row_tree, g.coupled.row_affinity); });
    g.cols = stage("order", [&] { return order_tree(g.coupled.col_tree, g.coupled.col_affinity); });
    return g;
}

std::vector<double> CompressedOperator::apply(std::span<const double> f) const {
    if (butterfly) return butterfly->apply(f);
    if (ghwt) return ghwt->apply(f);
    throw InvalidArgument("CompressedOperator: empty");
}

StorageCount CompressedOperator::storage() const {
    if (butterfly) return butterfly->storage();
    if (ghwt) return ghwt->storage();
    return {};
}

ApplyFn CompressedOperator::fn() const {
    return [this](std::span<const double> f) { return apply(f); };
}

void CompressedOperator::save(const fs::path& dir) const {
    fs::create_directories(dir);
    write_text(dir / "method.txt", to_string(method) + "\n");
    if (butterfly) butterfly->save(dir);
    if (ghwt) ghwt->save(dir);
}

CompressedOperator CompressedOperator::load(const fs::path& dir) {
    CompressedOperator op;
    std::string m = read_text(dir / "method.txt");
    while (!m.empty() && (m.back() == '\n' || m.back() == '\r')) m.pop_back();
    op.method = parse_method(m);
    if (op.method == Method::butterfly)
        op.butterfly = ButterflyFactorization::load(dir);
    else
        op.ghwt = GhwtCompression::load(dir);
    return op;
}

CompressedOperator compress(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                            const RunConfig& cfg) {
    CompressedOperator op;
    op.method = cfg.method;
    if (cfg.method == Method::butterfly) {
        op.butterfly = stage("butterfly", [&] {
            return butterfly_factor(K, row_tree, col_tree, ButterflyOptions{cfg.eps, cfg.block_cap});
        });
    } else {
        op.ghwt = stage("eghwt", [&] {
            const BestBasis2D basis = best_basis_2d(K, row_tree, col_tree, cfg.cost_exponent);
            return threshold_compress(basis, row_tree, col_tree, basis.coefficient_norm(), cfg.eps);
        });
    }
    return op;
}

CompressionReport factorize_variants(const KernelMatrix& km, const KernelVariant& permuted,
                                     const LearnedGeometry& geom, const RunConfig& cfg,
                                     CompressedOperator* reorganized_out) {
    const DenseMatrix& Kp = permuted.K;
    CompressionReport r;
    r.family = to_string(cfg.kernel.family);
    r.method = to_string(cfg.method);
    r.N = cfg.kernel.N;
    r.rows = Kp.rows();
    r.cols = Kp.cols();
    r.matrix_mb = StorageCount{Kp.size(), 0}.megabytes();
    r.eps = cfg.eps;
    r.seed = cfg.seed;
    r.trial_count = cfg.trials;
    r.questionnaire_iterations = geom.coupled.iterations_run;

    CompressedOperator reorg = compress(Kp, geom.rows.tree, geom.cols.tree, cfg);
    const StorageCount s_reorg = reorg.storage();
    r.bytes_reorganized = s_reorg.bytes();
    r.compressed_mb_reorganized = s_reorg.megabytes();

    {
        const CompressedOperator perm =
            compress(Kp, PartitionTree::dyadic(Kp.rows()), PartitionTree::dyadic(Kp.cols()), cfg);
        const StorageCount s = perm.storage();
        r.bytes_permuted = s.bytes();
        r.compressed_mb_permuted = s.megabytes();
        if (!cfg.out_dir.empty()) perm.save(cfg.out_dir / "permuted");
    }
    if (cfg.with_natural) {
        const DenseMatrix Kn = km.natural();
        const CompressedOperator nat =
            compress(Kn, PartitionTree::dyadic(Kn.rows()), PartitionTree::dyadic(Kn.cols()), cfg);
        const StorageCount s = nat.storage();
        r.bytes_natural = s.bytes();
        r.compressed_mb_natural = s.megabytes();
        if (!cfg.out_dir.empty()) nat.save(cfg.out_dir / "natural");
    }

    const ApplyFn fast = reorg.fn();
    r.relative_l2_error = stage("measure", [&] { return measure_error(Kp, fast, cfg.trials, cfg.seed); });
    const ApplyTiming t = stage("timing", [&] { return time_apply(Kp, fast, cfg.timing_reps, cfg.seed); });
    r.direct_seconds = t.direct_seconds;
    r.fast_seconds = t.fast_seconds;

    if (!cfg.out_dir.empty()) {
        reorg.save(cfg.out_dir / "reorganized");
        write_text(cfg.out_dir / artifacts::report, r.to_json());
    }
    if (reorganized_out) *reorganized_out = std::move(reorg);
    return r;
}

RunResult run_factorization(const RunConfig& cfg) {
    stage("config", [&] {
        cfg.validate();
        return 0;
    });
    RunResult res;
    res.kernel = stage("kernel", [&] { return generate_kernel(cfg.kernel); });
    res.variants = shuffle_variants(res.kernel.K, cfg.seed);
    const KernelVariant& p = res.variants.permuted;
    if (!cfg.out_dir.empty()) {
        fs::create_directories(cfg.out_dir);
        write_kmat(cfg.out_dir / artifacts::kernel, res.kernel.K);
        write_text(cfg.out_dir / artifacts::sidecar, res.kernel.sidecar_json(cfg.kernel));
        save_permutation(cfg.out_dir / artifacts::permutation, p);
    }
    std::vector<std::size_t> dims(res.kernel.col_points.cols());
    for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = i;
    const DenseMatrix col_points = res.kernel.col_points.select(p.cols.map(), dims);
    const AffinityMatrix W0 =
        stage("initial-affinity", [&] { return initial_affinity(cfg.kernel.family, p.K, col_points); });
    res.geometry = learn_geometry(p.K, W0, cfg);
    if (!cfg.out_dir.empty()) {
        save_geometry(cfg.out_dir / artifacts::geometry, res.geometry.coupled);
        save_order(cfg.out_dir / artifacts::order, res.geometry.rows, res.geometry.cols);
    }
    res.report = factorize_variants(res.kernel, p, res.geometry, cfg, &res.reorganized);
    return res;
}

void save_permutation(const fs::path& path, const KernelVariant& v) {
    json j;
    j["rows"] = v.rows.map();
    j["cols"] = v.cols.map();
    write_text(path, j.dump());
}

KernelVariant load_permutation(const fs::path& path, const DenseMatrix& K) {
    try {
        const json j = json::parse(read_text(path));
        KernelVariant v;
        v.rows = Permutation(j.at("rows").get<std::vector<std::size_t>>());
        v.cols = Permutation(j.at("cols").get<std::vector<std::size_t>>());
        if (v.rows.size() != K.rows() || v.cols.size() != K.cols())
            throw DimensionError("permutation file does not match the kernel shape");
        v.K = permute_matrix(K, v.rows, v.cols);
        return v;
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("permutation file: ") + e.what());
    }
}

void save_geometry(const fs::path& dir, const CoupledGeometry& g) {
    fs::create_directories(dir);
    write_text(dir / "row_tree.json", g.row_tree.to_json());
    write_text(dir / "col_tree.json", g.col_tree.to_json());
    write_kmat(dir / "row_affinity.kmat", g.row_affinity.matrix());
    write_kmat(dir / "col_affinity.kmat", g.col_affinity.matrix());
    write_text(dir / "iterations.txt", std::to_string(g.iterations_run) + "\n");
}

CoupledGeometry load_geometry(const fs::path& dir) {
    CoupledGeometry g;
    g.row_tree = PartitionTree::from_json(read_text(dir / "row_tree.json"));
    g.col_tree = PartitionTree::from_json(read_text(dir / "col_tree.json"));
    g.row_affinity = AffinityMatrix(read_kmat(dir / "row_affinity.kmat"));
    g.col_affinity = AffinityMatrix(read_kmat(dir / "col_affinity.kmat"));
    g.iterations_run = std::stoul(read_text(dir / "iterations.txt"));
    return g;
}

void save_order(const fs::path& dir, const OrderedTree& rows, const OrderedTree& cols) {
    fs::create_directories(dir);
    write_text(dir / "row_tree.json", rows.tree.to_json());
    write_text(dir / "col_tree.json", cols.tree.to_json());
}

std::pair<OrderedTree, OrderedTree> load_order(const fs::path& dir) {
    OrderedTree r, c;
    r.tree = PartitionTree::from_json(read_text(dir / "row_tree.json"));
    r.order = r.tree.leaf_order();
    c.tree = PartitionTree::from_json(read_text(dir / "col_tree.json"));
    c.order = c.tree.leaf_order();
    return {std::move(r), std::move(c)};
}

std::vector<BenchRow> bench_sweep(KernelFamily family, std::span<const std::size_t> N_list, Method method,
                                  const RunConfig& base) {
    std::vector<BenchRow> rows;
    for (std::size_t N : N_list) {
        RunConfig cfg = base;
        cfg.kernel.family = family;
        cfg.kernel.N = N;
        cfg.method = method;
        if (!base.out_dir.empty()) cfg.out_dir = base.out_dir / ("N" + std::to_string(N));
        BenchRow row;
        row.N = N;
        try {
            row.report = run_factorization(cfg).report;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace gak
