// gak: command-line driver. Exit codes: 0 success, 1 usage or bad input,
// 2 numerical failure.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "gak/core.hpp"
#include "gak/error.hpp"
#include "gak/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gak;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    std::string out_dir = "gak_out";
    std::string method = "butterfly";
    double eps = -1.0;  // method default when unset
    std::string metric;  // family default when unset
    double alpha = NAN;
    double beta = NAN;
    double eps_scale = NAN;
    std::size_t iters = 3;
    std::size_t block_cap = 32;
    std::size_t trials = 100;
};

RunConfig make_config(const Globals& g) {
    RunConfig c;
    c.seed = g.seed;
    c.kernel.seed = g.seed;
    c.out_dir = g.out_dir;
    c.method = parse_method(g.method);
    c.eps = g.eps > 0.0 ? g.eps : (c.method == Method::butterfly ? 1e-10 : 5e-2);
    c.questionnaire.max_iters = g.iters;
    c.block_cap = g.block_cap;
    c.trials = g.trials;
    return c;
}

// Sine and spherical kernels learn best with corr, acoustic kernels with EMD.
void resolve_metric(RunConfig& c, const Globals& g) {
    if (!g.metric.empty())
        c.metric = parse_metric(g.metric);
    else
        c.metric = c.kernel.family == KernelFamily::acoustic ? Metric::emd : Metric::corr;
    c.weights = default_weight_params(c.metric);
    if (!std::isnan(g.alpha)) c.weights.alpha = g.alpha;
    if (!std::isnan(g.beta)) c.weights.beta = g.beta;
    if (!std::isnan(g.eps_scale)) c.weights.epsilon_scale = g.eps_scale;
}

fs::path sidecar_for(const fs::path& kmat) {
    fs::path p = kmat;
    return p.replace_extension(".json");
}

struct Sidecar {
    KernelSpec spec;
    KernelMatrix meta;  // K left empty
};

Sidecar read_sidecar(const fs::path& path) {
    Sidecar s;
    try {
        const auto j = nlohmann::json::parse(read_text(path));
        s.spec.family = parse_family(j.at("family"));
        s.spec.N = j.at("N");
        s.spec.nu = j.at("nu");
        s.spec.sampling = parse_sampling(j.at("sampling"));
        s.spec.seed = j.at("seed");
        auto points = [](const nlohmann::json& a) {
            const std::size_t n = a.size(), d = n ? a[0].size() : 0;
            DenseMatrix P(n, d);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t c = 0; c < d; ++c) P(i, c) = a[i][c].get<double>();
            return P;
        };
        s.meta.row_points = points(j.at("row_points"));
        s.meta.col_points = points(j.at("col_points"));
        s.meta.row_natural = Permutation(j.at("row_natural").get<std::vector<std::size_t>>());
        s.meta.col_natural = Permutation(j.at("col_natural").get<std::vector<std::size_t>>());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, "sidecar " + path.string() + ": " + e.what());
    }
    return s;
}

std::vector<double> read_vector(const fs::path& path) {
    const CsvTable t = parse_csv(read_text(path), false);
    std::vector<double> v;
    for (const auto& row : t) v.insert(v.end(), row.begin(), row.end());
    return v;
}

void print_report(const CompressionReport& r) { std::cout << r.to_json(); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Geometry-adaptive kernel factorization"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--seed", g.seed, "RNG seed");
    app.add_option("--out-dir", g.out_dir, "artifact directory");
    app.add_option("--method", g.method, "butterfly or eghwt")->check(CLI::IsMember({"butterfly", "eghwt"}));
    app.add_option("--eps", g.eps, "precision (default 1e-10 butterfly, 5e-2 eghwt)");
    app.add_option("--metric", g.metric, "tree metric (default corr for sine/spherical, emd for acoustic)")->check(CLI::IsMember({"emd", "corr"}));
    app.add_option("--alpha", g.alpha, "folder weight level exponent");
    app.add_option("--beta", g.beta, "folder weight size exponent");
    app.add_option("--eps-scale", g.eps_scale, "EMD affinity bandwidth scale");
    app.add_option("--iters", g.iters, "questionnaire iterations");
    app.add_option("--block-cap", g.block_cap, "butterfly leaf block cap");
    app.add_option("--trials", g.trials, "error trials");

    std::string family = "sine", sampling = "random", kernel_path, out_path, input, output, sizes = "256,512";
    std::size_t n = 256, points = 20, dim = 3;
    double nu = 0.0;
    bool no_shuffle = false;

    auto* gen = app.add_subcommand("gen-kernel", "write a kernel matrix and its sidecar");
    gen->add_option("--family", family)->check(CLI::IsMember({"sine", "acoustic", "spherical"}));
    gen->add_option("--n", n, "size parameter");
    gen->add_option("--nu", nu, "acoustic frequency");
    gen->add_option("--sampling", sampling)->check(CLI::IsMember({"grid", "random"}));
    gen->add_option("--out", out_path, "KMAT path (default <out-dir>/kernel.kmat)");

    auto* learn = app.add_subcommand("learn-geometry", "questionnaire on a shuffled copy of the kernel");
    learn->add_option("--kernel", kernel_path, "KMAT path (default <out-dir>/kernel.kmat)");
    learn->add_flag("--no-shuffle", no_shuffle, "learn on the matrix as given");

    auto* order = app.add_subcommand("order", "space-filling-curve orderings from the learned geometry");

    auto* factor = app.add_subcommand("factorize", "compress reorganized, permuted and natural variants");
    factor->add_option("--kernel", kernel_path, "KMAT path (default <out-dir>/kernel.kmat)");

    auto* apply = app.add_subcommand("apply", "apply the reorganized factorization to a vector");
    apply->add_option("--input", input, "CSV with the vector entries")->required();
    apply->add_option("--output", output, "CSV path (default stdout)");

    auto* bench = app.add_subcommand("bench", "sweep sizes and write table rows");
    bench->add_option("--family", family)->check(CLI::IsMember({"sine", "acoustic", "spherical"}));
    bench->add_option("--sizes", sizes, "comma-separated N values");
    bench->add_option("--nu", nu, "acoustic frequency");
    bench->add_option("--sampling", sampling)->check(CLI::IsMember({"grid", "random"}));

    auto* plot = app.add_subcommand("plot-data", "embedding, curve and error-ratio CSVs");
    plot->add_option("--points", points, "samples on the error-vs-ratio curve");
    plot->add_option("--dim", dim, "embedding dimension");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = make_config(g);
        resolve_metric(cfg, g);
        const fs::path dir = cfg.out_dir;
        const fs::path kpath = kernel_path.empty() ? dir / artifacts::kernel : fs::path(kernel_path);

        if (*gen) {
            cfg.kernel.family = parse_family(family);
            cfg.kernel.N = n;
            cfg.kernel.nu = nu;
            cfg.kernel.sampling = parse_sampling(sampling);
            const KernelMatrix km = generate_kernel(cfg.kernel);
            const fs::path out = out_path.empty() ? dir / artifacts::kernel : fs::path(out_path);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_kmat(out, km.K);
            write_text(sidecar_for(out), km.sidecar_json(cfg.kernel));
            std::cout << "wrote " << out.string() << " (" << km.K.rows() << " x " << km.K.cols() << ")\n";
        } else if (*learn) {
            const DenseMatrix K = read_kmat(kpath);
            const Sidecar side = read_sidecar(sidecar_for(kpath));
            cfg.kernel = side.spec;
            resolve_metric(cfg, g);
            KernelVariant v;
            if (no_shuffle) {
                v = {K, Permutation::identity(K.rows()), Permutation::identity(K.cols())};
            } else {
                v = shuffle_variants(K, cfg.seed).permuted;
            }
            fs::create_directories(dir);
            save_permutation(dir / artifacts::permutation, v);
            std::vector<std::size_t> dims(side.meta.col_points.cols());
            for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = i;
            const AffinityMatrix W0 =
                initial_affinity(cfg.kernel.family, v.K, side.meta.col_points.select(v.cols.map(), dims));
            QuestionnaireOptions q = cfg.questionnaire;
            q.seed = cfg.seed;
            const CoupledGeometry geo = run_questionnaire(v.K, W0, cfg.metric, cfg.weights, q);
            save_geometry(dir / artifacts::geometry, geo);
            std::cout << "questionnaire: " << geo.iterations_run << " iterations, row depth "
                      << geo.row_tree.depth() << ", column depth " << geo.col_tree.depth() << "\n";
        } else if (*order) {
            const CoupledGeometry geo = load_geometry(dir / artifacts::geometry);
            const OrderedTree r = order_tree(geo.row_tree, geo.row_affinity);
            const OrderedTree c = order_tree(geo.col_tree, geo.col_affinity);
            save_order(dir / artifacts::order, r, c);
            std::cout << "orders written to " << (dir / artifacts::order).string() << "\n";
        } else if (*factor) {
            KernelMatrix km;
            km.K = read_kmat(kpath);
            const Sidecar side = read_sidecar(sidecar_for(kpath));
            cfg.kernel = side.spec;
            resolve_metric(cfg, g);
            km.row_natural = side.meta.row_natural;
            km.col_natural = side.meta.col_natural;
            const KernelVariant v = load_permutation(dir / artifacts::permutation, km.K);
            LearnedGeometry geo;
            geo.coupled = load_geometry(dir / artifacts::geometry);
            std::tie(geo.rows, geo.cols) = load_order(dir / artifacts::order);
            print_report(factorize_variants(km, v, geo, cfg));
        } else if (*apply) {
            const CompressedOperator op = CompressedOperator::load(dir / "reorganized");
            const DenseMatrix K = read_kmat(kpath);
            const KernelVariant v = load_permutation(dir / artifacts::permutation, DenseMatrix(K.rows(), K.cols()));
            const std::vector<double> f = read_vector(input);
            if (f.size() != K.cols())
                throw DimensionError("apply: vector has " + std::to_string(f.size()) + " entries, expected " +
                                     std::to_string(K.cols()));
            const std::vector<double> y = v.rows.scatter(op.apply(v.cols.gather(f)));
            CsvTable t;
            for (double x : y) t.push_back({x});
            const std::string text = to_csv(t);
            if (output.empty())
                std::cout << text;
            else
                write_text(output, text);
        } else if (*bench) {
            std::vector<std::size_t> Ns;
            std::stringstream ss(sizes);
            for (std::string tok; std::getline(ss, tok, ',');) Ns.push_back(std::stoul(tok));
            cfg.kernel.nu = nu;
            cfg.kernel.sampling = parse_sampling(sampling);
            cfg.kernel.family = parse_family(family);
            resolve_metric(cfg, g);
            const auto rows = bench_sweep(parse_family(family), Ns, cfg.method, cfg);
            fs::create_directories(dir);
            write_text(dir / "bench.csv", bench_csv(rows));
            write_text(dir / "bench.json", bench_json(rows));
            std::cout << bench_csv(rows);
            for (const auto& r : rows)
                if (!r.report) std::cerr << "N=" << r.N << " failed: " << r.error << "\n";
        } else if (*plot) {
            PlotOptions po;
            po.ratio_points = points;
            po.embedding_dim = dim;
            for (const auto& p : emit_plot_data(dir, cfg, po)) std::cout << p.string() << "\n";
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
