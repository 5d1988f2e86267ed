#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <string>
#include <tuple>

#include "gak/error.hpp"
#include "gak/ghwt.hpp"

namespace gak {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

auto tile_key(const Tile& t) { return std::make_tuple(t.j, t.k, t.n); }

}  // namespace

GhwtCompression threshold_compress(const BestBasis2D& basis, const PartitionTree& row_tree,
                                   const PartitionTree& col_tree, double K_frobenius, double eps) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) throw InvalidArgument("threshold_compress: eps must be >= 0");
    if (!(K_frobenius >= 0.0) || !std::isfinite(K_frobenius))
        throw InvalidArgument("threshold_compress: Frobenius norm must be finite");
    GhwtCompression C;
    C.row_layout = ghwt::GhwtLayout(row_tree);
    C.col_layout = ghwt::GhwtLayout(col_tree);
    C.frobenius_norm_K = K_frobenius;
    C.eps = eps;
    C.best_tiling.reserve(basis.tiling.size());
    for (const TilePair& tp : basis.tiling) C.best_tiling.emplace_back(tp.q, tp.p);

    std::vector<TilePair> sorted = basis.tiling;
    std::sort(sorted.begin(), sorted.end(), [](const TilePair& a, const TilePair& b) {
        const double x = std::fabs(a.coef), y = std::fabs(b.coef);
        if (x != y) return x > y;
        return std::make_tuple(tile_key(a.q), tile_key(a.p)) < std::make_tuple(tile_key(b.q), tile_key(b.p));
    });
    const double budget = eps * K_frobenius;
    const double budget_sq = budget * budget;
    double tail_sq = 0.0;
    std::size_t keep = sorted.size();
    while (keep > 0) {
        const double c = sorted[keep - 1].coef;
        if (tail_sq + c * c > budget_sq) break;
        tail_sq += c * c;
        --keep;
    }
    C.dropped_norm = std::sqrt(tail_sq);
    sorted.resize(keep);
    C.retained = std::move(sorted);
    return C;
}

std::vector<double> GhwtCompression::apply(std::span<const double> f) const {
    const std::size_t ny = row_layout.n(), nx = col_layout.n();
    if (f.size() != nx) throw DimensionError("ghwt apply: vector length != matrix columns");
    const std::vector<double> fl = col_layout.order().gather(f);
    std::vector<double> xtab((col_layout.depth() + 1) * nx);
    ghwt::analyze_leaf(col_layout, fl.data(), xtab.data());
    std::vector<double> ytab((row_layout.depth() + 1) * ny, 0.0);
    for (const TilePair& tp : retained) {
        const std::size_t xp = tp.p.j * nx + col_layout.position(tp.p);
        const std::size_t yp = tp.q.j * ny + row_layout.position(tp.q);
        ytab[yp] += tp.coef * xtab[xp];
    }
    return row_layout.order().scatter(ghwt::synthesize_leaf(row_layout, ytab));
}

DenseMatrix GhwtCompression::reconstruct() const {
    const std::size_t ny = row_layout.n(), nx = col_layout.n();
    DenseMatrix K(ny, nx);
    std::vector<double> e(nx, 0.0);
    for (std::size_t j = 0; j < nx; ++j) {
        e[j] = 1.0;
        const std::vector<double> col = apply(e);
        e[j] = 0.0;
        for (std::size_t i = 0; i < ny; ++i) K(i, j) = col[i];
    }
    return K;
}

StorageCount GhwtCompression::storage() const noexcept {
    StorageCount s;
    s.floats = retained.size();
    s.indices = 4 * retained.size() + row_layout.n() + col_layout.n() + row_layout.sizes_flat().size() +
                col_layout.sizes_flat().size();
    return s;
}

void GhwtCompression::save(const fs::path& dir) const {
    fs::create_directories(dir);
    json meta;
    meta["format"] = "gak-ghwt-1";
    meta["row_order"] = row_layout.order().map();
    meta["col_order"] = col_layout.order().map();
    meta["row_sizes"] = row_layout.sizes_flat();
    meta["col_sizes"] = col_layout.sizes_flat();
    meta["frobenius_norm_K"] = frobenius_norm_K;
    meta["eps"] = eps;
    meta["dropped_norm"] = dropped_norm;
    meta["n_kept"] = retained.size();
    write_text(dir / "meta.json", meta.dump());
    // One row per coefficient: row level, row position, column level, column position, value.
    DenseMatrix rows(retained.size(), 5);
    for (std::size_t i = 0; i < retained.size(); ++i) {
        const TilePair& tp = retained[i];
        rows(i, 0) = tp.q.j;
        rows(i, 1) = static_cast<double>(row_layout.position(tp.q));
        rows(i, 2) = tp.p.j;
        rows(i, 3) = static_cast<double>(col_layout.position(tp.p));
        rows(i, 4) = tp.coef;
    }
    write_kmat(dir / "coefficients.kmat", rows);
}

GhwtCompression GhwtCompression::load(const fs::path& dir) {
    GhwtCompression C;
    try {
        const json meta = json::parse(read_text(dir / "meta.json"));
        if (meta.at("format") != "gak-ghwt-1")
            throw FormatError(FormatError::Kind::version_mismatch, "ghwt: unknown format in " + dir.string());
        const auto rs = meta.at("row_sizes").get<std::vector<std::size_t>>();
        const auto cs = meta.at("col_sizes").get<std::vector<std::size_t>>();
        C.row_layout = ghwt::GhwtLayout::from_sizes(Permutation(meta.at("row_order").get<std::vector<std::size_t>>()), rs);
        C.col_layout = ghwt::GhwtLayout::from_sizes(Permutation(meta.at("col_order").get<std::vector<std::size_t>>()), cs);
        C.frobenius_norm_K = meta.at("frobenius_norm_K");
        C.eps = meta.at("eps");
        C.dropped_norm = meta.at("dropped_norm");
        const std::size_t n_kept = meta.at("n_kept");
        const DenseMatrix rows = read_kmat(dir / "coefficients.kmat");
        if (rows.rows() != n_kept || rows.cols() != 5)
            throw FormatError(FormatError::Kind::malformed, "ghwt: coefficient table has the wrong shape");
        auto index = [&](std::size_t i, std::size_t c, std::size_t limit) {
            const double v = rows(i, c);
            if (!(v >= 0.0) || v >= static_cast<double>(limit) || v != std::floor(v))
                throw FormatError(FormatError::Kind::malformed, "ghwt: bad tile index in coefficient table");
            return static_cast<std::size_t>(v);
        };
        for (std::size_t i = 0; i < n_kept; ++i) {
            const std::size_t qj = index(i, 0, C.row_layout.depth() + 1), qp = index(i, 1, C.row_layout.n());
            const std::size_t pj = index(i, 2, C.col_layout.depth() + 1), pp = index(i, 3, C.col_layout.n());
            C.retained.push_back({C.row_layout.tile_at(qj, qp), C.col_layout.tile_at(pj, pp), rows(i, 4)});
        }
    } catch (const json::exception& e) {
        throw FormatError(FormatError::Kind::malformed, std::string("ghwt meta: ") + e.what());
    }
    return C;
}

}  // namespace gak
