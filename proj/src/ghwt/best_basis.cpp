#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "gak/error.hpp"
#include "gak/ghwt.hpp"

namespace gak {

namespace {

using ghwt::GhwtLayout;

// Time-frequency regions of one axis. Layer s holds (s+1) 2^s regions
// (a, k, m): folder (a, k) in time times a band of width 2^(L-s+a) indexed
// by m < 2^(s-a). Layer L regions are the unit tiles (j=a, k, n=m).
struct RegionAxis {
    const GhwtLayout* G;
    std::size_t L;
    std::vector<std::size_t> off;

    explicit RegionAxis(const GhwtLayout& layout) : G(&layout), L(layout.depth()), off(L + 2, 0) {
        for (std::size_t s = 0; s <= L; ++s) off[s + 1] = off[s] + count(s);
    }

    static std::size_t count(std::size_t s) { return (s + 1) << s; }
    std::size_t total() const { return off[L + 1]; }

    static std::size_t local(std::size_t s, std::size_t a, std::size_t k, std::size_t m) {
        return (a << s) + (k << (s - a)) + m;
    }
    struct Region {
        std::size_t a, k, m;
    };
    static Region decode(std::size_t s, std::size_t loc) {
        const std::size_t a = loc >> s;
        const std::size_t rem = loc & ((std::size_t{1} << s) - 1);
        return {a, rem >> (s - a), rem & ((std::size_t{1} << (s - a)) - 1)};
    }
    // Children at layer s+1: time split then frequency split.
    static void children(std::size_t s, std::size_t loc, std::size_t out[4]) {
        const Region r = decode(s, loc);
        out[0] = local(s + 1, r.a + 1, 2 * r.k, r.m);
        out[1] = local(s + 1, r.a + 1, 2 * r.k + 1, r.m);
        out[2] = local(s + 1, r.a, r.k, 2 * r.m);
        out[3] = local(s + 1, r.a, r.k, 2 * r.m + 1);
    }
    // Table position of a unit tile, or npos when the tile does not exist.
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    std::size_t unit_position(std::size_t loc) const {
        const Region r = decode(L, loc);
        if (r.m >= G->size(r.a, r.k)) return npos;
        return r.a * G->n() + G->start(r.a, r.k) + r.m;
    }
};

double tile_cost(double c, double p) { return p == 1.0 ? std::fabs(c) : std::pow(std::fabs(c), p); }

// Row-axis GHWT of every column: ((Ly+1) Ny) x Nx, columns in column leaf order.
std::vector<double> row_transform(const DenseMatrix& K, const GhwtLayout& gy, const GhwtLayout& gx) {
    const std::size_t ny = gy.n(), nx = gx.n(), tl = (gy.depth() + 1) * ny;
    std::vector<double> ty(tl * nx);
    const auto& rmap = gy.order().map();
    const auto& cmap = gx.order().map();
#pragma omp parallel
    {
        std::vector<double> col(ny), tab(tl);
#pragma omp for schedule(static)
        for (std::ptrdiff_t jj = 0; jj < static_cast<std::ptrdiff_t>(nx); ++jj) {
            const auto j = static_cast<std::size_t>(jj);
            for (std::size_t i = 0; i < ny; ++i) col[i] = K(rmap[i], cmap[j]);
            ghwt::analyze_leaf(gy, col.data(), tab.data());
            for (std::size_t r = 0; r < tl; ++r) ty[r * nx + j] = tab[r];
        }
    }
    return ty;
}

void check_inputs(const DenseMatrix& K, const PartitionTree& rt, const PartitionTree& ct) {
    if (K.rows() != rt.n() || K.cols() != ct.n())
        throw DimensionError("best_basis_2d: tree sizes do not match the matrix");
    K.require_finite("best_basis_2d input");
}

}  // namespace

double BestBasis2D::coefficient_norm() const {
    std::vector<double> sq;
    sq.reserve(tiling.size());
    for (const auto& t : tiling) sq.push_back(t.coef * t.coef);
    std::sort(sq.begin(), sq.end());
    double s = 0.0;
    for (double v : sq) s += v;
    return std::sqrt(s);
}

namespace {

// Exact 2-D best-basis DP. Row-axis regions (a, k, m) are pairs of a node of
// the time tree (a, k) and a node of the frequency tree (b = s - a, m), so the
// values for every row region under one time node are computed from the two
// time children, depth first. Row-unit values are recomputed when needed
// rather than stored, and child layers are released once consumed.
class TilingSearch {
public:
    using Layers = std::vector<std::vector<double>>;

    TilingSearch(const GhwtLayout& gy, const GhwtLayout& gx, const std::vector<double>& ty, double p)
        : gy_(gy), gx_(gx), ay_(gy), ax_(gx), ty_(ty), p_(p), xt_(ax_.total()), xs_((xt_ + 3) / 4 * 4),
          choice_(ay_.total() * xs_ / 4, 0) {}

    double run() {
        std::vector<double> v(xt_), xtab(xtab_len());
        if (ay_.L == 0) {
            unit_values(0, v.data(), xtab.data());
            return v[0];
        }
        const Layers root = solve(0, 0);
        return root[0][0];
    }

    // Codes: 0 terminal, 1 row time split, 2 row frequency split, 3 column
    // time split, 4 column frequency split.
    std::uint8_t choice(std::size_t sy, std::size_t yl, std::size_t sx, std::size_t xl) const {
        if (sy == ay_.L && sx == ax_.L) return 0;
        const std::size_t idx = (ay_.off[sy] + yl) * xs_ + ax_.off[sx] + xl;
        return static_cast<std::uint8_t>(((choice_[idx >> 2] >> ((idx & 3) * 2)) & 3) + 1);
    }

private:
    std::size_t xtab_len() const { return (ax_.L + 1) * gx_.n(); }

    void set_choice(std::size_t yg, std::size_t xg, std::uint8_t c) {
        const std::size_t idx = yg * xs_ + xg;
        const unsigned sh = static_cast<unsigned>(idx & 3) * 2;
        std::uint8_t& byte = choice_[idx >> 2];
        byte = static_cast<std::uint8_t>((byte & ~(3u << sh)) | (static_cast<unsigned>(c - 1) << sh));
    }

    // Column-axis layers below the unit layer; y0..y3 are the row-split
    // children, or null for a row-unit region.
    void column_pass(std::size_t yg, double* v, const double* const* yc) {
        for (std::size_t sx = ax_.L; sx-- > 0;) {
            const std::size_t base = ax_.off[sx + 1];
            for (std::size_t xl = 0; xl < RegionAxis::count(sx); ++xl) {
                const std::size_t xg = ax_.off[sx] + xl;
                double best = 0.0;
                std::uint8_t c = 0;
                if (yc) {
                    best = yc[0][xg] + yc[1][xg];
                    c = 1;
                    const double f = yc[2][xg] + yc[3][xg];
                    if (f < best) {
                        best = f;
                        c = 2;
                    }
                }
                std::size_t xc[4];
                RegionAxis::children(sx, xl, xc);
                const double t = v[base + xc[0]] + v[base + xc[1]];
                if (c == 0 || t < best) {
                    best = t;
                    c = 3;
                }
                const double f = v[base + xc[2]] + v[base + xc[3]];
                if (f < best) {
                    best = f;
                    c = 4;
                }
                v[xg] = best;
                set_choice(yg, xg, c);
            }
        }
    }

    void unit_values(std::size_t yl, double* v, double* xtab) {
        const std::size_t ypos = ay_.unit_position(yl);
        if (ypos == RegionAxis::npos) {
            std::fill(xtab, xtab + xtab_len(), 0.0);
        } else {
            ghwt::analyze_leaf(gx_, ty_.data() + ypos * gx_.n(), xtab);
        }
        for (std::size_t xl = 0; xl < RegionAxis::count(ax_.L); ++xl) {
            const std::size_t xpos = ax_.unit_position(xl);
            v[ax_.off[ax_.L] + xl] = xpos == RegionAxis::npos ? 0.0 : tile_cost(xtab[xpos], p_);
        }
        column_pass(ay_.off[ay_.L] + yl, v, nullptr);
    }

    const double* values(const Layers& lr, std::size_t a, std::size_t k, std::size_t b, std::size_t m,
                         double* scratch, double* xtab) {
        if (a + b == ay_.L) {
            unit_values(RegionAxis::local(ay_.L, a, k, m), scratch, xtab);
            return scratch;
        }
        return lr[b].data() + m * xt_;
    }

    Layers solve(std::size_t a, std::size_t k) {
        const std::size_t top = ay_.L - a;
        Layers own(top + 1);
        if (top == 0) return own;
        Layers t0 = solve(a + 1, 2 * k);
        Layers t1 = solve(a + 1, 2 * k + 1);
        for (std::size_t b = top; b-- > 0;) {
            const std::size_t nm = std::size_t{1} << b;
            own[b].assign(nm * xt_, 0.0);
            const std::size_t s = a + b;
#pragma omp parallel
            {
                std::vector<double> scratch(4 * xt_), xtab(xtab_len());
#pragma omp for schedule(dynamic, 1)
                for (std::ptrdiff_t mm = 0; mm < static_cast<std::ptrdiff_t>(nm); ++mm) {
                    const auto m = static_cast<std::size_t>(mm);
                    const double* yc[4] = {
                        values(t0, a + 1, 2 * k, b, m, scratch.data(), xtab.data()),
                        values(t1, a + 1, 2 * k + 1, b, m, scratch.data() + xt_, xtab.data()),
                        values(own, a, k, b + 1, 2 * m, scratch.data() + 2 * xt_, xtab.data()),
                        values(own, a, k, b + 1, 2 * m + 1, scratch.data() + 3 * xt_, xtab.data()),
                    };
                    const std::size_t yg = ay_.off[s] + RegionAxis::local(s, a, k, m);
                    double* v = own[b].data() + m * xt_;
                    for (std::size_t xg = ax_.off[ax_.L]; xg < xt_; ++xg) {
                        double best = yc[0][xg] + yc[1][xg];
                        std::uint8_t c = 1;
                        const double f = yc[2][xg] + yc[3][xg];
                        if (f < best) {
                            best = f;
                            c = 2;
                        }
                        v[xg] = best;
                        set_choice(yg, xg, c);
                    }
                    column_pass(yg, v, yc);
                }
            }
            std::vector<double>().swap(t0[b]);
            std::vector<double>().swap(t1[b]);
        }
        return own;
    }

    const GhwtLayout& gy_;
    const GhwtLayout& gx_;
    RegionAxis ay_, ax_;
    const std::vector<double>& ty_;
    double p_;
    std::size_t xt_, xs_;
    std::vector<std::uint8_t> choice_;
};

}  // namespace

BestBasis2D best_basis_2d(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                          double p) {
    check_inputs(K, row_tree, col_tree);
    if (!(p > 0.0)) throw InvalidArgument("best_basis_2d: cost exponent must be positive");
    const GhwtLayout gy(row_tree), gx(col_tree);
    const std::size_t Ly = gy.depth(), Lx = gx.depth(), nx = gx.n();
    const std::vector<double> ty = row_transform(K, gy, gx);

    TilingSearch search(gy, gx, ty, p);
    BestBasis2D out;
    out.cost = search.run();

    struct Item {
        std::size_t sy, yl, sx, xl;
    };
    struct Unit {
        std::size_t ypos, xpos;
        Tile q, p;
    };
    const RegionAxis ay(gy), ax(gx);
    std::vector<Unit> units;
    std::vector<Item> stack{{0, 0, 0, 0}};
    while (!stack.empty()) {
        const Item it = stack.back();
        stack.pop_back();
        const std::uint8_t c = search.choice(it.sy, it.yl, it.sx, it.xl);
        std::size_t ch[4];
        switch (c) {
            case 0: {
                const std::size_t yp = ay.unit_position(it.yl), xp = ax.unit_position(it.xl);
                if (yp == RegionAxis::npos || xp == RegionAxis::npos) break;
                const auto ry = RegionAxis::decode(Ly, it.yl), rx = RegionAxis::decode(Lx, it.xl);
                units.push_back({yp, xp,
                                 Tile{static_cast<std::uint32_t>(ry.a), static_cast<std::uint32_t>(ry.k),
                                      static_cast<std::uint32_t>(ry.m)},
                                 Tile{static_cast<std::uint32_t>(rx.a), static_cast<std::uint32_t>(rx.k),
                                      static_cast<std::uint32_t>(rx.m)}});
                break;
            }
            case 1:
            case 2:
                RegionAxis::children(it.sy, it.yl, ch);
                stack.push_back({it.sy + 1, ch[c == 1 ? 1 : 3], it.sx, it.xl});
                stack.push_back({it.sy + 1, ch[c == 1 ? 0 : 2], it.sx, it.xl});
                break;
            default:
                RegionAxis::children(it.sx, it.xl, ch);
                stack.push_back({it.sy, it.yl, it.sx + 1, ch[c == 3 ? 1 : 3]});
                stack.push_back({it.sy, it.yl, it.sx + 1, ch[c == 3 ? 0 : 2]});
                break;
        }
    }
    if (units.size() != K.size()) throw NumericalError("best_basis_2d: basis does not span the matrix space");

    std::stable_sort(units.begin(), units.end(), [](const Unit& a, const Unit& b) { return a.ypos < b.ypos; });
    std::vector<double> xtab((Lx + 1) * nx);
    std::size_t have = RegionAxis::npos;
    out.tiling.reserve(units.size());
    for (const Unit& u : units) {
        if (u.ypos != have) {
            ghwt::analyze_leaf(gx, ty.data() + u.ypos * nx, xtab.data());
            have = u.ypos;
        }
        out.tiling.push_back({u.q, u.p, xtab[u.xpos]});
    }
    return out;
}

double level_basis_cost(const DenseMatrix& K, const PartitionTree& row_tree, const PartitionTree& col_tree,
                        std::size_t ly, std::size_t lx, double p) {
    check_inputs(K, row_tree, col_tree);
    const GhwtLayout gy(row_tree), gx(col_tree);
    if (ly > gy.depth() || lx > gx.depth()) throw InvalidArgument("level_basis_cost: level out of range");
    const std::size_t ny = gy.n(), nx = gx.n();
    const std::vector<double> ty = row_transform(K, gy, gx);
    std::vector<double> xtab((gx.depth() + 1) * nx);
    double total = 0.0;
    for (std::size_t i = 0; i < ny; ++i) {
        ghwt::analyze_leaf(gx, ty.data() + (ly * ny + i) * nx, xtab.data());
        for (std::size_t j = 0; j < nx; ++j) total += tile_cost(xtab[lx * nx + j], p);
    }
    return total;
}

}  // namespace gak
