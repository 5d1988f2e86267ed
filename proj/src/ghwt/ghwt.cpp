#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "gak/error.hpp"
#include "gak/ghwt.hpp"

namespace gak {

namespace ghwt {

namespace {

constexpr double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Child tag n on both sides -> parent tags 2n, 2n+1; an unmatched tag of the
// larger child moves to parent tag 2 min(p, q).
void pair_forward(const double* cl, std::size_t p, const double* cr, std::size_t q, double* par) {
    const std::size_t lo = std::min(p, q);
    if (lo > 0) {
        const double sp = std::sqrt(static_cast<double>(p)), sq = std::sqrt(static_cast<double>(q));
        const double inv = 1.0 / std::sqrt(static_cast<double>(p + q));
        const double a = cl[0], b = cr[0];
        par[0] = (sp * a + sq * b) * inv;
        par[1] = (sq * a - sp * b) * inv;
    }
    for (std::size_t t = 1; t < lo; ++t) {
        const double a = cl[t], b = (t % 2 == 0) ? cr[t] : -cr[t];
        par[2 * t] = (a + b) * kInvSqrt2;
        par[2 * t + 1] = (a - b) * kInvSqrt2;
    }
    if (p > q) par[2 * lo] = cl[lo];
    if (q > p) par[2 * lo] = cr[lo];
}

void pair_inverse(const double* par, std::size_t p, std::size_t q, double* cl, double* cr) {
    const std::size_t lo = std::min(p, q);
    if (lo > 0) {
        const double sp = std::sqrt(static_cast<double>(p)), sq = std::sqrt(static_cast<double>(q));
        const double inv = 1.0 / std::sqrt(static_cast<double>(p + q));
        cl[0] = (sp * par[0] + sq * par[1]) * inv;
        cr[0] = (sq * par[0] - sp * par[1]) * inv;
    }
    for (std::size_t t = 1; t < lo; ++t) {
        const double u = par[2 * t], v = par[2 * t + 1];
        cl[t] = (u + v) * kInvSqrt2;
        const double d = (u - v) * kInvSqrt2;
        cr[t] = (t % 2 == 0) ? d : -d;
    }
    if (p > q) cl[lo] = par[2 * lo];
    if (q > p) cr[lo] = par[2 * lo];
}

}  // namespace

GhwtLayout::GhwtLayout(const PartitionTree& T) : order_(T.leaf_order()) {
    if (!T.is_balanced()) throw InvalidArgument("GhwtLayout: tree is not balanced binary");
    const std::size_t n = T.n();
    L_ = n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1));
    start_.assign(L_ + 1, {});
    size_.assign(L_ + 1, {});
    std::vector<std::size_t> node{0};
    start_[0] = {0};
    size_[0] = {n};
    for (std::size_t l = 0; l < L_; ++l) {
        std::vector<std::size_t> next_node;
        for (std::size_t k = 0; k < node.size(); ++k) {
            const std::size_t s = size_[l][k], st = start_[l][k];
            std::size_t p = (s + 1) / 2, q = s / 2;
            std::size_t a = kNoFolder, b = kNoFolder;
            if (node[k] != kNoFolder && !T.folder(node[k]).is_leaf()) {
                a = T.folder(node[k]).children[0];
                b = T.folder(node[k]).children[1];
                p = T.folder(a).size();
                q = T.folder(b).size();
            }
            start_[l + 1].push_back(st);
            start_[l + 1].push_back(st + p);
            size_[l + 1].push_back(p);
            size_[l + 1].push_back(q);
            next_node.push_back(a);
            next_node.push_back(b);
        }
        node.swap(next_node);
    }
    for (std::size_t s : size_[L_])
        if (s > 1) throw InvalidArgument("GhwtLayout: tree deeper than ceil(log2 n)");
}

std::vector<std::size_t> GhwtLayout::sizes_flat() const {
    std::vector<std::size_t> out;
    for (const auto& lv : size_) out.insert(out.end(), lv.begin(), lv.end());
    return out;
}

GhwtLayout GhwtLayout::from_sizes(const Permutation& order, std::span<const std::size_t> sizes_flat) {
    GhwtLayout G;
    G.order_ = order;
    const std::size_t n = order.size();
    G.L_ = n <= 1 ? 0 : static_cast<std::size_t>(std::bit_width(n - 1));
    if (sizes_flat.size() != (std::size_t{2} << G.L_) - 1)
        throw FormatError(FormatError::Kind::malformed, "GhwtLayout: wrong number of folder sizes");
    std::size_t at = 0;
    for (std::size_t l = 0; l <= G.L_; ++l) {
        G.size_.emplace_back(sizes_flat.begin() + static_cast<std::ptrdiff_t>(at),
                             sizes_flat.begin() + static_cast<std::ptrdiff_t>(at + (std::size_t{1} << l)));
        at += std::size_t{1} << l;
        std::vector<std::size_t> st;
        std::size_t s = 0;
        for (std::size_t v : G.size_.back()) {
            st.push_back(s);
            s += v;
        }
        if (s != n) throw FormatError(FormatError::Kind::malformed, "GhwtLayout: level sizes do not sum to n");
        G.start_.push_back(std::move(st));
    }
    return G;
}

Tile GhwtLayout::tile_at(std::size_t level, std::size_t pos) const {
    const auto& st = start_.at(level);
    const auto it = std::upper_bound(st.begin(), st.end(), pos);
    const auto k = static_cast<std::size_t>(it - st.begin()) - 1;
    return {static_cast<std::uint32_t>(level), static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(pos - st[k])};
}

void analyze_leaf(const GhwtLayout& G, const double* f_leaf, double* table) {
    const std::size_t n = G.n(), L = G.depth();
    std::copy(f_leaf, f_leaf + n, table + L * n);
    for (std::size_t l = L; l-- > 0;) {
        const double* child = table + (l + 1) * n;
        double* par = table + l * n;
        const std::size_t nk = std::size_t{1} << l;
        for (std::size_t k = 0; k < nk; ++k) {
            const std::size_t p = G.size(l + 1, 2 * k), q = G.size(l + 1, 2 * k + 1);
            if (p + q == 0) continue;
            pair_forward(child + G.start(l + 1, 2 * k), p, child + G.start(l + 1, 2 * k + 1), q, par + G.start(l, k));
        }
    }
}

std::vector<double> synthesize_leaf(const GhwtLayout& G, std::span<const double> table) {
    const std::size_t n = G.n(), L = G.depth();
    if (table.size() != (L + 1) * n) throw DimensionError("synthesize_leaf: table size mismatch");
    std::vector<double> cur(table.begin(), table.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> next(n);
    for (std::size_t l = 0; l < L; ++l) {
        const std::size_t nk = std::size_t{1} << l;
        for (std::size_t k = 0; k < nk; ++k) {
            const std::size_t p = G.size(l + 1, 2 * k), q = G.size(l + 1, 2 * k + 1);
            if (p + q == 0) continue;
            pair_inverse(cur.data() + G.start(l, k), p, q, next.data() + G.start(l + 1, 2 * k),
                         next.data() + G.start(l + 1, 2 * k + 1));
        }
        const double* add = table.data() + (l + 1) * n;
        for (std::size_t i = 0; i < n; ++i) next[i] += add[i];
        cur.swap(next);
    }
    return cur;
}

GhwtTable ghwt_analyze(std::span<const double> f, const GhwtLayout& G) {
    if (f.size() != G.n()) throw DimensionError("ghwt_analyze: signal length != tree size");
    const std::vector<double> fl = G.order().gather(f);
    GhwtTable t{G.depth() + 1, G.n(), std::vector<double>((G.depth() + 1) * G.n())};
    analyze_leaf(G, fl.data(), t.c.data());
    return t;
}

std::vector<double> atom(const GhwtLayout& G, std::size_t level, std::size_t pos) {
    std::vector<double> table((G.depth() + 1) * G.n(), 0.0);
    table.at(level * G.n() + pos) = 1.0;
    return G.order().scatter(synthesize_leaf(G, table));
}

}  // namespace ghwt

GhwtDictionary ghwt_analyze(std::span<const double> f, const PartitionTree& T) {
    const ghwt::GhwtLayout G(T);
    return {T, ghwt::ghwt_analyze(f, G)};
}

}  // namespace gak
