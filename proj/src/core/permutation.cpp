#include "gak/permutation.hpp"

#include <numeric>
#include <string>

#include "gak/error.hpp"
#include "gak/rng.hpp"

namespace gak {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<char> seen(map_.size(), 0);
    for (std::size_t v : map_) {
        if (v >= map_.size() || seen[v])
            throw InvalidArgument("Permutation: not a bijection on 0.." + std::to_string(map_.size()));
        seen[v] = 1;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> m(n);
    std::iota(m.begin(), m.end(), std::size_t{0});
    Permutation p;
    p.map_ = std::move(m);
    return p;
}

Permutation Permutation::random(std::size_t n, SeededRng& rng) {
    Permutation p = identity(n);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(p.map_[i - 1], p.map_[j]);
    }
    return p;
}

Permutation Permutation::inverse() const {
    Permutation p;
    p.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) p.map_[map_[i]] = i;
    return p;
}

Permutation Permutation::then(const Permutation& next) const {
    if (next.size() != size()) throw DimensionError("Permutation::then: size mismatch");
    Permutation p;
    p.map_.resize(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) p.map_[i] = map_[next.map_[i]];
    return p;
}

std::vector<double> Permutation::gather(std::span<const double> in) const {
    if (in.size() != size()) throw DimensionError("Permutation::gather: length mismatch");
    std::vector<double> out(in.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out[i] = in[map_[i]];
    return out;
}

std::vector<double> Permutation::scatter(std::span<const double> in) const {
    if (in.size() != size()) throw DimensionError("Permutation::scatter: length mismatch");
    std::vector<double> out(in.size());
    for (std::size_t i = 0; i < map_.size(); ++i) out[map_[i]] = in[i];
    return out;
}

DenseMatrix permute_matrix(const DenseMatrix& K, const Permutation& row_perm, const Permutation& col_perm) {
    if (row_perm.size() != K.rows() || col_perm.size() != K.cols())
        throw DimensionError("permute_matrix: permutation sizes do not match matrix shape");
    return K.select(row_perm.map(), col_perm.map());
}

}  // namespace gak
