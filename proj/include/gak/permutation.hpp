#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gak/dense_matrix.hpp"

namespace gak {

class SeededRng;

// Bijection on {0,...,n-1}. Applied as a gather: out[i] = in[map[i]].
class Permutation {
public:
    Permutation() = default;
    explicit Permutation(std::vector<std::size_t> map);

    static Permutation identity(std::size_t n);
    static Permutation random(std::size_t n, SeededRng& rng);

    std::size_t size() const noexcept { return map_.size(); }
    std::size_t operator[](std::size_t i) const { return map_[i]; }
    const std::vector<std::size_t>& map() const noexcept { return map_; }

    Permutation inverse() const;
    // (a.then(b))[i] = a[b[i]]: gathering with a, then with b.
    Permutation then(const Permutation& next) const;

    std::vector<double> gather(std::span<const double> in) const;
    std::vector<double> scatter(std::span<const double> in) const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> map_;
};

// out[i][j] = K[row_perm[i]][col_perm[j]]
DenseMatrix permute_matrix(const DenseMatrix& K, const Permutation& row_perm, const Permutation& col_perm);

}  // namespace gak
