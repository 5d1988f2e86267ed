#include <bit>
#include <cmath>
#include <string>

#include "gak/error.hpp"
#include "gak/ghwt.hpp"

namespace gak {

double Tile::time_lo() const noexcept { return std::ldexp(static_cast<double>(k), -static_cast<int>(j)); }
double Tile::time_hi() const noexcept { return std::ldexp(static_cast<double>(k) + 1.0, -static_cast<int>(j)); }
double Tile::band_lo() const noexcept { return std::ldexp(static_cast<double>(n), static_cast<int>(j)); }
double Tile::band_hi() const noexcept { return std::ldexp(static_cast<double>(n) + 1.0, static_cast<int>(j)); }

bool tiles_disjoint(const Tile& a, const Tile& b) noexcept {
    const bool time_apart = a.time_hi() <= b.time_lo() || b.time_hi() <= a.time_lo();
    const bool band_apart = a.band_hi() <= b.band_lo() || b.band_hi() <= a.band_lo();
    return time_apart || band_apart;
}

namespace ghwt {

namespace {

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

}  // namespace

std::vector<double> walsh_function(std::size_t n, std::size_t grid_size) {
    if (!is_pow2(grid_size)) throw InvalidArgument("walsh_function: grid size must be a power of two");
    if (n >= grid_size)
        throw InvalidArgument("walsh_function: W_" + std::to_string(n) + " needs more than " +
                              std::to_string(grid_size) + " samples");
    if (n == 0) return std::vector<double>(grid_size, 1.0);
    // W_{2m}(t) = W_m(2t) + (-1)^m W_m(2t-1), W_{2m+1}(t) = W_m(2t) - (-1)^m W_m(2t-1)
    const std::size_t m = n / 2;
    const std::vector<double> half = walsh_function(m, grid_size / 2);
    const double sign = ((m % 2 == 0) ? 1.0 : -1.0) * ((n % 2 == 0) ? 1.0 : -1.0);
    std::vector<double> w(grid_size);
    for (std::size_t i = 0; i < half.size(); ++i) {
        w[i] = half[i];
        w[half.size() + i] = sign * half[i];
    }
    return w;
}

std::vector<double> fwht(std::span<const double> f) {
    const std::size_t N = f.size();
    if (!is_pow2(N)) throw InvalidArgument("fwht: length must be a power of two");
    std::vector<double> a(f.begin(), f.end());
    for (std::size_t h = 1; h < N; h <<= 1)
        for (std::size_t i = 0; i < N; i += 2 * h)
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = a[j], y = a[j + h];
                a[j] = x + y;
                a[j + h] = x - y;
            }
    const double s = 1.0 / std::sqrt(static_cast<double>(N));
    for (double& v : a) v *= s;
    return a;
}

std::size_t sequency_to_hadamard(std::size_t n, std::size_t L) {
    std::size_t g = n ^ (n >> 1);
    std::size_t r = 0;
    for (std::size_t b = 0; b < L; ++b) r |= ((g >> b) & 1u) << (L - 1 - b);
    return r;
}

std::vector<double> walsh_transform(std::span<const double> f) {
    const std::vector<double> h = fwht(f);
    const auto L = static_cast<std::size_t>(std::countr_zero(f.size()));
    std::vector<double> c(f.size());
    for (std::size_t n = 0; n < f.size(); ++n) c[n] = h[sequency_to_hadamard(n, L)];
    return c;
}

}  // namespace ghwt
}  // namespace gak
