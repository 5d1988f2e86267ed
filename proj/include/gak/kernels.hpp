#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gak/dense_matrix.hpp"
#include "gak/permutation.hpp"

namespace gak {

enum class KernelFamily { sine, acoustic, spherical };
enum class Sampling { grid, random };

struct KernelSpec {
    KernelFamily family = KernelFamily::sine;
    std::size_t N = 0;  // sine: frequencies; acoustic: points per cloud; spherical: sample points
    double nu = 0.0;    // acoustic only
    Sampling sampling = Sampling::random;
    std::uint64_t seed = 0;

    void validate() const;
};

KernelFamily parse_family(const std::string& s);
Sampling parse_sampling(const std::string& s);
std::string to_string(KernelFamily f);
std::string to_string(Sampling s);

// A generated matrix plus what is known about its two index sets.
struct KernelMatrix {
    DenseMatrix K;
    DenseMatrix row_points;  // one row of coordinates per matrix row
    DenseMatrix col_points;
    std::vector<std::string> row_labels;
    std::vector<std::string> col_labels;
    // Gathering with these puts rows / columns in their natural order.
    Permutation row_natural;
    Permutation col_natural;

    DenseMatrix natural() const;
    // Coordinates, labels and natural orders; the matrix itself goes to KMAT.
    std::string sidecar_json(const KernelSpec& spec) const;
};

// N rows (k = 1..N) by 2N columns; column i samples sin(2 pi k x_i) at the
// i-th uniform draw, so the columns arrive unordered.
KernelMatrix sine_kernel(std::size_t N, std::uint64_t seed);

// Columns: helix sources (cos 6 pi t, sin 6 pi t, 3t), t equispaced in [0, 1].
// Rows: sheet targets (u, v, -1.5), (u, v) uniform in [-1, 1]^2.
// K = cos(2 pi nu r) / r; both index sets are shuffled.
KernelMatrix acoustic_kernel(std::size_t N, double nu, std::uint64_t seed);

// Largest degree used for a given number of sample points.
std::size_t spherical_lmax(std::size_t N, Sampling sampling);

// Rows: sample points on the sphere. Columns: (l, m), l = 0..l_max,
// m = -l..l, in that order. Grid sampling uses the (l_max+1) x (2 l_max+1)
// colatitude-azimuth grid for the largest l_max that fits in N points.
KernelMatrix spherical_harmonics_kernel(std::size_t N, Sampling sampling, std::uint64_t seed);
KernelMatrix spherical_harmonics_grid(std::size_t l_max);

// Fully normalized associated Legendre values without the Condon-Shortley
// phase: out[l] = N_l^m P_l^m(x) for l = m..l_max (entries below m are 0).
std::vector<double> normalized_legendre(std::size_t l_max, std::size_t m, double x);

// Real spherical harmonic Y_l^m(theta, phi).
double real_spherical_harmonic(int l, int m, double theta, double phi);

KernelMatrix generate_kernel(const KernelSpec& spec);

struct KernelVariant {
    DenseMatrix K;
    Permutation rows;  // K = permute_matrix(input, rows, cols)
    Permutation cols;
};

struct ShuffledVariants {
    KernelVariant permuted;
    KernelVariant natural;
};

ShuffledVariants shuffle_variants(const DenseMatrix& K, std::uint64_t seed);

}  // namespace gak
