#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gak/dense_matrix.hpp"

namespace gak {

// Symmetric, nonnegative, finite similarity matrix.
class AffinityMatrix {
public:
    AffinityMatrix() = default;
    explicit AffinityMatrix(DenseMatrix W);

    std::size_t size() const noexcept { return W_.rows(); }
    const DenseMatrix& matrix() const noexcept { return W_; }
    double operator()(std::size_t i, std::size_t j) const { return W_(i, j); }

    // Principal submatrix on `idx` (already known valid, so no re-check).
    AffinityMatrix restrict_to(std::span<const std::size_t> idx) const;

    friend bool operator==(const AffinityMatrix&, const AffinityMatrix&) = default;

private:
    DenseMatrix W_;
};

// Eigenvectors 2..d+1 of D^-1 W, each scaled by its eigenvalue.
struct EmbeddingCoords {
    DenseMatrix coords;               // n x d
    std::vector<double> eigenvalues;  // d values, descending
};

namespace graph {

inline constexpr double kDegreeFloor = 1e-12;
inline constexpr std::size_t kDenseEigenLimit = 256;
inline constexpr std::size_t kLandmarkThreshold = 4096;

struct Bandwidth {
    bool use_median = true;
    double sigma = 0.0;
    static Bandwidth median() { return {}; }
    static Bandwidth fixed(double s) { return {false, s}; }
};

// Median of all pairwise Euclidean distances between rows of `points`.
double median_pairwise_distance(const DenseMatrix& points);

// W[i][j] = exp(-|p_i - p_j|^2 / (2 sigma^2)); points are rows.
AffinityMatrix gaussian_affinity(const DenseMatrix& points, Bandwidth bw = Bandwidth::median());

// W[i][j] = |cos angle(v_i, v_j)|; the vectors are the columns of `vectors`.
AffinityMatrix cosine_affinity(const DenseMatrix& vectors);

// I - D^-1/2 W D^-1/2 with degrees floored by kDegreeFloor.
DenseMatrix sym_laplacian(const AffinityMatrix& W);

enum class EigenMethod { automatic, dense, lanczos };

// Unit eigenvector of L_sym for the second-smallest eigenvalue, orthogonal
// to D^1/2 1, with its first nonzero entry positive.
std::vector<double> fiedler_vector(const AffinityMatrix& W, EigenMethod method = EigenMethod::automatic);

// Nystrom extension from landmark columns. W_cross is n x m with column l
// holding affinities to point landmarks[l].
std::vector<double> landmark_fiedler(const DenseMatrix& W_cross, std::span<const std::size_t> landmarks);

EmbeddingCoords diffusion_embedding(const AffinityMatrix& W, std::size_t d);

// Flip so the first entry above 1e-10 * max|v| is positive.
void fix_sign(std::vector<double>& v);

}  // namespace graph
}  // namespace gak
