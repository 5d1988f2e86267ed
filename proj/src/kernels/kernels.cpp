#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numbers>
#include <numeric>
#include <string>

#include "gak/error.hpp"
#include "gak/kernels.hpp"
#include "gak/rng.hpp"

namespace gak {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

void KernelSpec::validate() const {
    if (N < 2) throw InvalidArgument("kernel: N must be >= 2");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw InvalidArgument("kernel: nu must be finite and >= 0");
}

KernelFamily parse_family(const std::string& s) {
    if (s == "sine") return KernelFamily::sine;
    if (s == "acoustic") return KernelFamily::acoustic;
    if (s == "spherical") return KernelFamily::spherical;
    throw InvalidArgument("unknown kernel family '" + s + "'");
}

Sampling parse_sampling(const std::string& s) {
    if (s == "grid") return Sampling::grid;
    if (s == "random") return Sampling::random;
    throw InvalidArgument("unknown sampling '" + s + "'");
}

std::string to_string(KernelFamily f) {
    switch (f) {
        case KernelFamily::sine: return "sine";
        case KernelFamily::acoustic: return "acoustic";
        case KernelFamily::spherical: return "spherical";
    }
    return "?";
}

std::string to_string(Sampling s) { return s == Sampling::grid ? "grid" : "random"; }

DenseMatrix KernelMatrix::natural() const { return permute_matrix(K, row_natural, col_natural); }

namespace {

json points_json(const DenseMatrix& P) {
    json out = json::array();
    for (std::size_t i = 0; i < P.rows(); ++i) out.push_back(std::vector<double>(P.row(i).begin(), P.row(i).end()));
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

std::string KernelMatrix::sidecar_json(const KernelSpec& spec) const {
    json j;
    j["family"] = to_string(spec.family);
    j["N"] = spec.N;
    j["nu"] = spec.nu;
    j["sampling"] = to_string(spec.sampling);
    j["seed"] = spec.seed;
    j["rows"] = K.rows();
    j["cols"] = K.cols();
    j["row_points"] = points_json(row_points);
    j["col_points"] = points_json(col_points);
    j["row_labels"] = row_labels;
    j["col_labels"] = col_labels;
    j["row_natural"] = row_natural.map();
    j["col_natural"] = col_natural.map();
    return j.dump(1);
}

KernelMatrix sine_kernel(std::size_t N, std::uint64_t seed) {
    if (N < 2) throw InvalidArgument("sine_kernel: N must be >= 2");
    const std::size_t M = 2 * N;
    SeededRng rng = SeededRng::derive(seed, 1);
    std::vector<double> x(M);
    for (double& v : x) v = rng.uniform();

    KernelMatrix out;
    out.K = DenseMatrix(N, M);
    DenseMatrix& K = out.K;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t kk = 0; kk < static_cast<std::ptrdiff_t>(N); ++kk) {
        const double w = 2.0 * kPi * static_cast<double>(kk + 1);
        double* row = K.data() + static_cast<std::size_t>(kk) * M;
        for (std::size_t i = 0; i < M; ++i) row[i] = std::sin(w * x[i]);
    }
    out.row_points = DenseMatrix(N, 1);
    out.col_points = DenseMatrix(M, 1, x);
    for (std::size_t k = 0; k < N; ++k) {
        out.row_points(k, 0) = static_cast<double>(k + 1);
        out.row_labels.push_back("k=" + std::to_string(k + 1));
    }
    for (std::size_t i = 0; i < M; ++i) out.col_labels.push_back("x=" + fmt(x[i]));
    std::vector<std::size_t> ord(M);
    std::iota(ord.begin(), ord.end(), 0);
    std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    out.row_natural = Permutation::identity(N);
    out.col_natural = Permutation(std::move(ord));
    return out;
}

KernelMatrix acoustic_kernel(std::size_t N, double nu, std::uint64_t seed) {
    KernelSpec{KernelFamily::acoustic, N, nu, Sampling::random, seed}.validate();
    DenseMatrix helix(N, 3), sheet(N, 3);
    for (std::size_t i = 0; i < N; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(N - 1);
        helix(i, 0) = std::cos(6.0 * kPi * t);
        helix(i, 1) = std::sin(6.0 * kPi * t);
        helix(i, 2) = 3.0 * t;
    }
    SeededRng rng = SeededRng::derive(seed, 2);
    for (std::size_t j = 0; j < N; ++j) {
        sheet(j, 0) = rng.uniform(-1.0, 1.0);
        sheet(j, 1) = rng.uniform(-1.0, 1.0);
        sheet(j, 2) = -1.5;
    }
    SeededRng prng = SeededRng::derive(seed, 3);
    const Permutation rp = Permutation::random(N, prng);
    const Permutation cp = Permutation::random(N, prng);

    KernelMatrix out;
    out.K = DenseMatrix(N, N);
    out.row_points = DenseMatrix(N, 3);
    out.col_points = DenseMatrix(N, 3);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t c = 0; c < 3; ++c) {
            out.row_points(i, c) = sheet(rp[i], c);
            out.col_points(i, c) = helix(cp[i], c);
        }
    double min_r = INFINITY;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) {
            const double dx = out.row_points(i, 0) - out.col_points(j, 0);
            const double dy = out.row_points(i, 1) - out.col_points(j, 1);
            const double dz = out.row_points(i, 2) - out.col_points(j, 2);
            const double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            min_r = std::min(min_r, r);
            out.K(i, j) = std::cos(2.0 * kPi * nu * r) / r;
        }
    if (min_r < 1e-6) throw NumericalError("acoustic_kernel: source and target closer than 1e-6");
    for (std::size_t i = 0; i < N; ++i) {
        out.row_labels.push_back("sheet " + std::to_string(rp[i]));
        out.col_labels.push_back("helix " + std::to_string(cp[i]));
    }
    out.row_natural = rp.inverse();
    out.col_natural = cp.inverse();
    return out;
}

std::size_t spherical_lmax(std::size_t N, Sampling sampling) {
    if (sampling == Sampling::random) {
        const double v = std::floor(-1.0 + std::sqrt(static_cast<double>(N) / 8.0));
        return v < 0.0 ? 0 : static_cast<std::size_t>(v);
    }
    std::size_t l = 0;
    while ((l + 2) * (2 * l + 3) <= N) ++l;
    return l;
}

std::vector<double> normalized_legendre(std::size_t l_max, std::size_t m, double x) {
    if (m > l_max) throw InvalidArgument("normalized_legendre: m > l_max");
    std::vector<double> out(l_max + 1, 0.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - x * x));
    double p = std::sqrt(1.0 / (4.0 * kPi));
    for (std::size_t i = 1; i <= m; ++i) {
        const auto di = static_cast<double>(i);
        p *= s * std::sqrt((2.0 * di + 1.0) / (2.0 * di));
    }
    out[m] = p;
    if (m + 1 <= l_max) out[m + 1] = x * std::sqrt(2.0 * static_cast<double>(m) + 3.0) * p;
    const auto dm = static_cast<double>(m);
    for (std::size_t l = m + 2; l <= l_max; ++l) {
        const auto dl = static_cast<double>(l);
        const double a = std::sqrt((4.0 * dl * dl - 1.0) / (dl * dl - dm * dm));
        const double b = std::sqrt(((dl - 1.0) * (dl - 1.0) - dm * dm) / (4.0 * (dl - 1.0) * (dl - 1.0) - 1.0));
        out[l] = a * (x * out[l - 1] - b * out[l - 2]);
    }
    return out;
}

double real_spherical_harmonic(int l, int m, double theta, double phi) {
    if (l < 0 || std::abs(m) > l) throw InvalidArgument("real_spherical_harmonic: need |m| <= l");
    const auto am = static_cast<std::size_t>(std::abs(m));
    const double p = normalized_legendre(static_cast<std::size_t>(l), am, std::cos(theta))[static_cast<std::size_t>(l)];
    if (m == 0) return p;
    const double ang = static_cast<double>(am) * phi;
    return std::numbers::sqrt2 * p * (m > 0 ? std::cos(ang) : std::sin(ang));
}

namespace {

KernelMatrix spherical_from_points(const std::vector<double>& theta, const std::vector<double>& phi,
                                   std::size_t l_max) {
    const std::size_t n = theta.size(), M = (l_max + 1) * (l_max + 1);
    KernelMatrix out;
    out.K = DenseMatrix(n, M);
    DenseMatrix& K = out.K;
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const double x = std::cos(theta[i]);
        for (std::size_t m = 0; m <= l_max; ++m) {
            const std::vector<double> P = normalized_legendre(l_max, m, x);
            const double c = std::cos(static_cast<double>(m) * phi[i]);
            const double s = std::sin(static_cast<double>(m) * phi[i]);
            for (std::size_t l = m; l <= l_max; ++l) {
                const std::size_t base = l * l + l;
                if (m == 0) {
                    K(i, base) = P[l];
                } else {
                    K(i, base + m) = std::numbers::sqrt2 * P[l] * c;
                    K(i, base - m) = std::numbers::sqrt2 * P[l] * s;
                }
            }
        }
    }
    out.row_points = DenseMatrix(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        out.row_points(i, 0) = std::sin(theta[i]) * std::cos(phi[i]);
        out.row_points(i, 1) = std::sin(theta[i]) * std::sin(phi[i]);
        out.row_points(i, 2) = std::cos(theta[i]);
        out.row_labels.push_back("theta=" + fmt(theta[i]) + " phi=" + fmt(phi[i]));
    }
    out.col_points = DenseMatrix(M, 2);
    for (std::size_t l = 0; l <= l_max; ++l)
        for (std::size_t j = 0; j <= 2 * l; ++j) {
            const long m = static_cast<long>(j) - static_cast<long>(l);
            out.col_points(l * l + j, 0) = static_cast<double>(l);
            out.col_points(l * l + j, 1) = static_cast<double>(m);
            out.col_labels.push_back("l=" + std::to_string(l) + " m=" + std::to_string(m));
        }
    out.row_natural = Permutation::identity(n);
    out.col_natural = Permutation::identity(M);
    return out;
}

}  // namespace

KernelMatrix spherical_harmonics_grid(std::size_t l_max) {
    if (l_max < 1) throw InvalidArgument("spherical_harmonics_grid: l_max must be >= 1");
    const std::size_t nt = l_max + 1, np = 2 * l_max + 1;
    std::vector<double> theta, phi;
    for (std::size_t i = 0; i < nt; ++i)
        for (std::size_t j = 0; j < np; ++j) {
            theta.push_back(static_cast<double>(i) * kPi / static_cast<double>(nt - 1));
            phi.push_back(2.0 * kPi * static_cast<double>(j) / static_cast<double>(np));
        }
    return spherical_from_points(theta, phi, l_max);
}

KernelMatrix spherical_harmonics_kernel(std::size_t N, Sampling sampling, std::uint64_t seed) {
    const std::size_t l_max = spherical_lmax(N, sampling);
    if (l_max < 1)
        throw InvalidArgument("spherical_harmonics_kernel: N=" + std::to_string(N) + " gives l_max < 1");
    if (sampling == Sampling::grid) return spherical_harmonics_grid(l_max);
    SeededRng rng = SeededRng::derive(seed, 4);
    std::vector<double> theta(N), phi(N);
    for (std::size_t i = 0; i < N; ++i) {
        theta[i] = std::acos(2.0 * rng.uniform() - 1.0);
        phi[i] = 2.0 * kPi * rng.uniform();
    }
    return spherical_from_points(theta, phi, l_max);
}

KernelMatrix generate_kernel(const KernelSpec& spec) {
    spec.validate();
    switch (spec.family) {
        case KernelFamily::sine: return sine_kernel(spec.N, spec.seed);
        case KernelFamily::acoustic: return acoustic_kernel(spec.N, spec.nu, spec.seed);
        case KernelFamily::spherical: return spherical_harmonics_kernel(spec.N, spec.sampling, spec.seed);
    }
    throw InvalidArgument("generate_kernel: unknown family");
}

ShuffledVariants shuffle_variants(const DenseMatrix& K, std::uint64_t seed) {
    SeededRng rng = SeededRng::derive(seed, 5);
    ShuffledVariants v;
    v.permuted.rows = Permutation::random(K.rows(), rng);
    v.permuted.cols = Permutation::random(K.cols(), rng);
    v.permuted.K = permute_matrix(K, v.permuted.rows, v.permuted.cols);
    v.natural.rows = Permutation::identity(K.rows());
    v.natural.cols = Permutation::identity(K.cols());
    v.natural.K = K;
    return v;
}

}  // namespace gak
