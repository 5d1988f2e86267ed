#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "gak/core.hpp"
#include "gak/error.hpp"
#include "gak/pairwise.hpp"

using namespace gak;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) { return fs::temp_directory_path() / ("gak_test_" + name); }

void write_bytes(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

FormatError::Kind kind_of_read(const fs::path& p) {
    try {
        (void)read_kmat(p);
    } catch (const FormatError& e) {
        return e.kind();
    }
    FAIL("read_kmat accepted a broken file");
    return FormatError::Kind::io;
}

}  // namespace

TEST_CASE("rng: SplitMix64 reference outputs") {
    // Values from a direct transcription of the published algorithm.
    SeededRng r(0);
    CHECK(r.next_u64() == 0xe220a8397b1dcdafULL);
    CHECK(r.next_u64() == 0x6e789e6aa1b965f4ULL);
    CHECK(r.next_u64() == 0x06c45d188009454fULL);
    SeededRng s(12345);
    CHECK(s.uniform() == 0.1330796686614273);
}

TEST_CASE("rng: streams are deterministic and bounded") {
    SeededRng a = SeededRng::derive(7, 3), b = SeededRng::derive(7, 3), c = SeededRng::derive(7, 4);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next_u64();
        CHECK(x == b.next_u64());
        differs |= x != c.next_u64();
    }
    CHECK(differs);
    SeededRng r(1);
    std::vector<int> hits(7, 0);
    for (int i = 0; i < 7000; ++i) {
        const auto v = r.below(7);
        REQUIRE(v < 7);
        ++hits[v];
    }
    for (int h : hits) CHECK(h > 800);
    double m = 0.0, m2 = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double z = r.normal();
        m += z;
        m2 += z * z;
    }
    CHECK(std::fabs(m / 20000) < 0.05);
    CHECK(std::fabs(m2 / 20000 - 1.0) < 0.05);
}

TEST_CASE("dense matrix: construction and basic ops") {
    CHECK_THROWS_AS(DenseMatrix(2, 2, {1, 2, 3}), DimensionError);
    CHECK_THROWS_AS(DenseMatrix(1, 2, {1, NAN}), NumericalError);
    const DenseMatrix A(2, 3, {1, 2, 3, 4, 5, 6});
    const DenseMatrix T = A.transpose();
    CHECK(T.rows() == 3);
    CHECK(T(2, 1) == 6);
    CHECK(A.frobenius_norm() == doctest::Approx(std::sqrt(91.0)));
    const std::vector<std::size_t> r{1}, c{2, 0};
    const DenseMatrix S = A.select(r, c);
    CHECK(S == DenseMatrix(1, 2, {6, 4}));
    const auto y = matvec(A, std::vector<double>{1, 0, -1});
    CHECK(y == std::vector<double>{-2, -2});
    CHECK_THROWS_AS(matvec(A, std::vector<double>{1, 2}), DimensionError);
    CHECK(DenseMatrix::identity(3)(1, 1) == 1.0);
}

TEST_CASE("dense matrix: storage is 64-byte aligned") {
    std::vector<DenseMatrix> ms;
    for (std::size_t n = 1; n < 40; ++n) {
        ms.emplace_back(n, 3);
        ms.emplace_back(n, 1, std::vector<double>(n, 1.0));
        ms.push_back(ms.back().transpose());
    }
    for (const auto& m : ms) CHECK(reinterpret_cast<std::uintptr_t>(m.data()) % 64 == 0);
}

TEST_CASE("permutation: gather, scatter, inverse") {
    CHECK_THROWS_AS(Permutation({0, 0, 1}), InvalidArgument);
    const Permutation p({2, 0, 1});
    const std::vector<double> v{10, 20, 30};
    CHECK(p.gather(v) == std::vector<double>{30, 10, 20});
    CHECK(p.scatter(p.gather(v)) == v);
    CHECK(p.then(p.inverse()) == Permutation::identity(3));
    SeededRng rng(4);
    const Permutation q = Permutation::random(50, rng);
    std::vector<std::size_t> m = q.map();
    std::sort(m.begin(), m.end());
    for (std::size_t i = 0; i < 50; ++i) CHECK(m[i] == i);
    const DenseMatrix A(2, 3, {1, 2, 3, 4, 5, 6});
    const DenseMatrix B = permute_matrix(A, Permutation({1, 0}), p);
    CHECK(B == DenseMatrix(2, 3, {6, 4, 5, 3, 1, 2}));
}

TEST_CASE("kmat: round trip and header layout") {
    const auto path = temp_file("rt.kmat");
    const DenseMatrix A(2, 3, {1.5, -2, 3e-300, 4, 5, 6});
    write_kmat(path, A);
    const std::string bytes = read_bytes(path);
    CHECK(bytes.size() == 22 + 48);
    CHECK(bytes.substr(0, 6) == "KMAT1\n");
    CHECK(static_cast<unsigned char>(bytes[6]) == 2);
    CHECK(static_cast<unsigned char>(bytes[14]) == 3);
    CHECK(read_kmat(path) == A);
    fs::remove(path);
}

TEST_CASE("kmat: corrupt files are classified") {
    const auto path = temp_file("bad.kmat");
    const DenseMatrix A(2, 2, {1, 2, 3, 4});
    write_kmat(path, A);
    const std::string good = read_bytes(path);

    write_bytes(path, "XMAT1\n" + good.substr(6));
    CHECK(kind_of_read(path) == FormatError::Kind::bad_magic);
    write_bytes(path, "KMAT2\n" + good.substr(6));
    CHECK(kind_of_read(path) == FormatError::Kind::version_mismatch);
    write_bytes(path, good.substr(0, 10));
    CHECK(kind_of_read(path) == FormatError::Kind::truncated);
    write_bytes(path, good.substr(0, good.size() - 3));
    CHECK(kind_of_read(path) == FormatError::Kind::truncated);
    write_bytes(path, good + "x");
    CHECK(kind_of_read(path) == FormatError::Kind::malformed);
    fs::remove(path);
    CHECK(kind_of_read(path) == FormatError::Kind::io);
}

TEST_CASE("csv: 17-digit round trip") {
    const CsvTable t{{0.1, 1.0 / 3.0}, {-2.5e-300, 12345678.901234567}};
    const std::vector<std::string> header{"a", "b"};
    const std::string text = to_csv(t, header);
    CHECK(text.substr(0, 4) == "a,b\n");
    CHECK(parse_csv(text, true) == t);
    CHECK_THROWS_AS(parse_csv("1,x\n", false), FormatError);
}

TEST_CASE("storage accounting") {
    StorageCount s{10, 6};
    CHECK(s.bytes() == 128);
    s += StorageCount{0, 131056};
    CHECK(s.bytes() == 1048576);
    CHECK(StorageCount{131072, 0}.megabytes() == 1.0);
}

TEST_CASE("pairwise kernels: OpenMP and serial agree bit for bit") {
    SeededRng rng(9);
    DenseMatrix F(37, 21);
    for (std::size_t i = 0; i < F.size(); ++i) F.data()[i] = rng.normal();
    std::vector<double> w(21);
    for (double& x : w) x = rng.uniform();
    const std::vector<Segment> segs{{0, 21, 1.0}, {0, 10, 0.5}, {10, 11, 0.25}, {3, 1, 2.0}};
    CHECK(par::pairwise_weighted_l1(F, w) == ref::pairwise_weighted_l1(F, w));
    CHECK(par::pairwise_segment_l2(F, segs) == ref::pairwise_segment_l2(F, segs));
    CHECK(par::pairwise_segment_abs_dot(F, segs) == ref::pairwise_segment_abs_dot(F, segs));
    std::vector<double> x(21), y1(37), y2(37);
    for (double& v : x) v = rng.normal();
    par::matvec(F.data(), 37, 21, x.data(), y1.data());
    ref::matvec(F.data(), 37, 21, x.data(), y2.data());
    CHECK(y1 == y2);

    const DenseMatrix D = ref::pairwise_weighted_l1(F, w);
    double expect = 0.0;
    for (std::size_t c = 0; c < 21; ++c) expect += w[c] * std::fabs(F(3, c) - F(8, c));
    CHECK(D(3, 8) == doctest::Approx(expect).epsilon(1e-14));
}
