#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>

#include "gak/error.hpp"
#include "gak/io.hpp"

namespace gak {

namespace {

constexpr std::array<char, 6> kMagic = {'K', 'M', 'A', 'T', '1', '\n'};
constexpr std::size_t kHeaderBytes = 6 + 8 + 8;

void put_u64(std::string& buf, std::uint64_t v) {
    for (int b = 0; b < 8; ++b) buf.push_back(static_cast<char>((v >> (8 * b)) & 0xFF));
}

std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
    return v;
}

}  // namespace

void write_kmat(const std::filesystem::path& path, const DenseMatrix& K) {
    K.require_finite("write_kmat");
    std::string buf;
    buf.reserve(kHeaderBytes + 8 * K.size());
    buf.append(kMagic.data(), kMagic.size());
    put_u64(buf, K.rows());
    put_u64(buf, K.cols());
    for (double v : K.values()) put_u64(buf, std::bit_cast<std::uint64_t>(v));
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::io, "write_kmat: cannot open " + path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (!out) throw FormatError(FormatError::Kind::io, "write_kmat: write failed for " + path.string());
}

DenseMatrix read_kmat(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::io, "read_kmat: cannot open " + path.string());
    std::string buf((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* p = reinterpret_cast<const unsigned char*>(buf.data());

    const std::size_t magic_seen = std::min(buf.size(), kMagic.size());
    if (std::memcmp(buf.data(), kMagic.data(), std::min<std::size_t>(magic_seen, 4)) != 0 ||
        magic_seen < 4)
        throw FormatError(FormatError::Kind::bad_magic, "read_kmat: bad magic in " + path.string());
    if (magic_seen < kMagic.size())
        throw FormatError(FormatError::Kind::truncated, "read_kmat: truncated header in " + path.string());
    if (buf[4] != kMagic[4] || buf[5] != kMagic[5]) {
        if (buf[4] >= '0' && buf[4] <= '9' && buf[5] == '\n')
            throw FormatError(FormatError::Kind::version_mismatch,
                              std::string("read_kmat: unsupported version ") + buf[4] + " in " + path.string());
        throw FormatError(FormatError::Kind::bad_magic, "read_kmat: bad magic in " + path.string());
    }
    if (buf.size() < kHeaderBytes)
        throw FormatError(FormatError::Kind::truncated, "read_kmat: truncated header in " + path.string());

    const std::uint64_t rows = get_u64(p + 6);
    const std::uint64_t cols = get_u64(p + 14);
    if (cols != 0 && rows > (buf.size() / 8) / cols + 1)
        throw FormatError(FormatError::Kind::truncated, "read_kmat: truncated payload in " + path.string());
    const std::size_t count = static_cast<std::size_t>(rows * cols);
    if (buf.size() < kHeaderBytes + 8 * count)
        throw FormatError(FormatError::Kind::truncated, "read_kmat: truncated payload in " + path.string());
    if (buf.size() > kHeaderBytes + 8 * count)
        throw FormatError(FormatError::Kind::malformed, "read_kmat: trailing bytes in " + path.string());

    AlignedVector data(count);
    for (std::size_t i = 0; i < count; ++i)
        data[i] = std::bit_cast<double>(get_u64(p + kHeaderBytes + 8 * i));
    return DenseMatrix(rows, cols, std::move(data));
}

}  // namespace gak
