#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gak/dense_matrix.hpp"

namespace gak {

// KMAT: "KMAT1\n", u64 LE rows, u64 LE cols, row-major LE f64 payload.
void write_kmat(const std::filesystem::path& path, const DenseMatrix& K);
DenseMatrix read_kmat(const std::filesystem::path& path);

// Shortest text that keeps 17 significant digits.
std::string format_double(double v);

using CsvTable = std::vector<std::vector<double>>;

std::string to_csv(const CsvTable& rows, std::span<const std::string> header = {});
CsvTable parse_csv(const std::string& text, bool has_header);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Stored-size bookkeeping: 8 bytes per float entry and per index.
struct StorageCount {
    std::size_t floats = 0;
    std::size_t indices = 0;

    std::size_t bytes() const noexcept { return 8 * (floats + indices); }
    double megabytes() const noexcept { return static_cast<double>(bytes()) / 1048576.0; }

    StorageCount& operator+=(const StorageCount& o) noexcept {
        floats += o.floats;
        indices += o.indices;
        return *this;
    }
    friend bool operator==(const StorageCount&, const StorageCount&) = default;
};

}  // namespace gak
