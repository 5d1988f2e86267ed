#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "gak/error.hpp"
#include "gak/io.hpp"

namespace gak {

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string to_csv(const CsvTable& rows, std::span<const std::string> header) {
    std::string out;
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (j) out += ',';
        out += header[j];
    }
    if (!header.empty()) out += '\n';
    for (const auto& r : rows) {
        for (std::size_t j = 0; j < r.size(); ++j) {
            if (j) out += ',';
            out += format_double(r[j]);
        }
        out += '\n';
    }
    return out;
}

CsvTable parse_csv(const std::string& text, bool has_header) {
    CsvTable rows;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first && has_header) {
            first = false;
            continue;
        }
        first = false;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t end = line.find(',', pos);
            if (end == std::string::npos) end = line.size();
            double v = 0.0;
            auto res = std::from_chars(line.data() + pos, line.data() + end, v);
            if (res.ec != std::errc() || res.ptr != line.data() + end)
                throw FormatError(FormatError::Kind::malformed, "parse_csv: bad field '" +
                                                                    line.substr(pos, end - pos) + "'");
            row.push_back(v);
            pos = end + 1;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(FormatError::Kind::io, "cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw FormatError(FormatError::Kind::io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(FormatError::Kind::io, "cannot open " + path.string());
    return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace gak
