#include "attention_export.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "error.hpp"

namespace dcacrn {

void write_attention_csv(const std::filesystem::path& path, std::size_t regions,
                         std::span<const double> matrix) {
    if (matrix.size() != regions * regions) throw ConfigError("attention matrix size mismatch");
    std::ofstream os(path);
    if (!os) throw DataError("cannot write attention file " + path.string());
    char buf[64];
    for (std::size_t i = 0; i < regions; ++i) {
        for (std::size_t j = 0; j < regions; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", matrix[i * regions + j]);
            if (j) os << ',';
            os << buf;
        }
        os << '\n';
    }
    if (!os) throw DataError("write failed for " + path.string());
}

void write_attention_svg(const std::filesystem::path& path, std::size_t regions,
                         std::span<const double> matrix) {
    if (matrix.size() != regions * regions) throw ConfigError("attention matrix size mismatch");
    std::ofstream os(path);
    if (!os) throw DataError("cannot write attention file " + path.string());

    const int cell = regions > 64 ? 4 : 16;
    const int side = static_cast<int>(regions) * cell;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << side << "\" height=\"" << side
       << "\" viewBox=\"0 0 " << side << " " << side << "\">\n";
    os << "<rect width=\"" << side << "\" height=\"" << side << "\" fill=\"#ffffff\"/>\n";
    for (std::size_t i = 0; i < regions; ++i) {
        double row_max = 0.0;
        for (std::size_t j = 0; j < regions; ++j)
            row_max = std::max(row_max, matrix[i * regions + j]);
        for (std::size_t j = 0; j < regions; ++j) {
            const double rel = row_max > 0.0 ? matrix[i * regions + j] / row_max : 0.0;
            // White to dark blue ramp.
            const int r = static_cast<int>(255.0 * (1.0 - rel));
            const int g = static_cast<int>(255.0 - 180.0 * rel);
            const int b = 255;
            char color[8];
            std::snprintf(color, sizeof color, "#%02x%02x%02x", r, g, b);
            os << "<rect x=\"" << j * cell << "\" y=\"" << i * cell << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << color << "\"/>\n";
        }
    }
    os << "</svg>\n";
    if (!os) throw DataError("write failed for " + path.string());
}

std::vector<double> read_attention_csv(const std::filesystem::path& path, std::size_t regions) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open attention file " + path.string());
    std::vector<double> out;
    out.reserve(regions * regions);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc()) throw DataError(path.string() + ": bad cell '" + cell + "'");
            out.push_back(v);
        }
    }
    if (out.size() != regions * regions) {
        throw DataError(path.string() + ": expected " + std::to_string(regions * regions) +
                        " values, got " + std::to_string(out.size()));
    }
    return out;
}

} // namespace dcacrn
