#ifndef DCACRN_ATTENTION_EXPORT_HPP
#define DCACRN_ATTENTION_EXPORT_HPP

#include <filesystem>
#include <span>

#include "model.hpp"

namespace dcacrn {

/// One N x N score matrix as plain CSV, full double precision.
void write_attention_csv(const std::filesystem::path& path, std::size_t regions,
                         std::span<const double> matrix);

/// SVG heatmap with a row-normalized color scale: each row is shaded
/// relative to its own maximum so patterns stay visible even though rows
/// sum to one.
void write_attention_svg(const std::filesystem::path& path, std::size_t regions,
                         std::span<const double> matrix);

std::vector<double> read_attention_csv(const std::filesystem::path& path, std::size_t regions);

} // namespace dcacrn

#endif // DCACRN_ATTENTION_EXPORT_HPP
