#ifndef DCACRN_DFCN_HPP
#define DCACRN_DFCN_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "timeseries.hpp"

namespace dcacrn {

/// Sliding-window layout: window t covers rows [t*stride, t*stride + length).
struct WindowSpec {
    std::size_t length = 70; // L, in time points
    std::size_t stride = 2;  // s, in time points

    /// T = floor((M - L) / s) + 1; throws if the series is shorter than L.
    std::size_t count_for(std::size_t time_points) const;
    void validate() const;
};

/// Stack of T region-by-region correlation matrices for one scan.
struct DfcnTensor {
    std::string subject_id;
    std::string scan_id;
    int label = -1;
    std::size_t windows = 0; // T
    std::size_t regions = 0; // N
    std::vector<double> values; // row-major (t, i, j)
    bool degenerate = false;    // some window had a zero-variance region

    double at(std::size_t t, std::size_t i, std::size_t j) const {
        return values[(t * regions + i) * regions + j];
    }
    double& at(std::size_t t, std::size_t i, std::size_t j) {
        return values[(t * regions + i) * regions + j];
    }
};

/// Starting rows of every window; the t-th window is rows
/// [offsets[t], offsets[t] + spec.length).
std::vector<std::size_t> segment_windows(const RoiTimeSeries& ts, const WindowSpec& spec);

/// Pearson correlation of the N region columns over rows
/// [row0, row0 + length). Covariance and standard deviations use the
/// population (1/L) normalization; the matrix is computed on the upper
/// triangle and mirrored. A zero-variance region zeroes its whole row and
/// column (diagonal included) and reports degeneracy.
/// Returns the N x N matrix row-major.
std::vector<double> pearson_matrix(const RoiTimeSeries& ts, std::size_t row0, std::size_t length,
                                   bool* degenerate_flag = nullptr);

DfcnTensor build_dfcn(const RoiTimeSeries& ts, const WindowSpec& spec);

void write_dfcn(const std::filesystem::path& path, const DfcnTensor& t);
DfcnTensor read_dfcn(const std::filesystem::path& path);

} // namespace dcacrn

#endif // DCACRN_DFCN_HPP
