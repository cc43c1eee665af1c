#ifndef DCACRN_TIMESERIES_HPP
#define DCACRN_TIMESERIES_HPP

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace dcacrn {

/// One scan's per-region BOLD averages: M time points by N regions.
struct RoiTimeSeries {
    std::string subject_id;
    std::string scan_id;
    int label = -1;
    std::size_t time_points = 0; // M
    std::size_t regions = 0;     // N
    std::vector<double> values;  // row-major, rows are time points
    std::vector<std::string> region_names;

    double at(std::size_t t, std::size_t r) const { return values[t * regions + r]; }
    double& at(std::size_t t, std::size_t r) { return values[t * regions + r]; }
};

using LabelMap = std::map<std::string, int>;

/// Reads the delimited time-series format: UTF-8, comma separated, one
/// header row of region names, every following row one time point. Rejects
/// ragged rows, non-numeric and non-finite cells with their location.
RoiTimeSeries load_timeseries(const std::filesystem::path& path);

void write_timeseries(const std::filesystem::path& path, const RoiTimeSeries& ts);

/// A dataset directory holds one CSV per scan plus an index file
/// `scans.csv` with columns file,subject_id,scan_id,group and a
/// `labels.json` mapping group names to class indices.
struct Dataset {
    std::vector<RoiTimeSeries> scans;
    LabelMap label_map;
};

Dataset load_dataset(const std::filesystem::path& dir, const LabelMap& label_override = {});

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset);

} // namespace dcacrn

#endif // DCACRN_TIMESERIES_HPP
