#include "timeseries.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "error.hpp"

namespace dcacrn {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            cells.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

double parse_cell(const std::string& cell, const std::filesystem::path& path, std::size_t row,
                  std::size_t col) {
    const std::string t = trim(cell);
    auto where = [&]() {
        return path.string() + ": row " + std::to_string(row) + ", column " + std::to_string(col);
    };
    double v = 0.0;
    const char* begin = t.data();
    const char* end = begin + t.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end || t.empty()) {
        throw DataError(where() + ": cell '" + t + "' is not numeric");
    }
    if (!std::isfinite(v)) {
        throw DataError(where() + ": cell '" + t + "' is not finite");
    }
    return v;
}

} // namespace

RoiTimeSeries load_timeseries(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open time series file " + path.string());

    RoiTimeSeries ts;
    std::string line;
    if (!std::getline(is, line)) throw DataError(path.string() + ": empty file");
    for (const auto& name : split_csv_line(line)) ts.region_names.push_back(trim(name));
    ts.regions = ts.region_names.size();
    if (ts.regions < 2) {
        throw DataError(path.string() + ": needs at least 2 regions, header has " +
                        std::to_string(ts.regions));
    }

    std::size_t row = 1; // header was row 1
    while (std::getline(is, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != ts.regions) {
            throw DataError(path.string() + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected " + std::to_string(ts.regions));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            ts.values.push_back(parse_cell(cells[c], path, row, c + 1));
        }
        ++ts.time_points;
    }
    if (ts.time_points == 0) throw DataError(path.string() + ": no time point rows");
    return ts;
}

void write_timeseries(const std::filesystem::path& path, const RoiTimeSeries& ts) {
    std::ofstream os(path);
    if (!os) throw DataError("cannot write time series file " + path.string());
    for (std::size_t r = 0; r < ts.regions; ++r) {
        if (r) os << ',';
        os << (r < ts.region_names.size() ? ts.region_names[r] : "r" + std::to_string(r));
    }
    os << '\n';
    char buf[64];
    for (std::size_t t = 0; t < ts.time_points; ++t) {
        for (std::size_t r = 0; r < ts.regions; ++r) {
            std::snprintf(buf, sizeof buf, "%.17g", ts.at(t, r));
            if (r) os << ',';
            os << buf;
        }
        os << '\n';
    }
    if (!os) throw DataError("write failed for " + path.string());
}

Dataset load_dataset(const std::filesystem::path& dir, const LabelMap& label_override) {
    const auto index_path = dir / "scans.csv";
    std::ifstream is(index_path);
    if (!is) throw DataError("cannot open dataset index " + index_path.string());

    Dataset ds;
    ds.label_map = label_override;
    if (ds.label_map.empty()) {
        const auto labels_path = dir / "labels.json";
        std::ifstream ls(labels_path);
        if (!ls) {
            throw DataError("dataset has no labels.json and no label map was supplied: " +
                            labels_path.string());
        }
        nlohmann::json j;
        try {
            ls >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(labels_path.string() + ": " + e.what());
        }
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!it.value().is_number_integer()) {
                throw DataError(labels_path.string() + ": label for group '" + it.key() +
                                "' must be an integer");
            }
            ds.label_map[it.key()] = it.value().get<int>();
        }
    }

    std::string line;
    if (!std::getline(is, line)) throw DataError(index_path.string() + ": empty index");
    if (trim(line) != "file,subject_id,scan_id,group") {
        throw DataError(index_path.string() + ": expected header 'file,subject_id,scan_id,group'");
    }
    std::size_t row = 1;
    while (std::getline(is, line)) {
        ++row;
        if (trim(line).empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 4) {
            throw DataError(index_path.string() + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " cells, expected 4");
        }
        const std::string group = trim(cells[3]);
        auto it = ds.label_map.find(group);
        if (it == ds.label_map.end()) {
            throw DataError(index_path.string() + ": row " + std::to_string(row) + ": group '" + group +
                            "' is not in the label map");
        }
        RoiTimeSeries ts = load_timeseries(dir / trim(cells[0]));
        ts.subject_id = trim(cells[1]);
        ts.scan_id = trim(cells[2]);
        ts.label = it->second;
        ds.scans.push_back(std::move(ts));
    }
    if (ds.scans.empty()) throw DataError(index_path.string() + ": no scans listed");
    return ds;
}

void write_dataset(const std::filesystem::path& dir, const Dataset& dataset) {
    std::filesystem::create_directories(dir);
    std::map<int, std::string> group_of;
    for (const auto& [group, label] : dataset.label_map) group_of[label] = group;

    std::ofstream idx(dir / "scans.csv");
    if (!idx) throw DataError("cannot write dataset index in " + dir.string());
    idx << "file,subject_id,scan_id,group\n";
    for (const auto& ts : dataset.scans) {
        auto git = group_of.find(ts.label);
        if (git == group_of.end()) {
            throw ConfigError("scan " + ts.scan_id + " has label " + std::to_string(ts.label) +
                              " outside the label map");
        }
        const std::string file = ts.scan_id + ".csv";
        write_timeseries(dir / file, ts);
        idx << file << ',' << ts.subject_id << ',' << ts.scan_id << ',' << git->second << '\n';
    }

    nlohmann::json labels;
    for (const auto& [group, label] : dataset.label_map) labels[group] = label;
    std::ofstream ls(dir / "labels.json");
    ls << labels.dump(2) << '\n';
    if (!ls) throw DataError("cannot write labels.json in " + dir.string());
}

} // namespace dcacrn
