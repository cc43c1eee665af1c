#include "dfcn.hpp"

#include <cmath>
#include <fstream>

#include "binio.hpp"
#include "error.hpp"

namespace dcacrn {

namespace {
constexpr char kMagic[4] = {'D', 'F', 'C', 'N'};
constexpr std::uint32_t kVersion = 1;
} // namespace

void WindowSpec::validate() const {
    if (length < 2) throw ConfigError("window length must be >= 2, got " + std::to_string(length));
    if (stride < 1) throw ConfigError("window stride must be >= 1");
}

std::size_t WindowSpec::count_for(std::size_t time_points) const {
    validate();
    if (length > time_points) {
        throw ConfigError("window length " + std::to_string(length) + " exceeds series length " +
                          std::to_string(time_points));
    }
    return (time_points - length) / stride + 1;
}

std::vector<std::size_t> segment_windows(const RoiTimeSeries& ts, const WindowSpec& spec) {
    const std::size_t count = spec.count_for(ts.time_points);
    std::vector<std::size_t> offsets(count);
    for (std::size_t t = 0; t < count; ++t) offsets[t] = t * spec.stride;
    return offsets;
}

std::vector<double> pearson_matrix(const RoiTimeSeries& ts, std::size_t row0, std::size_t length,
                                   bool* degenerate_flag) {
    const std::size_t n = ts.regions;
    if (length < 2) throw ConfigError("pearson_matrix needs at least 2 rows");
    if (row0 + length > ts.time_points) throw ConfigError("pearson_matrix window out of range");

    std::vector<double> mean(n, 0.0), sd(n, 0.0);
    for (std::size_t r = 0; r < length; ++r)
        for (std::size_t j = 0; j < n; ++j) mean[j] += ts.at(row0 + r, j);
    for (std::size_t j = 0; j < n; ++j) mean[j] /= static_cast<double>(length);
    for (std::size_t r = 0; r < length; ++r)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = ts.at(row0 + r, j) - mean[j];
            sd[j] += d * d;
        }
    std::vector<bool> flat(n, false);
    bool any_flat = false;
    for (std::size_t j = 0; j < n; ++j) {
        sd[j] = std::sqrt(sd[j] / static_cast<double>(length));
        if (sd[j] == 0.0) {
            flat[j] = true;
            any_flat = true;
        }
    }
    if (degenerate_flag) *degenerate_flag = *degenerate_flag || any_flat;

    std::vector<double> out(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        if (flat[j]) continue; // row and column stay zero, diagonal included
        out[j * n + j] = 1.0;
        for (std::size_t k = j + 1; k < n; ++k) {
            if (flat[k]) continue;
            double cov = 0.0;
            for (std::size_t r = 0; r < length; ++r)
                cov += (ts.at(row0 + r, j) - mean[j]) * (ts.at(row0 + r, k) - mean[k]);
            cov /= static_cast<double>(length);
            double rho = cov / (sd[j] * sd[k]);
            rho = std::min(1.0, std::max(-1.0, rho));
            out[j * n + k] = rho;
            out[k * n + j] = rho; // mirror: symmetric by construction
        }
    }
    return out;
}

DfcnTensor build_dfcn(const RoiTimeSeries& ts, const WindowSpec& spec) {
    const auto offsets = segment_windows(ts, spec);
    DfcnTensor out;
    out.subject_id = ts.subject_id;
    out.scan_id = ts.scan_id;
    out.label = ts.label;
    out.windows = offsets.size();
    out.regions = ts.regions;
    out.values.reserve(out.windows * out.regions * out.regions);
    for (std::size_t t = 0; t < offsets.size(); ++t) {
        auto m = pearson_matrix(ts, offsets[t], spec.length, &out.degenerate);
        out.values.insert(out.values.end(), m.begin(), m.end());
    }
    return out;
}

void write_dfcn(const std::filesystem::path& path, const DfcnTensor& t) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write dFCN file " + path.string());
    BinWriter w(os);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    w.u64(t.windows);
    w.u64(t.regions);
    for (double v : t.values) w.f32(static_cast<float>(v));
    w.str(t.subject_id);
    w.str(t.scan_id);
    w.i32(t.label);
    if (!os) throw DataError("write failed for " + path.string());
}

DfcnTensor read_dfcn(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open dFCN file " + path.string());
    BinReader r(is, path.string());

    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::string(magic, 4) != std::string(kMagic, 4)) {
        throw DataError(path.string() + ": bad magic (not a dFCN file) at offset 0");
    }
    const std::uint32_t version = r.u32("version");
    if (version != kVersion) {
        throw DataError(path.string() + ": unsupported dFCN version " + std::to_string(version) +
                        " (expected " + std::to_string(kVersion) + ") at offset 4");
    }
    DfcnTensor t;
    t.windows = r.u64("window count");
    t.regions = r.u64("region count");
    if (t.windows == 0 || t.regions < 2) r.fail_here("implausible dimensions");
    const std::size_t count = t.windows * t.regions * t.regions;
    t.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) t.values[i] = static_cast<double>(r.f32("values"));
    t.subject_id = r.str("subject_id");
    t.scan_id = r.str("scan_id");
    t.label = r.i32("label");
    if (!r.at_eof()) r.fail_here("trailing bytes after metadata");
    for (std::size_t w = 0; w < t.windows && !t.degenerate; ++w)
        for (std::size_t i = 0; i < t.regions; ++i)
            if (t.at(w, i, i) == 0.0) {
                t.degenerate = true;
                break;
            }
    return t;
}

} // namespace dcacrn
