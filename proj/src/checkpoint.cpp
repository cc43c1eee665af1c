#include "checkpoint.hpp"

#include <fstream>
#include <map>

#include "binio.hpp"
#include "error.hpp"

namespace dcacrn {

namespace {
constexpr char kMagic[4] = {'D', 'C', 'A', 'W'};
constexpr std::uint32_t kVersion = 1;

std::vector<NamedTensor> all_records(ModelParams& params) {
    std::vector<NamedTensor> v = params.trainable();
    for (auto& b : params.state_buffers()) v.push_back(b);
    return v;
}
} // namespace

void save_checkpoint(const std::filesystem::path& path, ModelParams& params) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw DataError("cannot write checkpoint file " + path.string());
    BinWriter w(os);
    w.bytes(kMagic, 4);
    w.u32(kVersion);
    for (const auto& nt : all_records(params)) {
        w.str(nt.name);
        w.u32(static_cast<std::uint32_t>(nt.tensor.rank()));
        for (std::size_t e : nt.tensor.shape()) w.u64(e);
        for (std::size_t i = 0; i < nt.tensor.size(); ++i)
            w.f32(static_cast<float>(nt.tensor.at(i)));
    }
    if (!os) throw DataError("write failed for " + path.string());
}

ModelParams load_checkpoint(const std::filesystem::path& path, const ModelConfig& config) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw DataError("cannot open checkpoint file " + path.string());
    BinReader r(is, path.string());

    char magic[4];
    r.bytes(magic, 4, "magic");
    if (std::string(magic, 4) != std::string(kMagic, 4)) {
        throw DataError(path.string() + ": bad magic (not a checkpoint) at offset 0");
    }
    const std::uint32_t version = r.u32("version");
    if (version != kVersion) {
        throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version) +
                        " (expected " + std::to_string(kVersion) + ") at offset 4");
    }

    ModelParams params = ModelParams::init(config, 0);
    std::map<std::string, Tensor> slots;
    for (auto& nt : all_records(params)) slots.emplace(nt.name, nt.tensor);

    std::map<std::string, bool> filled;
    while (!r.at_eof()) {
        const std::string name = r.str("record name");
        auto it = slots.find(name);
        if (it == slots.end()) {
            throw DataError(path.string() + ": unknown parameter record '" + name +
                            "' for this configuration");
        }
        const std::uint32_t rank = r.u32("rank");
        std::vector<std::size_t> shape(rank);
        for (auto& e : shape) e = r.u64("extent");
        if (shape != it->second.shape()) {
            throw DataError(path.string() + ": parameter '" + name + "' has shape " +
                            shape_string(shape) + ", expected " + shape_string(it->second.shape()));
        }
        for (std::size_t i = 0; i < it->second.size(); ++i)
            it->second.at(i) = static_cast<double>(r.f32("payload"));
        filled[name] = true;
    }
    for (const auto& [name, _] : slots) {
        if (!filled.count(name)) {
            throw DataError(path.string() + ": missing parameter record '" + name + "'");
        }
    }
    return params;
}

} // namespace dcacrn
