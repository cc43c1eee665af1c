#include "synth.hpp"

#include <cmath>
#include <random>

#include "error.hpp"

namespace dcacrn {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Box-Muller on the 53-bit uniform; the spare value is discarded so the
// stream depends only on the draw count.
double gaussian(std::mt19937_64& rng) {
    double u1 = uniform01(rng);
    while (u1 == 0.0) u1 = uniform01(rng);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

} // namespace

void SynthSpec::validate() const {
    if (classes.size() < 2) throw ConfigError("synth: need at least 2 classes");
    if (subjects_per_class < 1) throw ConfigError("synth: subjects_per_class must be >= 1");
    if (scans_per_subject < 1) throw ConfigError("synth: scans_per_subject must be >= 1");
    if (time_points < 4) throw ConfigError("synth: m must be >= 4");
    if (regions < 2) throw ConfigError("synth: n must be >= 2");
    if (noise < 0.0) throw ConfigError("synth: noise must be >= 0");
    for (const auto& cls : classes) {
        for (const auto& block : cls.blocks) {
            if (block.regions.empty()) throw ConfigError("synth: block with no regions");
            for (std::size_t r : block.regions) {
                if (r >= regions) {
                    throw ConfigError("synth: block region " + std::to_string(r) +
                                      " out of range for n=" + std::to_string(regions));
                }
            }
            if (!(std::abs(block.correlation) < 1.0)) {
                throw ConfigError("synth: block correlation must lie in (-1, 1)");
            }
        }
    }
}

SynthSpec SynthSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("synth config must be an object");
    SynthSpec s;
    bool saw_classes = false;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const nlohmann::json& v = it.value();
        if (key == "classes") {
            if (!v.is_array()) throw ConfigError("synth: 'classes' must be an array");
            saw_classes = true;
            for (const auto& cj : v) {
                SynthClassSpec cls;
                for (auto cit = cj.begin(); cit != cj.end(); ++cit) {
                    if (cit.key() == "group") cls.group = cit.value().get<std::string>();
                    else if (cit.key() == "blocks") {
                        for (const auto& bj : cit.value()) {
                            PlantedBlock b;
                            for (auto bit = bj.begin(); bit != bj.end(); ++bit) {
                                if (bit.key() == "regions") {
                                    b.regions = bit.value().get<std::vector<std::size_t>>();
                                } else if (bit.key() == "correlation") {
                                    b.correlation = bit.value().get<double>();
                                } else {
                                    throw ConfigError("synth block: unknown key '" + bit.key() + "'");
                                }
                            }
                            cls.blocks.push_back(std::move(b));
                        }
                    } else {
                        throw ConfigError("synth class: unknown key '" + cit.key() + "'");
                    }
                }
                if (cls.group.empty()) cls.group = "class_" + std::to_string(s.classes.size());
                s.classes.push_back(std::move(cls));
            }
        } else if (key == "subjects_per_class") s.subjects_per_class = v.get<std::size_t>();
        else if (key == "scans_per_subject") s.scans_per_subject = v.get<std::size_t>();
        else if (key == "m") s.time_points = v.get<std::size_t>();
        else if (key == "n") s.regions = v.get<std::size_t>();
        else if (key == "noise") s.noise = v.get<double>();
        else if (key == "seed") s.seed = v.get<std::uint64_t>();
        else throw ConfigError("synth config: unknown key '" + key + "'");
    }
    if (!saw_classes) {
        SynthSpec base = default_benchmark_spec();
        base.regions = s.regions;
        s.classes = base.classes;
        if (s.regions < 16) throw ConfigError("synth: default classes need n >= 16 (or pass 'classes')");
    }
    s.validate();
    return s;
}

nlohmann::json SynthSpec::to_json() const {
    nlohmann::json j;
    nlohmann::json classes_json = nlohmann::json::array();
    for (const auto& cls : classes) {
        nlohmann::json cj;
        cj["group"] = cls.group;
        nlohmann::json blocks = nlohmann::json::array();
        for (const auto& b : cls.blocks) {
            blocks.push_back({{"regions", b.regions}, {"correlation", b.correlation}});
        }
        cj["blocks"] = blocks;
        classes_json.push_back(cj);
    }
    j["classes"] = classes_json;
    j["subjects_per_class"] = subjects_per_class;
    j["scans_per_subject"] = scans_per_subject;
    j["m"] = time_points;
    j["n"] = regions;
    j["noise"] = noise;
    j["seed"] = seed;
    return j;
}

SynthSpec default_benchmark_spec() {
    SynthSpec s;
    s.classes = {
        {"class_0", {{{0, 1, 2, 3, 4, 5}, 0.9}}},
        {"class_1", {{{8, 9, 10, 11, 12, 13}, 0.9}}},
    };
    return s;
}

Dataset synth_generate(const SynthSpec& spec) {
    spec.validate();
    Dataset ds;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        ds.label_map[spec.classes[c].group] = static_cast<int>(c);
    }

    std::vector<std::string> names(spec.regions);
    for (std::size_t r = 0; r < spec.regions; ++r) names[r] = "r" + std::to_string(r);

    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const auto& cls = spec.classes[c];
        for (std::size_t s = 0; s < spec.subjects_per_class; ++s) {
            const std::string subject = cls.group + "_s" + std::to_string(s);
            for (std::size_t scan = 0; scan < spec.scans_per_subject; ++scan) {
                // Every scan draws from its own deterministic stream.
                std::mt19937_64 rng(splitmix64(spec.seed ^ splitmix64((c << 40) ^ (s << 16) ^ scan)));

                RoiTimeSeries ts;
                ts.subject_id = subject;
                ts.scan_id = subject + "_r" + std::to_string(scan);
                ts.label = static_cast<int>(c);
                ts.time_points = spec.time_points;
                ts.regions = spec.regions;
                ts.region_names = names;
                ts.values.assign(spec.time_points * spec.regions, 0.0);

                for (const auto& block : cls.blocks) {
                    const double rho = std::abs(block.correlation);
                    const double amplitude =
                        spec.noise == 0.0 ? 1.0 : spec.noise * std::sqrt(rho / (1.0 - rho));
                    for (std::size_t t = 0; t < spec.time_points; ++t) {
                        const double z = gaussian(rng);
                        for (std::size_t k = 0; k < block.regions.size(); ++k) {
                            const double sign =
                                (block.correlation < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
                            ts.at(t, block.regions[k]) += sign * amplitude * z;
                        }
                    }
                }
                if (spec.noise > 0.0) {
                    for (std::size_t t = 0; t < spec.time_points; ++t)
                        for (std::size_t r = 0; r < spec.regions; ++r)
                            ts.at(t, r) += spec.noise * gaussian(rng);
                }
                ds.scans.push_back(std::move(ts));
            }
        }
    }
    return ds;
}

} // namespace dcacrn
