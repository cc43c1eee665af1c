#ifndef DCACRN_SYNTH_HPP
#define DCACRN_SYNTH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "timeseries.hpp"

namespace dcacrn {

/// A region subset sharing one latent signal. Regions inside the block end
/// up with pairwise Pearson correlation ~ `correlation` (sign alternates
/// across members when `correlation` is negative).
struct PlantedBlock {
    std::vector<std::size_t> regions;
    double correlation = 0.8;
};

struct SynthClassSpec {
    std::string group;
    std::vector<PlantedBlock> blocks;
};

/// Desk-scale generator spec: class-dependent planted correlation blocks
/// plus i.i.d. Gaussian noise, fully determined by the seed.
struct SynthSpec {
    std::vector<SynthClassSpec> classes;
    std::size_t subjects_per_class = 20;
    std::size_t scans_per_subject = 2;
    std::size_t time_points = 60; // M
    std::size_t regions = 16;     // N
    double noise = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
    static SynthSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Every scan is built as x[t, r] = sum_b a_b * z_b[t] + noise * eps[t, r]
/// over the blocks b of the scan's class that contain region r, with
/// amplitude a_b = noise * sqrt(rho / (1 - rho)) so two block members
/// correlate at a_b^2 / (a_b^2 + noise^2) = rho. With noise = 0 block
/// members carry the latent signal verbatim (correlation exactly 1).
Dataset synth_generate(const SynthSpec& spec);

/// Two-class spec used by the self-test benchmarks: one strongly
/// correlated block per class, disjoint between classes.
SynthSpec default_benchmark_spec();

} // namespace dcacrn

#endif // DCACRN_SYNTH_HPP
