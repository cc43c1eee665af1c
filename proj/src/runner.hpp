#ifndef DCACRN_RUNNER_HPP
#define DCACRN_RUNNER_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dfcn.hpp"
#include "model.hpp"
#include "synth.hpp"

namespace dcacrn {

/// Effective configuration of one pipeline run. Strict parse: unknown keys
/// are rejected so typos never silently fall back to defaults.
struct RunConfig {
    std::uint64_t seed = 0;
    std::filesystem::path out;
    std::optional<std::filesystem::path> data;
    std::optional<std::filesystem::path> checkpoint;
    LabelMap labels;
    int positive_class = 1;
    WindowSpec window;
    ModelConfig model;
    std::size_t epochs = 200;
    std::size_t batch = 16;
    double lr = 1e-3;
    std::size_t folds = 5;
    std::optional<SynthSpec> synth;

    static RunConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

/// Executes one CLI command against a parsed configuration. Outputs are
/// written as `<name>.partial` and renamed on success, so an aborted run
/// leaves only clearly marked partial files. Throws Config/Data/Numeric
/// errors; the C API maps them to status codes.
void run_command(const std::string& command, const nlohmann::json& config_json);

} // namespace dcacrn

#endif // DCACRN_RUNNER_HPP
