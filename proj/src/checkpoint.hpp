#ifndef DCACRN_CHECKPOINT_HPP
#define DCACRN_CHECKPOINT_HPP

#include <filesystem>

#include "model.hpp"

namespace dcacrn {

/// Writes every trainable parameter and BN running buffer as a named
/// record: name length + UTF-8 name, rank, extents as u64, then the values
/// as little-endian f32. Round trips are bit exact at f32 precision.
void save_checkpoint(const std::filesystem::path& path, ModelParams& params);

/// Rebuilds a parameter set for `config` and fills every tensor from the
/// file. Missing, unknown, or reshaped records are data errors.
ModelParams load_checkpoint(const std::filesystem::path& path, const ModelConfig& config);

} // namespace dcacrn

#endif // DCACRN_CHECKPOINT_HPP
