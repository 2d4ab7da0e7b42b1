#pragma once

#include <filesystem>
#include <string>

#include "simenh/nn/model.hpp"

namespace simenh::nn {

struct LoadedCheckpoint {
    NetworkModel model;
    std::string config_hash;
};

// Binary checkpoint: layer specs, parameters, Adam state, batch-norm running
// statistics, step counter, metadata, and the owning config hash. Doubles are
// stored as raw IEEE-754 bits, so save -> load -> save is byte-identical.
void save_checkpoint(const NetworkModel& model, const std::filesystem::path& path,
                     const std::string& config_hash);
LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace simenh::nn
