#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "simenh/enhancer/enhancer.hpp"
#include "simenh/gan/gan.hpp"
#include "simenh/signal/ops.hpp"

namespace simenh::pipeline {

// Everything that determines a run. Two configs with the same canonical text
// produce the same run id and, with the same build, the same bits.
struct PipelineConfig {
    signal::SignalSpec signal;
    int quantizer_levels = 8;
    std::optional<double> quantizer_min;  // empty: fit to the clean signal
    std::optional<double> quantizer_max;
    double noise_sigma = 0.05;
    int ma_window = 11;
    enhancer::EnhancerConfig enhancer;  // seeds are derived from master_seed at run time
    double train_fraction = 0.9;
    gan::GanConfig gan;
    std::optional<double> gan_noise_scale;  // empty: 3 x real-noise standard deviation
    int n_pairs = 200;
    int n_noise_windows = 200;
    std::uint64_t master_seed = 42;
    std::string out_dir = "runs";

    void validate() const;
    std::string canonical_text() const;  // excludes out_dir
    std::string config_hash() const;     // 16 hex digits over canonical_text
    std::string run_id() const;          // "run-" + config_hash
};

PipelineConfig default_config();

// INI-style file: [section] headers, key = value pairs, # or ; comments.
// Unknown sections or keys are errors; omitted keys keep their defaults.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& text, const std::string& origin);

}  // namespace simenh::pipeline
