#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "simenh/pipeline/config.hpp"
#include "simenh/signal/time_series.hpp"
#include "simenh/store/manifest.hpp"

namespace simenh::pipeline {

// Execution order. Each stage consumes artifacts of earlier stages; running a
// later stage runs (or, under resume, reloads) everything before it.
enum class Stage {
    synth,
    quantize,
    paired_dataset,
    train_enhancer,
    enhance,
    extract_noise,
    noise_dataset,
    train_gan,
    generate_noise,
    combine,
};

const char* stage_name(Stage stage);
Stage stage_from_name(const std::string& name);

struct PipelineResult {
    std::filesystem::path run_dir;
    store::RunManifest manifest;  // written only when the final stage completed
    signal::TimeSeries enhanced;
    signal::TimeSeries generated_noise;
    signal::TimeSeries combined;
};

// Runs stages up to and including `up_to` inside out_dir/<run_id>. With
// resume, stages whose artifacts already exist are reloaded instead of
// recomputed; progress.json tracks what finished. The manifest appears only
// after the full chain has run.
PipelineResult run_pipeline(const PipelineConfig& config, bool resume = false,
                            Stage up_to = Stage::combine);

// Elementwise sum; both series must share timestamps and length.
signal::TimeSeries combine_series(const signal::TimeSeries& enhanced,
                                  const signal::TimeSeries& noise);

// Writes plot-ready CSVs under <run_dir>/plots for a completed run.
std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir,
                                     const std::string& view);
std::vector<std::string> plot_views();

}  // namespace simenh::pipeline
