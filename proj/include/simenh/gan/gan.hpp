#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "simenh/nn/matrix.hpp"
#include "simenh/nn/model.hpp"
#include "simenh/signal/ops.hpp"

namespace simenh::gan {

struct GanConfig {
    int latent_dim = 16;
    int generator_hidden = 64;
    int sample_len = 500;
    int iterations = 1000;
    int batch_size = 200;      // even; half real, half generated
    int metric_interval = 100;  // must divide iterations
    double noise_scale = 1.0;  // generator output multiplier, > 0
    int disc_filters = 4;
    int disc_window = 20;
    int disc_stride = 4;
    int disc_pool = 4;
    nn::AdamConfig adam{2e-4, 0.5, 0.999, 1e-8};
    std::uint64_t seed = 0;
    void validate() const;
};

struct GanMetricsRecord {
    int step = 0;
    double acc_real = 0.0;  // fraction of real rows scored above 0.5
    double acc_fake = 0.0;  // fraction of generated rows scored below 0.5
    double loss_d = 0.0;
    double loss_g = 0.0;
};

struct NoiseDataset {
    nn::Matrix windows;  // n x sample_len, raw units
};

NoiseDataset make_noise_dataset(const signal::TimeSeries& noise, int n_windows, int sample_len,
                                std::uint64_t seed);

// latent -> hidden (leaky relu) -> batch norm -> sample_len (tanh) -> reshape.
// The configured noise_scale rides along in model metadata; outputs of the
// model itself stay in [-1, 1].
nn::NetworkModel build_generator(const GanConfig& config);

// conv (filters x window, strided, leaky relu) -> max pool -> flatten
// -> 32 -> 8 -> 1 (sigmoid).
nn::NetworkModel build_discriminator(const GanConfig& config);

struct TrainPhaseInfo {
    int step = 0;
    const nn::Matrix* labels = nullptr;  // labels handed to the loss this phase
    double loss = 0.0;
};

// Observation points for tests; null hooks cost nothing.
struct TrainHooks {
    std::function<void(int step)> on_discriminator_begin;
    std::function<void(const TrainPhaseInfo&)> on_discriminator_end;
    std::function<void(int step)> on_generator_begin;
    std::function<void(const TrainPhaseInfo&)> on_generator_end;
};

// Alternating per step: (a) one discriminator update on batch_size/2 real
// windows labeled 1.0 plus batch_size/2 generated windows labeled 0.0, then
// (b) one generator update through the frozen discriminator on batch_size
// fresh latents, all labeled 1.0. Returns one metrics record per
// metric_interval steps.
std::vector<GanMetricsRecord> train_gan(nn::NetworkModel& generator,
                                        nn::NetworkModel& discriminator, const NoiseDataset& data,
                                        const GanConfig& config,
                                        const TrainHooks* hooks = nullptr);

// Inference-mode generation: count rows of scaled noise, one window per row.
nn::Matrix generate_noise(const nn::NetworkModel& generator, int count, std::uint64_t seed);

double noise_scale_of(const nn::NetworkModel& generator);

void save_noise_dataset(const NoiseDataset& dataset, const std::filesystem::path& path);
NoiseDataset load_noise_dataset(const std::filesystem::path& path);

}  // namespace simenh::gan
