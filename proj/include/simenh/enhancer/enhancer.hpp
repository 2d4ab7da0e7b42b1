#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "simenh/nn/matrix.hpp"
#include "simenh/nn/model.hpp"
#include "simenh/signal/ops.hpp"

namespace simenh::enhancer {

struct EnhancerConfig {
    int window_len = 500;
    int hidden_width = 3200;
    int epochs = 40;
    int batch_size = 15;
    nn::AdamConfig adam{1e-3, 0.9, 0.999, 1e-8};
    std::uint64_t init_seed = 0;   // weight initialization
    std::uint64_t train_seed = 0;  // batch shuffling
    void validate() const;
};

// Rows are normalized windows; sources and targets share norm so that the
// mapping between them stays linear.
struct PairedDataset {
    nn::Matrix sources;
    nn::Matrix targets;
    signal::NormParams norm;
    std::size_t size() const { return static_cast<std::size_t>(sources.rows); }
};

// window -> window -> hidden -> hidden -> window, tanh hidden layers, linear output.
nn::NetworkModel build_enhancer(const EnhancerConfig& config);

// Draws n_pairs random offsets shared between both series and normalizes every
// window to [-1, 1] using the union range of the two full series.
PairedDataset make_paired_dataset(const signal::TimeSeries& coarse,
                                  const signal::TimeSeries& fine, int n_pairs, int window_len,
                                  std::uint64_t seed);

// First `ceil(fraction * n)` rows train, the rest are held out. Split happens
// by row index before any shuffling.
std::pair<PairedDataset, PairedDataset> split_dataset(const PairedDataset& dataset,
                                                      double train_fraction);

// Minimizes mean squared error with Adam; rows are reshuffled every epoch and
// a trailing partial batch is dropped. Returns the mean batch loss per epoch.
std::vector<double> train_enhancer(nn::NetworkModel& model, const PairedDataset& dataset,
                                   const EnhancerConfig& config);

// RMSE of model predictions against targets, in normalized units.
double evaluate_rmse(const nn::NetworkModel& model, const PairedDataset& dataset);

// Stores norm params in model metadata so a checkpoint carries its scaling.
void set_normalization(nn::NetworkModel& model, const signal::NormParams& params);
signal::NormParams get_normalization(const nn::NetworkModel& model);

// Raw units in, raw units out: normalize with the model's stored params, run
// one inference forward pass, denormalize.
std::vector<double> enhance(const nn::NetworkModel& model, std::span<const double> window);
signal::TimeSeries enhance_window(const nn::NetworkModel& model,
                                  const signal::TimeSeries& window);

// Binary container for a paired dataset.
void save_paired_dataset(const PairedDataset& dataset, const std::filesystem::path& path);
PairedDataset load_paired_dataset(const std::filesystem::path& path);

}  // namespace simenh::enhancer
