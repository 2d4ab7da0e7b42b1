#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "simenh/nn/layers.hpp"
#include "simenh/nn/matrix.hpp"

namespace simenh::nn {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    void validate() const;
};

// Feature layout flowing between layers. Conv and pool layers produce a
// (channels, length) structure laid out position-major
// (feature index = position * channels + channel); flatten collapses it.
struct ShapeInfo {
    int features = 0;
    bool structured = false;
    int channels = 0;
    int length = 0;

    static ShapeInfo flat(int features) { return {features, false, 0, 0}; }
    static ShapeInfo grid(int channels, int length) {
        return {channels * length, true, channels, length};
    }
};

struct LayerState {
    LayerSpec spec;
    std::vector<Matrix> params;   // fc: {W in x out, b 1 x out}; conv: {K window x filters, b 1 x filters};
                                  // batch_norm: {gamma 1 x f, beta 1 x f}; otherwise empty
    std::vector<Matrix> adam_m;   // same shapes as params
    std::vector<Matrix> adam_v;
    Matrix running_mean;          // batch_norm only
    Matrix running_var;
    bool trainable = true;
    ShapeInfo in_shape;
    ShapeInfo out_shape;

    std::size_t parameter_count() const;
};

struct NetworkModel {
    std::vector<LayerState> layers;
    std::uint64_t adam_step_count = 0;
    // Bumped whenever parameters or optimizer state mutate; forward caches
    // record it so backward can reject stale caches.
    std::uint64_t revision = 0;
    // Free-form numeric annotations (normalization parameters, noise scale);
    // persisted in checkpoints.
    std::map<std::string, std::vector<double>> metadata;

    int input_width() const;
    int output_width() const;
    std::size_t parameter_count() const;
    void set_trainable(bool trainable);
};

// Validates that consecutive layer shapes compose (throws ValidationError
// naming the offending layer) and initializes parameters: Glorot-uniform
// weights from `seed`, zero biases, batch-norm gamma 1 / beta 0.
NetworkModel build_network(const std::vector<LayerSpec>& specs, int input_width,
                           std::uint64_t seed);

enum class ForwardMode { train, infer };

struct LayerCacheEntry {
    Matrix input;             // layer input
    Matrix pre_activation;    // fc/conv z values
    Matrix output;            // post-activation
    std::vector<int> argmax;  // max_pool winner index per output element
    Matrix batch_mean;        // batch_norm train-mode statistics
    Matrix batch_var;
    Matrix x_hat;
};

struct ForwardCache {
    ForwardMode mode = ForwardMode::train;
    std::uint64_t model_revision = 0;
    std::size_t layer_count = 0;
    std::vector<LayerCacheEntry> layers;
};

// Pure: never mutates the model (batch-norm running statistics are updated
// separately via apply_batch_norm_updates). Pass a cache to enable backward.
Matrix forward(const NetworkModel& model, const Matrix& batch, ForwardMode mode,
               ForwardCache* cache = nullptr);

// Folds the batch statistics recorded in a train-mode cache into the
// running statistics of trainable batch-norm layers (momentum 0.9).
void apply_batch_norm_updates(NetworkModel& model, const ForwardCache& cache);

struct Gradients {
    // Per layer, same shapes as LayerState::params; empty for frozen or
    // parameterless layers.
    std::vector<std::vector<Matrix>> per_layer;
    Matrix input_grad;
    std::uint64_t model_revision = 0;
};

Gradients backward(const NetworkModel& model, const ForwardCache& cache,
                   const Matrix& output_grad);

// Standard bias-corrected Adam over all trainable layers with gradients.
// Frozen layers are untouched, including their optimizer state.
void adam_step(NetworkModel& model, const Gradients& grads, const AdamConfig& config);

}  // namespace simenh::nn
