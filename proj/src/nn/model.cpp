#include "simenh/nn/model.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/kernels/kernels.hpp"

namespace simenh::nn {

namespace {

constexpr double kBnEpsilon = 1e-5;
constexpr double kBnMomentum = 0.9;

[[noreturn]] void layer_error(int index, LayerKind kind, const std::string& what) {
    throw ValidationError("layer " + std::to_string(index) + " (" + layer_kind_name(kind) +
                          "): " + what);
}

void check_finite(const Matrix& m, int layer_index, LayerKind kind) {
    if (!m.all_finite()) {
        throw NumericError("non-finite values in output of layer " + std::to_string(layer_index) +
                           " (" + layer_kind_name(kind) + ")");
    }
}

double activate(ActivationKind kind, double slope, double z) {
    switch (kind) {
        case ActivationKind::linear: return z;
        case ActivationKind::tanh: return std::tanh(z);
        case ActivationKind::sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case ActivationKind::leaky_relu: return z >= 0.0 ? z : slope * z;
    }
    return z;
}

// Derivative in terms of the cached pre-activation z and output a.
double activate_grad(ActivationKind kind, double slope, double z, double a) {
    switch (kind) {
        case ActivationKind::linear: return 1.0;
        case ActivationKind::tanh: return 1.0 - a * a;
        case ActivationKind::sigmoid: return a * (1.0 - a);
        case ActivationKind::leaky_relu: return z >= 0.0 ? 1.0 : slope;
    }
    return 1.0;
}

void apply_activation(const Activation& act, const Matrix& z, Matrix& out) {
    out = Matrix(z.rows, z.cols);
    for (std::size_t i = 0; i < z.data.size(); ++i) {
        out.data[i] = activate(act.kind, act.slope, z.data[i]);
    }
}

// dL/dz from dL/da, elementwise.
Matrix activation_backward(const Activation& act, const Matrix& z, const Matrix& a,
                           const Matrix& grad_out) {
    Matrix dz(grad_out.rows, grad_out.cols);
    for (std::size_t i = 0; i < grad_out.data.size(); ++i) {
        dz.data[i] = grad_out.data[i] * activate_grad(act.kind, act.slope, z.data[i], a.data[i]);
    }
    return dz;
}

int conv_positions(int length, int window, int stride) {
    return (length - window) / stride + 1;
}

}  // namespace

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("adam: learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) throw ValidationError("adam: beta1 must be in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) throw ValidationError("adam: beta2 must be in [0, 1)");
    if (!(epsilon > 0.0)) throw ValidationError("adam: epsilon must be > 0");
}

std::size_t LayerState::parameter_count() const {
    std::size_t n = 0;
    for (const Matrix& p : params) n += p.data.size();
    return n;
}

int NetworkModel::input_width() const {
    if (layers.empty()) throw ValidationError("model has no layers");
    return layers.front().in_shape.features;
}

int NetworkModel::output_width() const {
    if (layers.empty()) throw ValidationError("model has no layers");
    return layers.back().out_shape.features;
}

std::size_t NetworkModel::parameter_count() const {
    std::size_t n = 0;
    for (const LayerState& l : layers) n += l.parameter_count();
    return n;
}

void NetworkModel::set_trainable(bool trainable) {
    for (LayerState& l : layers) l.trainable = trainable;
    ++revision;  // invalidates caches/gradients taken under the old trainability
}

NetworkModel build_network(const std::vector<LayerSpec>& specs, int input_width,
                           std::uint64_t seed) {
    if (specs.empty()) throw ValidationError("network needs at least one layer");
    if (input_width <= 0) throw ValidationError("input_width must be positive");

    NetworkModel model;
    model.layers.reserve(specs.size());
    Rng rng(seed);

    ShapeInfo shape = ShapeInfo::flat(input_width);
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const LayerSpec& spec = specs[i];
        const int idx = static_cast<int>(i);
        LayerState state;
        state.spec = spec;
        state.in_shape = shape;

        switch (spec.kind) {
            case LayerKind::fully_connected: {
                if (shape.structured)
                    layer_error(idx, spec.kind, "requires flat input; add a flatten layer first");
                if (spec.in != shape.features)
                    layer_error(idx, spec.kind,
                                "expects " + std::to_string(spec.in) + " inputs, got " +
                                    std::to_string(shape.features));
                if (spec.out <= 0) layer_error(idx, spec.kind, "output width must be positive");
                // Glorot uniform: limit = sqrt(6 / (fan_in + fan_out)); biases start at zero.
                const double limit = std::sqrt(6.0 / (spec.in + spec.out));
                Matrix w(spec.in, spec.out);
                for (double& v : w.data) v = rng.uniform(-limit, limit);
                state.params = {std::move(w), Matrix(1, spec.out)};
                state.out_shape = ShapeInfo::flat(spec.out);
                break;
            }
            case LayerKind::conv1d: {
                if (shape.structured && shape.channels != 1)
                    layer_error(idx, spec.kind, "expects a single-channel sequence");
                const int length = shape.structured ? shape.length : shape.features;
                if (spec.filters <= 0) layer_error(idx, spec.kind, "filters must be positive");
                if (spec.window <= 0) layer_error(idx, spec.kind, "window must be positive");
                if (spec.stride <= 0) layer_error(idx, spec.kind, "stride must be positive");
                if (spec.window > length)
                    layer_error(idx, spec.kind,
                                "window " + std::to_string(spec.window) +
                                    " exceeds input length " + std::to_string(length));
                const double limit = std::sqrt(6.0 / (spec.window + spec.filters));
                Matrix k(spec.window, spec.filters);
                for (double& v : k.data) v = rng.uniform(-limit, limit);
                state.params = {std::move(k), Matrix(1, spec.filters)};
                state.out_shape =
                    ShapeInfo::grid(spec.filters, conv_positions(length, spec.window, spec.stride));
                break;
            }
            case LayerKind::max_pool1d: {
                if (!shape.structured)
                    layer_error(idx, spec.kind, "requires a structured (channels x length) input");
                if (spec.pool_width <= 0)
                    layer_error(idx, spec.kind, "pool width must be positive");
                const int out_len = shape.length / spec.pool_width;  // trailing remainder dropped
                if (out_len < 1)
                    layer_error(idx, spec.kind,
                                "pool width " + std::to_string(spec.pool_width) +
                                    " exceeds input length " + std::to_string(shape.length));
                state.out_shape = ShapeInfo::grid(shape.channels, out_len);
                break;
            }
            case LayerKind::batch_norm: {
                if (shape.structured)
                    layer_error(idx, spec.kind, "requires flat input");
                if (spec.features != shape.features)
                    layer_error(idx, spec.kind,
                                "expects " + std::to_string(spec.features) + " features, got " +
                                    std::to_string(shape.features));
                Matrix gamma(1, spec.features);
                for (double& v : gamma.data) v = 1.0;
                state.params = {std::move(gamma), Matrix(1, spec.features)};
                state.running_mean = Matrix(1, spec.features);
                state.running_var = Matrix(1, spec.features);
                for (double& v : state.running_var.data) v = 1.0;
                state.out_shape = ShapeInfo::flat(spec.features);
                break;
            }
            case LayerKind::flatten: {
                state.out_shape = ShapeInfo::flat(shape.features);
                break;
            }
            case LayerKind::reshape: {
                if (spec.shape != shape.features)
                    layer_error(idx, spec.kind,
                                "target size " + std::to_string(spec.shape) +
                                    " does not match input size " + std::to_string(shape.features));
                state.out_shape = ShapeInfo::flat(spec.shape);
                break;
            }
        }

        state.adam_m.reserve(state.params.size());
        state.adam_v.reserve(state.params.size());
        for (const Matrix& p : state.params) {
            state.adam_m.emplace_back(p.rows, p.cols);
            state.adam_v.emplace_back(p.rows, p.cols);
        }
        shape = state.out_shape;
        model.layers.push_back(std::move(state));
    }
    return model;
}

namespace {

Matrix fc_forward(const LayerState& layer, const Matrix& x, Matrix& pre) {
    const int out = layer.spec.out;
    pre = Matrix(x.rows, out);
    kernels::matmul_nn(x.data.data(), layer.params[0].data.data(), pre.data.data(), x.rows,
                       x.cols, out);
    const double* bias = layer.params[1].data.data();
    for (int r = 0; r < pre.rows; ++r) {
        double* row = pre.row(r);
        for (int c = 0; c < out; ++c) row[c] += bias[c];
    }
    Matrix act;
    apply_activation(layer.spec.act, pre, act);
    return act;
}

Matrix conv_forward(const LayerState& layer, const Matrix& x, Matrix& pre) {
    const int positions = layer.out_shape.length;
    const int filters = layer.spec.filters;
    pre = Matrix(x.rows, positions * filters);
    kernels::conv1d_forward(x.data.data(), layer.params[0].data.data(),
                            layer.params[1].data.data(), pre.data.data(), x.rows, x.cols,
                            layer.spec.window, layer.spec.stride, filters);
    Matrix act;
    apply_activation(layer.spec.act, pre, act);
    return act;
}

// Output keeps the position-major layout: out[b, q*channels + c].
Matrix pool_forward(const LayerState& layer, const Matrix& x, std::vector<int>& argmax) {
    const int channels = layer.in_shape.channels;
    const int out_len = layer.out_shape.length;
    const int pw = layer.spec.pool_width;
    Matrix out(x.rows, out_len * channels);
    argmax.assign(out.data.size(), 0);
    for (int b = 0; b < x.rows; ++b) {
        const double* src = x.row(b);
        double* dst = out.row(b);
        for (int q = 0; q < out_len; ++q) {
            for (int c = 0; c < channels; ++c) {
                int best = (q * pw) * channels + c;
                double best_v = src[best];
                for (int p = q * pw + 1; p < (q + 1) * pw; ++p) {
                    const int i = p * channels + c;
                    if (src[i] > best_v) {  // first maximum wins on ties
                        best_v = src[i];
                        best = i;
                    }
                }
                dst[q * channels + c] = best_v;
                argmax[static_cast<std::size_t>(b) * out.cols + q * channels + c] = best;
            }
        }
    }
    return out;
}

Matrix bn_forward(const LayerState& layer, const Matrix& x, ForwardMode mode,
                  LayerCacheEntry* entry) {
    const int f = layer.spec.features;
    const double* gamma = layer.params[0].data.data();
    const double* beta = layer.params[1].data.data();
    Matrix mean(1, f);
    Matrix var(1, f);
    if (mode == ForwardMode::train) {
        // Batch statistics; variance is the biased (1/B) estimate.
        for (int b = 0; b < x.rows; ++b) {
            const double* row = x.row(b);
            for (int c = 0; c < f; ++c) mean.data[c] += row[c];
        }
        for (int c = 0; c < f; ++c) mean.data[c] /= x.rows;
        for (int b = 0; b < x.rows; ++b) {
            const double* row = x.row(b);
            for (int c = 0; c < f; ++c) {
                const double d = row[c] - mean.data[c];
                var.data[c] += d * d;
            }
        }
        for (int c = 0; c < f; ++c) var.data[c] /= x.rows;
    } else {
        mean = layer.running_mean;
        var = layer.running_var;
    }

    Matrix x_hat(x.rows, f);
    Matrix out(x.rows, f);
    for (int c = 0; c < f; ++c) {
        const double inv_std = 1.0 / std::sqrt(var.data[c] + kBnEpsilon);
        for (int b = 0; b < x.rows; ++b) {
            const double xh = (x.at(b, c) - mean.data[c]) * inv_std;
            x_hat.at(b, c) = xh;
            out.at(b, c) = gamma[c] * xh + beta[c];
        }
    }
    if (entry != nullptr) {
        entry->batch_mean = std::move(mean);
        entry->batch_var = std::move(var);
        entry->x_hat = std::move(x_hat);
    }
    return out;
}

}  // namespace

Matrix forward(const NetworkModel& model, const Matrix& batch, ForwardMode mode,
               ForwardCache* cache) {
    if (model.layers.empty()) throw ValidationError("model has no layers");
    if (batch.rows < 1) throw ValidationError("forward: batch must have at least one row");
    if (batch.cols != model.input_width()) {
        throw ValidationError("forward: batch has " + std::to_string(batch.cols) +
                              " columns, model expects " + std::to_string(model.input_width()));
    }
    if (!batch.all_finite()) throw NumericError("non-finite values in model input");

    if (cache != nullptr) {
        cache->mode = mode;
        cache->model_revision = model.revision;
        cache->layer_count = model.layers.size();
        cache->layers.assign(model.layers.size(), LayerCacheEntry{});
    }

    Matrix x = batch;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        const LayerState& layer = model.layers[i];
        LayerCacheEntry* entry = cache != nullptr ? &cache->layers[i] : nullptr;
        Matrix out;
        Matrix pre;
        std::vector<int> argmax;
        switch (layer.spec.kind) {
            case LayerKind::fully_connected:
                out = fc_forward(layer, x, pre);
                break;
            case LayerKind::conv1d:
                out = conv_forward(layer, x, pre);
                break;
            case LayerKind::max_pool1d:
                out = pool_forward(layer, x, argmax);
                break;
            case LayerKind::batch_norm:
                out = bn_forward(layer, x, mode, entry);
                break;
            case LayerKind::flatten:
            case LayerKind::reshape:
                out = x;
                break;
        }
        check_finite(out, static_cast<int>(i), layer.spec.kind);
        if (entry != nullptr) {
            entry->input = std::move(x);
            entry->pre_activation = std::move(pre);
            entry->argmax = std::move(argmax);
            entry->output = out;
        }
        x = std::move(out);
    }
    return x;
}

void apply_batch_norm_updates(NetworkModel& model, const ForwardCache& cache) {
    if (cache.mode != ForwardMode::train)
        throw ValidationError("batch norm updates require a train-mode cache");
    if (cache.layer_count != model.layers.size())
        throw ValidationError("batch norm updates: cache does not match model");
    bool touched = false;
    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        LayerState& layer = model.layers[i];
        if (layer.spec.kind != LayerKind::batch_norm || !layer.trainable) continue;
        const LayerCacheEntry& entry = cache.layers[i];
        if (entry.batch_mean.data.empty())
            throw ValidationError("batch norm updates: cache holds no statistics for layer " +
                                  std::to_string(i));
        for (std::size_t c = 0; c < layer.running_mean.data.size(); ++c) {
            layer.running_mean.data[c] = kBnMomentum * layer.running_mean.data[c] +
                                         (1.0 - kBnMomentum) * entry.batch_mean.data[c];
            layer.running_var.data[c] = kBnMomentum * layer.running_var.data[c] +
                                        (1.0 - kBnMomentum) * entry.batch_var.data[c];
        }
        touched = true;
    }
    if (touched) ++model.revision;
}

namespace {

std::vector<Matrix> fc_backward(const LayerState& layer, const LayerCacheEntry& entry,
                                const Matrix& grad_out, Matrix& grad_in) {
    const Matrix dz =
        activation_backward(layer.spec.act, entry.pre_activation, entry.output, grad_out);
    const Matrix& x = entry.input;
    grad_in = Matrix(dz.rows, layer.spec.in);
    kernels::matmul_nt(dz.data.data(), layer.params[0].data.data(), grad_in.data.data(), dz.rows,
                       dz.cols, layer.spec.in);
    if (!layer.trainable) return {};
    Matrix dw(layer.spec.in, layer.spec.out);
    kernels::matmul_tn(x.data.data(), dz.data.data(), dw.data.data(), x.rows, x.cols, dz.cols);
    Matrix db(1, layer.spec.out);
    for (int r = 0; r < dz.rows; ++r) {
        const double* row = dz.row(r);
        for (int c = 0; c < dz.cols; ++c) db.data[c] += row[c];
    }
    return {std::move(dw), std::move(db)};
}

std::vector<Matrix> conv_backward(const LayerState& layer, const LayerCacheEntry& entry,
                                  const Matrix& grad_out, Matrix& grad_in) {
    const Matrix dz =
        activation_backward(layer.spec.act, entry.pre_activation, entry.output, grad_out);
    const Matrix& x = entry.input;
    const int filters = layer.spec.filters;
    const int window = layer.spec.window;
    const int stride = layer.spec.stride;
    const int positions = layer.out_shape.length;
    const double* kernel = layer.params[0].data.data();

    grad_in = Matrix(x.rows, x.cols);
    Matrix dk(window, filters);
    Matrix db(1, filters);
    for (int b = 0; b < x.rows; ++b) {
        const double* xr = x.row(b);
        const double* dzr = dz.row(b);
        double* gir = grad_in.row(b);
        for (int p = 0; p < positions; ++p) {
            const int base = p * stride;
            for (int f = 0; f < filters; ++f) {
                const double g = dzr[p * filters + f];
                db.data[f] += g;
                for (int w = 0; w < window; ++w) {
                    dk.at(w, f) += xr[base + w] * g;
                    gir[base + w] += kernel[w * filters + f] * g;
                }
            }
        }
    }
    if (!layer.trainable) return {};
    return {std::move(dk), std::move(db)};
}

void pool_backward(const LayerState& layer, const LayerCacheEntry& entry, const Matrix& grad_out,
                   Matrix& grad_in) {
    (void)layer;
    grad_in = Matrix(entry.input.rows, entry.input.cols);
    for (int b = 0; b < grad_out.rows; ++b) {
        const double* g = grad_out.row(b);
        double* gi = grad_in.row(b);
        const int* am = entry.argmax.data() + static_cast<std::size_t>(b) * grad_out.cols;
        for (int c = 0; c < grad_out.cols; ++c) gi[am[c]] += g[c];
    }
}

std::vector<Matrix> bn_backward(const LayerState& layer, const LayerCacheEntry& entry,
                                ForwardMode mode, const Matrix& grad_out, Matrix& grad_in) {
    const int f = layer.spec.features;
    const int rows = grad_out.rows;
    const double* gamma = layer.params[0].data.data();
    grad_in = Matrix(rows, f);

    Matrix dgamma(1, f);
    Matrix dbeta(1, f);
    for (int b = 0; b < rows; ++b) {
        const double* g = grad_out.row(b);
        for (int c = 0; c < f; ++c) {
            dgamma.data[c] += g[c] * entry.x_hat.at(b, c);
            dbeta.data[c] += g[c];
        }
    }

    for (int c = 0; c < f; ++c) {
        const double inv_std = 1.0 / std::sqrt(entry.batch_var.data[c] + kBnEpsilon);
        if (mode == ForwardMode::train) {
            // Batch statistics depend on the inputs, so the mean/variance terms
            // feed back into the gradient.
            double sum_dxhat = 0.0;
            double sum_dxhat_xhat = 0.0;
            for (int b = 0; b < rows; ++b) {
                const double dxhat = grad_out.at(b, c) * gamma[c];
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * entry.x_hat.at(b, c);
            }
            for (int b = 0; b < rows; ++b) {
                const double dxhat = grad_out.at(b, c) * gamma[c];
                grad_in.at(b, c) = inv_std / rows *
                                   (rows * dxhat - sum_dxhat -
                                    entry.x_hat.at(b, c) * sum_dxhat_xhat);
            }
        } else {
            // Running statistics are constants in inference mode.
            for (int b = 0; b < rows; ++b) {
                grad_in.at(b, c) = grad_out.at(b, c) * gamma[c] * inv_std;
            }
        }
    }
    if (!layer.trainable) return {};
    return {std::move(dgamma), std::move(dbeta)};
}

}  // namespace

Gradients backward(const NetworkModel& model, const ForwardCache& cache,
                   const Matrix& output_grad) {
    if (cache.model_revision != model.revision)
        throw ValidationError("backward: cache is stale (model changed since forward)");
    if (cache.layer_count != model.layers.size())
        throw ValidationError("backward: cache does not match model");
    const Matrix& final_out = cache.layers.back().output;
    if (output_grad.rows != final_out.rows || output_grad.cols != final_out.cols)
        throw ValidationError("backward: output gradient shape does not match model output");

    Gradients grads;
    grads.model_revision = model.revision;
    grads.per_layer.resize(model.layers.size());

    Matrix g = output_grad;
    for (std::size_t i = model.layers.size(); i-- > 0;) {
        const LayerState& layer = model.layers[i];
        const LayerCacheEntry& entry = cache.layers[i];
        Matrix grad_in;
        switch (layer.spec.kind) {
            case LayerKind::fully_connected:
                grads.per_layer[i] = fc_backward(layer, entry, g, grad_in);
                break;
            case LayerKind::conv1d:
                grads.per_layer[i] = conv_backward(layer, entry, g, grad_in);
                break;
            case LayerKind::max_pool1d:
                pool_backward(layer, entry, g, grad_in);
                break;
            case LayerKind::batch_norm:
                grads.per_layer[i] = bn_backward(layer, entry, cache.mode, g, grad_in);
                break;
            case LayerKind::flatten:
            case LayerKind::reshape:
                grad_in = std::move(g);
                break;
        }
        g = std::move(grad_in);
    }
    grads.input_grad = std::move(g);
    return grads;
}

void adam_step(NetworkModel& model, const Gradients& grads, const AdamConfig& config) {
    config.validate();
    if (grads.model_revision != model.revision)
        throw ValidationError("adam_step: gradients are stale (model changed since backward)");
    if (grads.per_layer.size() != model.layers.size())
        throw ValidationError("adam_step: gradient count does not match layer count");

    const std::uint64_t t = model.adam_step_count + 1;
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(t));

    for (std::size_t i = 0; i < model.layers.size(); ++i) {
        LayerState& layer = model.layers[i];
        const std::vector<Matrix>& layer_grads = grads.per_layer[i];
        if (!layer.trainable || layer.params.empty()) continue;
        if (layer_grads.size() != layer.params.size())
            throw ValidationError("adam_step: layer " + std::to_string(i) +
                                  " gradient does not match its parameters");
        for (std::size_t p = 0; p < layer.params.size(); ++p) {
            Matrix& param = layer.params[p];
            const Matrix& grad = layer_grads[p];
            if (grad.rows != param.rows || grad.cols != param.cols)
                throw ValidationError("adam_step: layer " + std::to_string(i) +
                                      " gradient shape does not match its parameters");
            kernels::adam_update(param.data.data(), grad.data.data(), layer.adam_m[p].data.data(),
                                 layer.adam_v[p].data.data(), param.data.size(),
                                 config.learning_rate, config.beta1, config.beta2, config.epsilon,
                                 bc1, bc2);
        }
    }
    model.adam_step_count = t;
    ++model.revision;
}

}  // namespace simenh::nn
