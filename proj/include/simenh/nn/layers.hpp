#pragma once

#include <string>

namespace simenh::nn {

enum class ActivationKind { linear, tanh, sigmoid, leaky_relu };

struct Activation {
    ActivationKind kind = ActivationKind::linear;
    double slope = 0.0;  // leaky_relu negative-side slope

    static Activation linear() { return {ActivationKind::linear, 0.0}; }
    static Activation tanh() { return {ActivationKind::tanh, 0.0}; }
    static Activation sigmoid() { return {ActivationKind::sigmoid, 0.0}; }
    static Activation leaky_relu(double slope) { return {ActivationKind::leaky_relu, slope}; }
};

enum class LayerKind { fully_connected, conv1d, max_pool1d, batch_norm, flatten, reshape };

// One layer description. Which fields are meaningful depends on `kind`;
// unused ones stay zero. Kept flat (rather than a variant) so specs
// serialize trivially into the checkpoint container.
struct LayerSpec {
    LayerKind kind = LayerKind::flatten;
    int in = 0;          // fully_connected
    int out = 0;         // fully_connected
    int filters = 0;     // conv1d
    int window = 0;      // conv1d
    int stride = 0;      // conv1d
    int pool_width = 0;  // max_pool1d
    int features = 0;    // batch_norm
    int shape = 0;       // reshape target feature count
    Activation act;      // fully_connected, conv1d

    static LayerSpec fully_connected(int in, int out, Activation act) {
        LayerSpec s;
        s.kind = LayerKind::fully_connected;
        s.in = in;
        s.out = out;
        s.act = act;
        return s;
    }
    static LayerSpec conv1d(int filters, int window, int stride, Activation act) {
        LayerSpec s;
        s.kind = LayerKind::conv1d;
        s.filters = filters;
        s.window = window;
        s.stride = stride;
        s.act = act;
        return s;
    }
    static LayerSpec max_pool1d(int pool_width) {
        LayerSpec s;
        s.kind = LayerKind::max_pool1d;
        s.pool_width = pool_width;
        return s;
    }
    static LayerSpec batch_norm(int features) {
        LayerSpec s;
        s.kind = LayerKind::batch_norm;
        s.features = features;
        return s;
    }
    static LayerSpec flatten() {
        LayerSpec s;
        s.kind = LayerKind::flatten;
        return s;
    }
    static LayerSpec reshape(int shape) {
        LayerSpec s;
        s.kind = LayerKind::reshape;
        s.shape = shape;
        return s;
    }
};

std::string layer_kind_name(LayerKind kind);

}  // namespace simenh::nn
