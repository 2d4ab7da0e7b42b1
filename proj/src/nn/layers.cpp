#include "simenh/nn/layers.hpp"

namespace simenh::nn {

std::string layer_kind_name(LayerKind kind) {
    switch (kind) {
        case LayerKind::fully_connected: return "fully_connected";
        case LayerKind::conv1d: return "conv1d";
        case LayerKind::max_pool1d: return "max_pool1d";
        case LayerKind::batch_norm: return "batch_norm";
        case LayerKind::flatten: return "flatten";
        case LayerKind::reshape: return "reshape";
    }
    return "unknown";
}

}  // namespace simenh::nn
