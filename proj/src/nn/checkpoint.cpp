#include "simenh/nn/checkpoint.hpp"

#include <fstream>
#include <vector>

#include "simenh/common/binio.hpp"
#include "simenh/common/error.hpp"

namespace simenh::nn {

namespace {

constexpr char kMagic[8] = {'S', 'E', 'N', 'H', 'C', 'K', 'P', 'T'};
constexpr std::uint32_t kVersion = 1;

void write_matrix(std::ostream& out, const Matrix& m) {
    binio::write_u32(out, static_cast<std::uint32_t>(m.rows));
    binio::write_u32(out, static_cast<std::uint32_t>(m.cols));
    binio::write_f64_array(out, m.data);
}

Matrix read_matrix(std::istream& in) {
    const int rows = static_cast<int>(binio::read_u32(in));
    const int cols = static_cast<int>(binio::read_u32(in));
    Matrix m(rows, cols);
    m.data = binio::read_f64_array(in);
    if (m.data.size() != static_cast<std::size_t>(rows) * cols)
        throw IoError("checkpoint: matrix payload does not match its header");
    return m;
}

}  // namespace

void save_checkpoint(const NetworkModel& model, const std::filesystem::path& path,
                     const std::string& config_hash) {
    if (model.layers.empty()) throw ValidationError("save_checkpoint: model has no layers");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open checkpoint file for writing: " + path.string());

    out.write(kMagic, sizeof(kMagic));
    binio::write_u32(out, kVersion);
    binio::write_string(out, config_hash);
    binio::write_u64(out, model.adam_step_count);
    binio::write_u32(out, static_cast<std::uint32_t>(model.input_width()));

    binio::write_u32(out, static_cast<std::uint32_t>(model.metadata.size()));
    for (const auto& [key, values] : model.metadata) {
        binio::write_string(out, key);
        binio::write_f64_array(out, values);
    }

    binio::write_u32(out, static_cast<std::uint32_t>(model.layers.size()));
    for (const LayerState& layer : model.layers) {
        const LayerSpec& s = layer.spec;
        binio::write_u32(out, static_cast<std::uint32_t>(s.kind));
        for (int v : {s.in, s.out, s.filters, s.window, s.stride, s.pool_width, s.features,
                      s.shape}) {
            binio::write_u32(out, static_cast<std::uint32_t>(v));
        }
        binio::write_u32(out, static_cast<std::uint32_t>(s.act.kind));
        binio::write_f64(out, s.act.slope);
        binio::write_u32(out, layer.trainable ? 1 : 0);
        binio::write_u32(out, static_cast<std::uint32_t>(layer.params.size()));
        for (const Matrix& p : layer.params) write_matrix(out, p);
        for (const Matrix& m : layer.adam_m) write_matrix(out, m);
        for (const Matrix& v : layer.adam_v) write_matrix(out, v);
        if (s.kind == LayerKind::batch_norm) {
            write_matrix(out, layer.running_mean);
            write_matrix(out, layer.running_var);
        }
    }
    if (!out) throw IoError("failed writing checkpoint: " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open checkpoint file: " + path.string());

    binio::expect_magic(in, kMagic, sizeof(kMagic), "checkpoint");
    const std::uint32_t version = binio::read_u32(in);
    if (version != kVersion)
        throw IoError("checkpoint: unsupported version " + std::to_string(version));

    LoadedCheckpoint loaded;
    loaded.config_hash = binio::read_string(in);
    const std::uint64_t step_count = binio::read_u64(in);
    const int input_width = static_cast<int>(binio::read_u32(in));

    std::map<std::string, std::vector<double>> metadata;
    const std::uint32_t n_meta = binio::read_u32(in);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        std::string key = binio::read_string(in);
        metadata[std::move(key)] = binio::read_f64_array(in);
    }

    const std::uint32_t n_layers = binio::read_u32(in);
    std::vector<LayerSpec> specs;
    std::vector<bool> trainable;
    struct LayerPayload {
        std::vector<Matrix> params, adam_m, adam_v;
        Matrix running_mean, running_var;
    };
    std::vector<LayerPayload> payloads;
    specs.reserve(n_layers);
    payloads.reserve(n_layers);

    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerSpec s;
        s.kind = static_cast<LayerKind>(binio::read_u32(in));
        s.in = static_cast<int>(binio::read_u32(in));
        s.out = static_cast<int>(binio::read_u32(in));
        s.filters = static_cast<int>(binio::read_u32(in));
        s.window = static_cast<int>(binio::read_u32(in));
        s.stride = static_cast<int>(binio::read_u32(in));
        s.pool_width = static_cast<int>(binio::read_u32(in));
        s.features = static_cast<int>(binio::read_u32(in));
        s.shape = static_cast<int>(binio::read_u32(in));
        s.act.kind = static_cast<ActivationKind>(binio::read_u32(in));
        s.act.slope = binio::read_f64(in);
        trainable.push_back(binio::read_u32(in) != 0);

        LayerPayload payload;
        const std::uint32_t n_params = binio::read_u32(in);
        for (std::uint32_t p = 0; p < n_params; ++p) payload.params.push_back(read_matrix(in));
        for (std::uint32_t p = 0; p < n_params; ++p) payload.adam_m.push_back(read_matrix(in));
        for (std::uint32_t p = 0; p < n_params; ++p) payload.adam_v.push_back(read_matrix(in));
        if (s.kind == LayerKind::batch_norm) {
            payload.running_mean = read_matrix(in);
            payload.running_var = read_matrix(in);
        }
        specs.push_back(s);
        payloads.push_back(std::move(payload));
    }

    // Rebuild through the normal constructor so every shape is revalidated,
    // then overwrite the freshly initialized state with the stored values.
    loaded.model = build_network(specs, input_width, 0);
    loaded.model.adam_step_count = step_count;
    loaded.model.metadata = std::move(metadata);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerState& layer = loaded.model.layers[i];
        LayerPayload& payload = payloads[i];
        if (payload.params.size() != layer.params.size())
            throw IoError("checkpoint: layer " + std::to_string(i) +
                          " parameter count does not match its spec");
        layer.trainable = trainable[i];
        for (std::size_t p = 0; p < layer.params.size(); ++p) {
            if (payload.params[p].rows != layer.params[p].rows ||
                payload.params[p].cols != layer.params[p].cols)
                throw IoError("checkpoint: layer " + std::to_string(i) +
                              " parameter shape does not match its spec");
            layer.params[p] = std::move(payload.params[p]);
            layer.adam_m[p] = std::move(payload.adam_m[p]);
            layer.adam_v[p] = std::move(payload.adam_v[p]);
        }
        if (layer.spec.kind == LayerKind::batch_norm) {
            if (payload.running_mean.rows != layer.running_mean.rows ||
                payload.running_mean.cols != layer.running_mean.cols)
                throw IoError("checkpoint: layer " + std::to_string(i) +
                              " running statistics shape mismatch");
            layer.running_mean = std::move(payload.running_mean);
            layer.running_var = std::move(payload.running_var);
        }
    }
    return loaded;
}

}  // namespace simenh::nn
