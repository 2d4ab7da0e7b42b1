#include "simenh/enhancer/enhancer.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <string>

#include "simenh/common/binio.hpp"
#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/nn/losses.hpp"

namespace simenh::enhancer {

void EnhancerConfig::validate() const {
    if (window_len < 1) throw ValidationError("enhancer: window_len must be at least 1");
    if (hidden_width < 1) throw ValidationError("enhancer: hidden_width must be at least 1");
    if (epochs < 0) throw ValidationError("enhancer: epochs must be non-negative");
    if (batch_size < 1) throw ValidationError("enhancer: batch_size must be at least 1");
    adam.validate();
}

nn::NetworkModel build_enhancer(const EnhancerConfig& config) {
    config.validate();
    const int w = config.window_len;
    const int h = config.hidden_width;
    const nn::Activation tanh_act = nn::Activation::tanh();
    const std::vector<nn::LayerSpec> specs = {
        nn::LayerSpec::fully_connected(w, w, tanh_act),
        nn::LayerSpec::fully_connected(w, h, tanh_act),
        nn::LayerSpec::fully_connected(h, h, tanh_act),
        nn::LayerSpec::fully_connected(h, w, nn::Activation::linear()),
    };
    return nn::build_network(specs, w, config.init_seed);
}

PairedDataset make_paired_dataset(const signal::TimeSeries& coarse,
                                  const signal::TimeSeries& fine, int n_pairs, int window_len,
                                  std::uint64_t seed) {
    if (n_pairs < 1) throw ValidationError("paired dataset: n_pairs must be at least 1");
    if (window_len < 1) throw ValidationError("paired dataset: window_len must be at least 1");
    const std::size_t usable = std::min(coarse.size(), fine.size());
    if (static_cast<std::size_t>(window_len) > usable)
        throw ValidationError("paired dataset: window_len " + std::to_string(window_len) +
                              " exceeds series length " + std::to_string(usable));

    PairedDataset ds;
    ds.norm = signal::fit_norm_params(coarse.values, fine.values, -1.0, 1.0);
    ds.sources = nn::Matrix(n_pairs, window_len);
    ds.targets = nn::Matrix(n_pairs, window_len);

    Rng rng(seed);
    const std::uint64_t span = usable - static_cast<std::size_t>(window_len) + 1;
    for (int r = 0; r < n_pairs; ++r) {
        const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(span));
        double* src = ds.sources.row(r);
        double* tgt = ds.targets.row(r);
        for (int c = 0; c < window_len; ++c) {
            src[c] = ds.norm.apply(coarse.values[offset + static_cast<std::size_t>(c)]);
            tgt[c] = ds.norm.apply(fine.values[offset + static_cast<std::size_t>(c)]);
        }
    }
    return ds;
}

std::pair<PairedDataset, PairedDataset> split_dataset(const PairedDataset& dataset,
                                                      double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        throw ValidationError("split: train_fraction must be in (0, 1]");
    const int n = dataset.sources.rows;
    const int n_train = std::min(
        n, static_cast<int>(std::ceil(train_fraction * static_cast<double>(n))));

    auto take = [&](int begin, int end) {
        PairedDataset part;
        part.norm = dataset.norm;
        const int rows = end - begin;
        const int cols = dataset.sources.cols;
        part.sources = nn::Matrix(std::max(rows, 0), cols);
        part.targets = nn::Matrix(std::max(rows, 0), cols);
        for (int r = begin; r < end; ++r) {
            std::copy_n(dataset.sources.row(r), cols, part.sources.row(r - begin));
            std::copy_n(dataset.targets.row(r), cols, part.targets.row(r - begin));
        }
        return part;
    };
    return {take(0, n_train), take(n_train, n)};
}

std::vector<double> train_enhancer(nn::NetworkModel& model, const PairedDataset& dataset,
                                   const EnhancerConfig& config) {
    config.validate();
    const int n = dataset.sources.rows;
    if (n < config.batch_size)
        throw ValidationError("enhancer: dataset has " + std::to_string(n) +
                              " pairs, need at least one batch of " +
                              std::to_string(config.batch_size));
    if (dataset.sources.cols != model.input_width() ||
        dataset.targets.cols != model.output_width())
        throw ValidationError("enhancer: dataset window length does not match the model");

    Rng rng(config.train_seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);

    const int batches = n / config.batch_size;
    nn::Matrix x(config.batch_size, dataset.sources.cols);
    nn::Matrix t(config.batch_size, dataset.targets.cols);

    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(config.epochs));
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Fisher-Yates with our own draws keeps the order reproducible.
        for (int i = n - 1; i > 0; --i) {
            const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        double epoch_loss = 0.0;
        for (int b = 0; b < batches; ++b) {
            for (int r = 0; r < config.batch_size; ++r) {
                const int src = order[static_cast<std::size_t>(b * config.batch_size + r)];
                std::copy_n(dataset.sources.row(src), x.cols, x.row(r));
                std::copy_n(dataset.targets.row(src), t.cols, t.row(r));
            }
            nn::ForwardCache cache;
            const nn::Matrix out = nn::forward(model, x, nn::ForwardMode::train, &cache);
            const nn::LossResult loss = nn::mse_loss(out, t);
            if (!std::isfinite(loss.value))
                throw NumericError("enhancer: loss diverged at epoch " + std::to_string(epoch));
            const nn::Gradients grads = nn::backward(model, cache, loss.grad);
            nn::adam_step(model, grads, config.adam);
            epoch_loss += loss.value;
        }
        history.push_back(batches > 0 ? epoch_loss / batches : 0.0);
    }
    return history;
}

double evaluate_rmse(const nn::NetworkModel& model, const PairedDataset& dataset) {
    if (dataset.sources.rows < 1) throw ValidationError("evaluate: empty dataset");
    const nn::Matrix out = nn::forward(model, dataset.sources, nn::ForwardMode::infer);
    double sum = 0.0;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const double d = out.data[i] - dataset.targets.data[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(out.data.size()));
}

namespace {
constexpr const char* kNormKey = "norm";
}

void set_normalization(nn::NetworkModel& model, const signal::NormParams& params) {
    model.metadata[kNormKey] = {params.src_min, params.src_max, params.lo, params.hi,
                                params.degenerate ? 1.0 : 0.0};
}

signal::NormParams get_normalization(const nn::NetworkModel& model) {
    const auto it = model.metadata.find(kNormKey);
    if (it == model.metadata.end()) {
        // Identity scaling: raw units pass straight through.
        return signal::NormParams{0.0, 1.0, 0.0, 1.0, false};
    }
    if (it->second.size() != 5) throw ValidationError("model normalization metadata is malformed");
    return signal::NormParams{it->second[0], it->second[1], it->second[2], it->second[3],
                              it->second[4] != 0.0};
}

std::vector<double> enhance(const nn::NetworkModel& model, std::span<const double> window) {
    const int w = model.input_width();
    if (static_cast<int>(window.size()) != w)
        throw ValidationError("enhance: window has " + std::to_string(window.size()) +
                              " samples, model expects " + std::to_string(w));
    const signal::NormParams norm = get_normalization(model);
    nn::Matrix x(1, w);
    for (int c = 0; c < w; ++c) x.data[static_cast<std::size_t>(c)] = norm.apply(window[c]);
    const nn::Matrix out = nn::forward(model, x, nn::ForwardMode::infer);
    std::vector<double> result(static_cast<std::size_t>(w));
    for (int c = 0; c < w; ++c) result[static_cast<std::size_t>(c)] = norm.invert(out.data[c]);
    return result;
}

signal::TimeSeries enhance_window(const nn::NetworkModel& model,
                                  const signal::TimeSeries& window) {
    signal::TimeSeries out = window;
    out.values = enhance(model, window.values);
    return out;
}

namespace {
constexpr char kPairMagic[8] = {'S', 'E', 'N', 'H', 'P', 'A', 'I', 'R'};
}

void save_paired_dataset(const PairedDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open dataset file for writing: " + path.string());
    out.write(kPairMagic, sizeof(kPairMagic));
    binio::write_u32(out, static_cast<std::uint32_t>(dataset.sources.rows));
    binio::write_u32(out, static_cast<std::uint32_t>(dataset.sources.cols));
    binio::write_f64(out, dataset.norm.src_min);
    binio::write_f64(out, dataset.norm.src_max);
    binio::write_f64(out, dataset.norm.lo);
    binio::write_f64(out, dataset.norm.hi);
    binio::write_u32(out, dataset.norm.degenerate ? 1 : 0);
    binio::write_f64_array(out, dataset.sources.data);
    binio::write_f64_array(out, dataset.targets.data);
    if (!out) throw IoError("failed writing dataset: " + path.string());
}

PairedDataset load_paired_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path.string());
    binio::expect_magic(in, kPairMagic, sizeof(kPairMagic), "paired dataset");
    const int rows = static_cast<int>(binio::read_u32(in));
    const int cols = static_cast<int>(binio::read_u32(in));
    PairedDataset ds;
    ds.norm.src_min = binio::read_f64(in);
    ds.norm.src_max = binio::read_f64(in);
    ds.norm.lo = binio::read_f64(in);
    ds.norm.hi = binio::read_f64(in);
    ds.norm.degenerate = binio::read_u32(in) != 0;
    ds.sources = nn::Matrix(rows, cols);
    ds.sources.data = binio::read_f64_array(in);
    ds.targets = nn::Matrix(rows, cols);
    ds.targets.data = binio::read_f64_array(in);
    const std::size_t expect = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    if (ds.sources.data.size() != expect || ds.targets.data.size() != expect)
        throw IoError("paired dataset: payload does not match its header");
    return ds;
}

}  // namespace simenh::enhancer
