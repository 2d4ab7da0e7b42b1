#include "simenh/gan/gan.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>

#include "simenh/common/binio.hpp"
#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/nn/losses.hpp"

namespace simenh::gan {

void GanConfig::validate() const {
    if (latent_dim < 1) throw ValidationError("gan: latent_dim must be at least 1");
    if (generator_hidden < 1) throw ValidationError("gan: generator_hidden must be at least 1");
    if (sample_len < 1) throw ValidationError("gan: sample_len must be at least 1");
    if (iterations < 0) throw ValidationError("gan: iterations must be non-negative");
    if (batch_size < 2 || batch_size % 2 != 0)
        throw ValidationError("gan: batch_size must be even and at least 2");
    if (metric_interval < 1) throw ValidationError("gan: metric_interval must be at least 1");
    if (iterations % metric_interval != 0)
        throw ValidationError("gan: metric_interval must divide iterations");
    if (!(noise_scale > 0.0)) throw ValidationError("gan: noise_scale must be positive");
    if (disc_filters < 1 || disc_window < 1 || disc_stride < 1 || disc_pool < 1)
        throw ValidationError("gan: discriminator geometry values must be positive");
    adam.validate();
}

NoiseDataset make_noise_dataset(const signal::TimeSeries& noise, int n_windows, int sample_len,
                                std::uint64_t seed) {
    if (n_windows < 1) throw ValidationError("noise dataset: n_windows must be at least 1");
    if (sample_len < 1) throw ValidationError("noise dataset: sample_len must be at least 1");
    if (static_cast<std::size_t>(sample_len) > noise.size())
        throw ValidationError("noise dataset: sample_len " + std::to_string(sample_len) +
                              " exceeds series length " + std::to_string(noise.size()));
    NoiseDataset ds;
    ds.windows = nn::Matrix(n_windows, sample_len);
    Rng rng(seed);
    const std::uint64_t span = noise.size() - static_cast<std::size_t>(sample_len) + 1;
    for (int r = 0; r < n_windows; ++r) {
        const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(span));
        double* row = ds.windows.row(r);
        for (int c = 0; c < sample_len; ++c)
            row[c] = noise.values[offset + static_cast<std::size_t>(c)];
    }
    return ds;
}

namespace {
constexpr const char* kScaleKey = "noise_scale";
}

nn::NetworkModel build_generator(const GanConfig& config) {
    config.validate();
    const nn::Activation lrelu = nn::Activation::leaky_relu(0.2);
    const std::vector<nn::LayerSpec> specs = {
        nn::LayerSpec::fully_connected(config.latent_dim, config.generator_hidden, lrelu),
        nn::LayerSpec::batch_norm(config.generator_hidden),
        nn::LayerSpec::fully_connected(config.generator_hidden, config.sample_len,
                                       nn::Activation::tanh()),
        nn::LayerSpec::reshape(config.sample_len),
    };
    nn::NetworkModel model =
        nn::build_network(specs, config.latent_dim, derive_seed(config.seed, "generator-init"));
    model.metadata[kScaleKey] = {config.noise_scale};
    return model;
}

nn::NetworkModel build_discriminator(const GanConfig& config) {
    config.validate();
    const nn::Activation lrelu = nn::Activation::leaky_relu(0.2);
    if (config.disc_window > config.sample_len)
        throw ValidationError("gan: sample_len " + std::to_string(config.sample_len) +
                              " is shorter than the discriminator window " +
                              std::to_string(config.disc_window));
    const int positions = (config.sample_len - config.disc_window) / config.disc_stride + 1;
    const int pooled = positions / config.disc_pool;
    if (pooled < 1)
        throw ValidationError("gan: discriminator pool width exceeds its conv output");
    const int flat = pooled * config.disc_filters;
    const std::vector<nn::LayerSpec> specs = {
        nn::LayerSpec::conv1d(config.disc_filters, config.disc_window, config.disc_stride, lrelu),
        nn::LayerSpec::max_pool1d(config.disc_pool),
        nn::LayerSpec::flatten(),
        nn::LayerSpec::fully_connected(flat, 32, lrelu),
        nn::LayerSpec::fully_connected(32, 8, lrelu),
        nn::LayerSpec::fully_connected(8, 1, nn::Activation::sigmoid()),
    };
    return nn::build_network(specs, config.sample_len,
                             derive_seed(config.seed, "discriminator-init"));
}

double noise_scale_of(const nn::NetworkModel& generator) {
    const auto it = generator.metadata.find(kScaleKey);
    if (it == generator.metadata.end() || it->second.size() != 1) return 1.0;
    return it->second[0];
}

namespace {

nn::Matrix draw_latents(Rng& rng, int rows, int latent_dim) {
    nn::Matrix z(rows, latent_dim);
    for (double& v : z.data) v = rng.normal();
    return z;
}

}  // namespace

std::vector<GanMetricsRecord> train_gan(nn::NetworkModel& generator,
                                        nn::NetworkModel& discriminator, const NoiseDataset& data,
                                        const GanConfig& config, const TrainHooks* hooks) {
    config.validate();
    const int half = config.batch_size / 2;
    if (data.windows.rows < half)
        throw ValidationError("gan: need at least " + std::to_string(half) +
                              " data windows, got " + std::to_string(data.windows.rows));
    if (data.windows.cols != config.sample_len)
        throw ValidationError("gan: data window length does not match sample_len");
    if (generator.output_width() != config.sample_len ||
        discriminator.input_width() != config.sample_len)
        throw ValidationError("gan: model widths do not match sample_len");

    const double scale = noise_scale_of(generator);
    Rng rng(derive_seed(config.seed, "gan-train"));

    nn::Matrix disc_labels(config.batch_size, 1);
    for (int r = 0; r < half; ++r) disc_labels.at(r, 0) = 1.0;  // real first, then generated
    nn::Matrix gen_labels(config.batch_size, 1);
    for (double& v : gen_labels.data) v = 1.0;  // generator wants fakes scored as real

    std::vector<GanMetricsRecord> records;
    records.reserve(config.metric_interval > 0
                        ? static_cast<std::size_t>(config.iterations / config.metric_interval)
                        : 0);

    for (int step = 1; step <= config.iterations; ++step) {
        // (a) Discriminator update on a mixed batch.
        if (hooks && hooks->on_discriminator_begin) hooks->on_discriminator_begin(step);

        nn::Matrix batch(config.batch_size, config.sample_len);
        for (int r = 0; r < half; ++r) {
            const std::uint64_t pick =
                rng.uniform_int(static_cast<std::uint64_t>(data.windows.rows));
            std::memcpy(batch.row(r), data.windows.row(static_cast<int>(pick)),
                        sizeof(double) * static_cast<std::size_t>(config.sample_len));
        }
        {
            const nn::Matrix z = draw_latents(rng, half, config.latent_dim);
            const nn::Matrix fake = nn::forward(generator, z, nn::ForwardMode::infer);
            for (int r = 0; r < half; ++r) {
                double* dst = batch.row(half + r);
                const double* src = fake.row(r);
                for (int c = 0; c < config.sample_len; ++c) dst[c] = src[c] * scale;
            }
        }

        nn::ForwardCache disc_cache;
        const nn::Matrix disc_out =
            nn::forward(discriminator, batch, nn::ForwardMode::train, &disc_cache);
        const nn::LossResult disc_loss = nn::bce_loss(disc_out, disc_labels);
        if (!std::isfinite(disc_loss.value))
            throw NumericError("gan: discriminator loss diverged at step " + std::to_string(step));
        const nn::Gradients disc_grads = nn::backward(discriminator, disc_cache, disc_loss.grad);
        nn::adam_step(discriminator, disc_grads, config.adam);

        int real_right = 0;
        int fake_right = 0;
        for (int r = 0; r < half; ++r) {
            if (disc_out.at(r, 0) > 0.5) ++real_right;
            if (disc_out.at(half + r, 0) < 0.5) ++fake_right;
        }
        const double acc_real = static_cast<double>(real_right) / half;
        const double acc_fake = static_cast<double>(fake_right) / half;

        if (hooks && hooks->on_discriminator_end)
            hooks->on_discriminator_end({step, &disc_labels, disc_loss.value});

        // (b) Generator update through the frozen discriminator.
        if (hooks && hooks->on_generator_begin) hooks->on_generator_begin(step);
        discriminator.set_trainable(false);

        const nn::Matrix z = draw_latents(rng, config.batch_size, config.latent_dim);
        nn::ForwardCache gen_cache;
        const nn::Matrix raw = nn::forward(generator, z, nn::ForwardMode::train, &gen_cache);
        nn::Matrix scaled(raw.rows, raw.cols);
        for (std::size_t i = 0; i < raw.data.size(); ++i) scaled.data[i] = raw.data[i] * scale;

        nn::ForwardCache judge_cache;
        const nn::Matrix judged =
            nn::forward(discriminator, scaled, nn::ForwardMode::train, &judge_cache);
        const nn::LossResult gen_loss = nn::bce_loss(judged, gen_labels);
        if (!std::isfinite(gen_loss.value))
            throw NumericError("gan: generator loss diverged at step " + std::to_string(step));

        const nn::Gradients judge_grads = nn::backward(discriminator, judge_cache, gen_loss.grad);
        nn::Matrix gen_out_grad = judge_grads.input_grad;
        for (double& v : gen_out_grad.data) v *= scale;  // chain rule through the output scaling
        const nn::Gradients gen_grads = nn::backward(generator, gen_cache, gen_out_grad);
        nn::adam_step(generator, gen_grads, config.adam);
        nn::apply_batch_norm_updates(generator, gen_cache);

        discriminator.set_trainable(true);
        if (hooks && hooks->on_generator_end)
            hooks->on_generator_end({step, &gen_labels, gen_loss.value});

        if (step % config.metric_interval == 0)
            records.push_back({step, acc_real, acc_fake, disc_loss.value, gen_loss.value});
    }
    return records;
}

nn::Matrix generate_noise(const nn::NetworkModel& generator, int count, std::uint64_t seed) {
    if (count < 1) throw ValidationError("generate_noise: count must be at least 1");
    Rng rng(seed);
    const nn::Matrix z = draw_latents(rng, count, generator.input_width());
    nn::Matrix out = nn::forward(generator, z, nn::ForwardMode::infer);
    const double scale = noise_scale_of(generator);
    for (double& v : out.data) v *= scale;
    return out;
}

namespace {
constexpr char kNoiseMagic[8] = {'S', 'E', 'N', 'H', 'N', 'O', 'I', 'S'};
}

void save_noise_dataset(const NoiseDataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open dataset file for writing: " + path.string());
    out.write(kNoiseMagic, sizeof(kNoiseMagic));
    binio::write_u32(out, static_cast<std::uint32_t>(dataset.windows.rows));
    binio::write_u32(out, static_cast<std::uint32_t>(dataset.windows.cols));
    binio::write_f64_array(out, dataset.windows.data);
    if (!out) throw IoError("failed writing dataset: " + path.string());
}

NoiseDataset load_noise_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file: " + path.string());
    binio::expect_magic(in, kNoiseMagic, sizeof(kNoiseMagic), "noise dataset");
    const int rows = static_cast<int>(binio::read_u32(in));
    const int cols = static_cast<int>(binio::read_u32(in));
    NoiseDataset ds;
    ds.windows = nn::Matrix(rows, cols);
    ds.windows.data = binio::read_f64_array(in);
    if (ds.windows.data.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols))
        throw IoError("noise dataset: payload does not match its header");
    return ds;
}

}  // namespace simenh::gan
