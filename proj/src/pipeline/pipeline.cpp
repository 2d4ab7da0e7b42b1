#include "simenh/pipeline/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <utility>

#include <json.hpp>

#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/enhancer/enhancer.hpp"
#include "simenh/gan/gan.hpp"
#include "simenh/nn/checkpoint.hpp"
#include "simenh/store/series_csv.hpp"

namespace simenh::pipeline {

namespace {

constexpr const char* kStageNames[] = {
    "synth",         "quantize",  "paired-dataset", "train-enhancer", "enhance",
    "extract-noise", "noise-dataset", "train-gan",  "generate-noise", "combine",
};

}  // namespace

const char* stage_name(Stage stage) { return kStageNames[static_cast<int>(stage)]; }

Stage stage_from_name(const std::string& name) {
    for (int i = 0; i < 10; ++i) {
        if (name == kStageNames[i]) return static_cast<Stage>(i);
    }
    throw ValidationError("unknown stage '" + name + "'");
}

signal::TimeSeries combine_series(const signal::TimeSeries& enhanced,
                                  const signal::TimeSeries& noise) {
    if (enhanced.size() != noise.size())
        throw ValidationError("combine: series lengths differ (" +
                              std::to_string(enhanced.size()) + " vs " +
                              std::to_string(noise.size()) + ")");
    if (enhanced.start_time_ns != noise.start_time_ns ||
        enhanced.sample_interval_ns != noise.sample_interval_ns)
        throw ValidationError("combine: series timestamps differ");
    signal::TimeSeries out = enhanced;
    for (std::size_t i = 0; i < out.size(); ++i) out.values[i] += noise.values[i];
    return out;
}

namespace {

struct RunState {
    const PipelineConfig* cfg = nullptr;
    std::filesystem::path run_dir;
    std::string hash;
    bool resume = false;

    std::set<std::string> completed;
    std::vector<std::string> completed_order;
    std::map<std::string, std::uint64_t> seeds;
    store::RunManifest manifest;

    signal::TimeSeries goal, real, source, trend, noise_real, enhanced, noise_gen, combined;
    enhancer::PairedDataset pairs;
    nn::NetworkModel enh_model;
    gan::NoiseDataset noise_windows;
    nn::NetworkModel generator;

    std::uint64_t seed(const std::string& label) const { return seeds.at(label); }
    std::filesystem::path file(const char* name) const { return run_dir / name; }
};

[[noreturn]] void rethrow_for_stage(const char* name, const Error& e) {
    const std::string msg = std::string("stage ") + name + ": " + e.what();
    switch (e.kind()) {
        case ErrorKind::validation: throw ValidationError(msg);
        case ErrorKind::numeric: throw NumericError(msg);
        case ErrorKind::io: throw IoError(msg);
        case ErrorKind::network: throw NetworkError(msg);
    }
    throw ValidationError(msg);
}

void write_progress(const RunState& state) {
    nlohmann::json doc;
    doc["config_hash"] = state.hash;
    doc["completed"] = state.completed_order;
    const std::filesystem::path path = state.run_dir / "progress.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open progress file for writing: " + path.string());
    out << doc.dump(2) << '\n';
}

void read_progress(RunState& state) {
    const std::filesystem::path path = state.run_dir / "progress.json";
    std::ifstream in(path);
    if (!in) return;
    nlohmann::json doc;
    try {
        in >> doc;
        if (doc.at("config_hash").get<std::string>() != state.hash)
            throw ValidationError("run directory " + state.run_dir.string() +
                                  " belongs to a different config");
        for (const auto& entry : doc.at("completed")) {
            const std::string name = entry.get<std::string>();
            if (state.completed.insert(name).second) state.completed_order.push_back(name);
        }
    } catch (const nlohmann::json::exception& e) {
        throw IoError("progress file " + path.string() + ": " + e.what());
    }
}

void mark_done(RunState& state, Stage stage) {
    const std::string name = stage_name(stage);
    if (state.completed.insert(name).second) state.completed_order.push_back(name);
    write_progress(state);
}

bool can_skip(const RunState& state, Stage stage, std::initializer_list<const char*> files) {
    if (!state.resume) return false;
    if (!state.completed.contains(stage_name(stage))) return false;
    for (const char* f : files) {
        if (!std::filesystem::exists(state.run_dir / f)) return false;
    }
    return true;
}

void register_artifact(RunState& state, const std::string& key, const std::string& file) {
    state.manifest.artifacts[key] = file;
}

// Last non-empty data row of a small CSV, split on commas. Header-only files
// yield nothing.
std::optional<std::vector<double>> last_csv_row(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    std::string line, last;
    bool first = true;
    while (std::getline(in, line)) {
        if (first) {
            first = false;
            continue;
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) last = line;
    }
    if (last.empty()) return std::nullopt;
    std::vector<double> out;
    std::size_t start = 0;
    while (start <= last.size()) {
        const std::size_t comma = last.find(',', start);
        const std::string field =
            last.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        double v = 0.0;
        const auto [end, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (ec != std::errc{} || end != field.data() + field.size())
            throw IoError("invalid number '" + field + "' in " + path.string());
        out.push_back(v);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

nn::NetworkModel load_owned_checkpoint(const RunState& state, const char* file) {
    nn::LoadedCheckpoint loaded = nn::load_checkpoint(state.run_dir / file);
    if (loaded.config_hash != state.hash)
        throw ValidationError(std::string(file) + " belongs to config " + loaded.config_hash +
                              ", this run is " + state.hash);
    return std::move(loaded.model);
}

void stage_synth(RunState& state) {
    if (can_skip(state, Stage::synth, {"goal.csv", "real.csv"})) {
        state.goal = store::read_series_csv(state.file("goal.csv"));
        state.real = store::read_series_csv(state.file("real.csv"));
    } else {
        state.goal = signal::synthesize(state.cfg->signal);
        state.real = signal::add_gaussian_noise(state.goal, state.cfg->noise_sigma,
                                                state.seed("synth-noise"));
        store::write_series_csv(state.goal, state.file("goal.csv"));
        store::write_series_csv(state.real, state.file("real.csv"));
        mark_done(state, Stage::synth);
    }
    register_artifact(state, "goal", "goal.csv");
    register_artifact(state, "real", "real.csv");
}

void stage_quantize(RunState& state) {
    const auto [mn_it, mx_it] =
        std::minmax_element(state.goal.values.begin(), state.goal.values.end());
    signal::QuantizerSpec qs;
    qs.levels = state.cfg->quantizer_levels;
    qs.min_value = state.cfg->quantizer_min.value_or(*mn_it);
    qs.max_value = state.cfg->quantizer_max.value_or(*mx_it);
    if (can_skip(state, Stage::quantize, {"source.csv"})) {
        state.source = store::read_series_csv(state.file("source.csv"));
    } else {
        state.source = signal::quantize(state.goal, qs);
        store::write_series_csv(state.source, state.file("source.csv"));
        mark_done(state, Stage::quantize);
    }
    state.manifest.measurements["quantizer_min"] = qs.min_value;
    state.manifest.measurements["quantizer_max"] = qs.max_value;
    register_artifact(state, "source", "source.csv");
}

void stage_paired_dataset(RunState& state) {
    if (can_skip(state, Stage::paired_dataset, {"pairs.bin"})) {
        state.pairs = enhancer::load_paired_dataset(state.file("pairs.bin"));
    } else {
        state.pairs = enhancer::make_paired_dataset(state.source, state.real, state.cfg->n_pairs,
                                                    state.cfg->enhancer.window_len,
                                                    state.seed("paired-dataset"));
        enhancer::save_paired_dataset(state.pairs, state.file("pairs.bin"));
        mark_done(state, Stage::paired_dataset);
    }
    register_artifact(state, "pairs", "pairs.bin");
}

void stage_train_enhancer(RunState& state) {
    const auto [train, holdout] = enhancer::split_dataset(state.pairs, state.cfg->train_fraction);
    if (can_skip(state, Stage::train_enhancer, {"enhancer.ckpt", "loss_history.csv"})) {
        state.enh_model = load_owned_checkpoint(state, "enhancer.ckpt");
        if (const auto row = last_csv_row(state.file("loss_history.csv")); row && row->size() == 2)
            state.manifest.measurements["final_train_loss"] = (*row)[1];
    } else {
        enhancer::EnhancerConfig cfg = state.cfg->enhancer;
        cfg.init_seed = state.seed("enhancer-init");
        cfg.train_seed = state.seed("enhancer-train");
        state.enh_model = enhancer::build_enhancer(cfg);
        enhancer::set_normalization(state.enh_model, state.pairs.norm);
        const std::vector<double> history =
            enhancer::train_enhancer(state.enh_model, train, cfg);
        nn::save_checkpoint(state.enh_model, state.file("enhancer.ckpt"), state.hash);

        std::ofstream out(state.file("loss_history.csv"), std::ios::trunc);
        if (!out) throw IoError("cannot open loss_history.csv for writing");
        out << "epoch,loss\n";
        for (std::size_t e = 0; e < history.size(); ++e)
            out << e + 1 << ',' << store::format_double(history[e]) << '\n';
        if (!out) throw IoError("failed writing loss_history.csv");
        if (!history.empty())
            state.manifest.measurements["final_train_loss"] = history.back();
        mark_done(state, Stage::train_enhancer);
    }
    if (holdout.sources.rows > 0)
        state.manifest.measurements["holdout_rmse"] =
            enhancer::evaluate_rmse(state.enh_model, holdout);
    register_artifact(state, "enhancer_checkpoint", "enhancer.ckpt");
    register_artifact(state, "loss_history", "loss_history.csv");
}

void stage_enhance(RunState& state) {
    const int window_len = state.cfg->enhancer.window_len;
    Rng rng(state.seed("enhance-window"));
    const std::uint64_t span = state.source.size() - static_cast<std::size_t>(window_len) + 1;
    const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(span));
    if (can_skip(state, Stage::enhance, {"enhanced.csv"})) {
        state.enhanced = store::read_series_csv(state.file("enhanced.csv"));
    } else {
        const signal::TimeSeries window = signal::window_at(state.source, offset, window_len);
        state.enhanced = enhancer::enhance_window(state.enh_model, window);
        store::write_series_csv(state.enhanced, state.file("enhanced.csv"));
        mark_done(state, Stage::enhance);
    }
    state.manifest.measurements["enhance_offset"] = static_cast<double>(offset);
    register_artifact(state, "enhanced", "enhanced.csv");
}

void stage_extract_noise(RunState& state) {
    if (can_skip(state, Stage::extract_noise, {"trend.csv", "noise_real.csv"})) {
        state.trend = store::read_series_csv(state.file("trend.csv"));
        state.noise_real = store::read_series_csv(state.file("noise_real.csv"));
    } else {
        signal::Decomposition d = signal::extract_noise(state.real, state.cfg->ma_window);
        state.trend = std::move(d.trend);
        state.noise_real = std::move(d.noise);
        store::write_series_csv(state.trend, state.file("trend.csv"));
        store::write_series_csv(state.noise_real, state.file("noise_real.csv"));
        mark_done(state, Stage::extract_noise);
    }
    state.manifest.measurements["real_noise_std"] = signal::stddev(state.noise_real.values);
    register_artifact(state, "trend", "trend.csv");
    register_artifact(state, "noise_real", "noise_real.csv");
}

void stage_noise_dataset(RunState& state) {
    if (can_skip(state, Stage::noise_dataset, {"noise_windows.bin"})) {
        state.noise_windows = gan::load_noise_dataset(state.file("noise_windows.bin"));
    } else {
        state.noise_windows =
            gan::make_noise_dataset(state.noise_real, state.cfg->n_noise_windows,
                                    state.cfg->gan.sample_len, state.seed("noise-dataset"));
        gan::save_noise_dataset(state.noise_windows, state.file("noise_windows.bin"));
        mark_done(state, Stage::noise_dataset);
    }
    register_artifact(state, "noise_windows", "noise_windows.bin");
}

void stage_train_gan(RunState& state) {
    gan::GanConfig cfg = state.cfg->gan;
    cfg.seed = state.seed("gan");
    cfg.noise_scale = state.cfg->gan_noise_scale.value_or(
        3.0 * signal::stddev(state.noise_real.values));
    if (!(cfg.noise_scale > 0.0))
        throw ValidationError("gan: derived noise_scale is zero; the extracted noise is flat");

    if (can_skip(state, Stage::train_gan,
                 {"generator.ckpt", "discriminator.ckpt", "gan_metrics.csv"})) {
        state.generator = load_owned_checkpoint(state, "generator.ckpt");
        if (const auto row = last_csv_row(state.file("gan_metrics.csv")); row && row->size() == 5) {
            state.manifest.measurements["gan_acc_real_final"] = (*row)[1];
            state.manifest.measurements["gan_acc_fake_final"] = (*row)[2];
            state.manifest.measurements["gan_loss_d_final"] = (*row)[3];
            state.manifest.measurements["gan_loss_g_final"] = (*row)[4];
        }
    } else {
        state.generator = gan::build_generator(cfg);
        nn::NetworkModel discriminator = gan::build_discriminator(cfg);
        const std::vector<gan::GanMetricsRecord> records =
            gan::train_gan(state.generator, discriminator, state.noise_windows, cfg);
        nn::save_checkpoint(state.generator, state.file("generator.ckpt"), state.hash);
        nn::save_checkpoint(discriminator, state.file("discriminator.ckpt"), state.hash);

        std::ofstream out(state.file("gan_metrics.csv"), std::ios::trunc);
        if (!out) throw IoError("cannot open gan_metrics.csv for writing");
        out << "step,acc_real,acc_fake,loss_d,loss_g\n";
        for (const gan::GanMetricsRecord& r : records) {
            out << r.step << ',' << store::format_double(r.acc_real) << ','
                << store::format_double(r.acc_fake) << ',' << store::format_double(r.loss_d)
                << ',' << store::format_double(r.loss_g) << '\n';
        }
        if (!out) throw IoError("failed writing gan_metrics.csv");
        if (!records.empty()) {
            state.manifest.measurements["gan_acc_real_final"] = records.back().acc_real;
            state.manifest.measurements["gan_acc_fake_final"] = records.back().acc_fake;
            state.manifest.measurements["gan_loss_d_final"] = records.back().loss_d;
            state.manifest.measurements["gan_loss_g_final"] = records.back().loss_g;
        }
        mark_done(state, Stage::train_gan);
    }
    state.manifest.measurements["noise_scale"] = cfg.noise_scale;
    state.manifest.measurements["gan_iterations"] = cfg.iterations;
    state.manifest.measurements["gan_metric_interval"] = cfg.metric_interval;
    register_artifact(state, "generator_checkpoint", "generator.ckpt");
    register_artifact(state, "discriminator_checkpoint", "discriminator.ckpt");
    register_artifact(state, "gan_metrics", "gan_metrics.csv");
}

void stage_generate_noise(RunState& state) {
    if (can_skip(state, Stage::generate_noise, {"noise_generated.csv"})) {
        state.noise_gen = store::read_series_csv(state.file("noise_generated.csv"));
    } else {
        const nn::Matrix rows =
            gan::generate_noise(state.generator, 1, state.seed("generate-noise"));
        state.noise_gen.start_time_ns = state.enhanced.start_time_ns;
        state.noise_gen.sample_interval_ns = state.enhanced.sample_interval_ns;
        state.noise_gen.values = rows.data;
        store::write_series_csv(state.noise_gen, state.file("noise_generated.csv"));
        mark_done(state, Stage::generate_noise);
    }
    register_artifact(state, "noise_generated", "noise_generated.csv");
}

void stage_combine(RunState& state) {
    state.combined = combine_series(state.enhanced, state.noise_gen);
    if (!can_skip(state, Stage::combine, {"combined.csv"})) {
        store::write_series_csv(state.combined, state.file("combined.csv"));
        // The CSV encoding is exact, so the file must reproduce the sum bit
        // for bit.
        const signal::TimeSeries reread = store::read_series_csv(state.file("combined.csv"));
        if (reread.values != state.combined.values)
            throw IoError("combined.csv failed the exact round-trip check");
        mark_done(state, Stage::combine);
    }
    register_artifact(state, "combined", "combined.csv");
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& config, bool resume, Stage up_to) {
    config.validate();

    RunState state;
    state.cfg = &config;
    state.hash = config.config_hash();
    state.resume = resume;
    state.run_dir = std::filesystem::path(config.out_dir) / config.run_id();
    std::filesystem::create_directories(state.run_dir);

    state.seeds["master"] = config.master_seed;
    for (const char* label : {"synth-noise", "paired-dataset", "enhancer-init", "enhancer-train",
                              "enhance-window", "noise-dataset", "gan", "generate-noise"}) {
        state.seeds[label] = derive_seed(config.master_seed, label);
    }

    if (resume) read_progress(state);

    {
        std::ofstream out(state.file("config.txt"), std::ios::trunc);
        if (!out) throw IoError("cannot open config.txt for writing");
        out << config.canonical_text();
    }
    register_artifact(state, "config", "config.txt");

    state.manifest.run_id = config.run_id();
    state.manifest.config_hash = state.hash;
    state.manifest.seeds = state.seeds;

    using StageFn = void (*)(RunState&);
    constexpr std::pair<Stage, StageFn> kStages[] = {
        {Stage::synth, stage_synth},
        {Stage::quantize, stage_quantize},
        {Stage::paired_dataset, stage_paired_dataset},
        {Stage::train_enhancer, stage_train_enhancer},
        {Stage::enhance, stage_enhance},
        {Stage::extract_noise, stage_extract_noise},
        {Stage::noise_dataset, stage_noise_dataset},
        {Stage::train_gan, stage_train_gan},
        {Stage::generate_noise, stage_generate_noise},
        {Stage::combine, stage_combine},
    };

    for (const auto& [stage, fn] : kStages) {
        try {
            fn(state);
        } catch (const Error& e) {
            rethrow_for_stage(stage_name(stage), e);
        }
        if (stage == up_to) break;
    }

    PipelineResult result;
    result.run_dir = state.run_dir;
    result.enhanced = std::move(state.enhanced);
    result.generated_noise = std::move(state.noise_gen);
    result.combined = std::move(state.combined);

    if (up_to == Stage::combine) {
        state.manifest.completed_stages = state.completed_order;
        store::write_manifest(state.manifest, state.run_dir);
    }
    result.manifest = std::move(state.manifest);
    return result;
}

std::vector<std::string> plot_views() {
    return {"goal",      "source",          "real",     "enhanced",    "trend",
            "noise_real", "noise_generated", "combined", "gan_metrics", "loss_history"};
}

std::filesystem::path emit_plot_data(const std::filesystem::path& run_dir,
                                     const std::string& view) {
    if (!store::manifest_exists(run_dir))
        throw IoError("no manifest in " + run_dir.string() + "; run the pipeline first");
    const store::RunManifest manifest = store::read_manifest(run_dir);
    const std::filesystem::path plots = run_dir / "plots";
    std::filesystem::create_directories(plots);

    const auto artifact_path = [&](const std::string& key) {
        const auto it = manifest.artifacts.find(key);
        if (it == manifest.artifacts.end())
            throw IoError("manifest has no artifact '" + key + "'");
        return run_dir / it->second;
    };

    const std::filesystem::path out_path = plots / (view + ".csv");
    static const std::set<std::string> kSeriesViews = {"goal",  "source",          "real",
                                                       "trend", "enhanced",        "noise_real",
                                                       "noise_generated"};
    if (kSeriesViews.contains(view)) {
        const signal::TimeSeries series = store::read_series_csv(artifact_path(view));
        store::write_series_csv(series, out_path);
        return out_path;
    }
    if (view == "combined") {
        const signal::TimeSeries enhanced = store::read_series_csv(artifact_path("enhanced"));
        const signal::TimeSeries combined = store::read_series_csv(artifact_path("combined"));
        if (enhanced.size() != combined.size() ||
            enhanced.start_time_ns != combined.start_time_ns ||
            enhanced.sample_interval_ns != combined.sample_interval_ns)
            throw ValidationError("enhanced and combined series do not line up");
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw IoError("cannot open " + out_path.string() + " for writing");
        out << "timestamp,enhanced,combined\n";
        for (std::size_t i = 0; i < combined.size(); ++i) {
            out << combined.timestamp_ns(i) << ',' << store::format_double(enhanced.values[i])
                << ',' << store::format_double(combined.values[i]) << '\n';
        }
        return out_path;
    }
    if (view == "gan_metrics" || view == "loss_history") {
        const std::filesystem::path src = artifact_path(view);
        std::ifstream in(src);
        if (!in) throw IoError("cannot open " + src.string());
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string text = buf.str();
        if (view == "gan_metrics") {
            const auto it_n = manifest.measurements.find("gan_iterations");
            const auto it_k = manifest.measurements.find("gan_metric_interval");
            if (it_n != manifest.measurements.end() && it_k != manifest.measurements.end()) {
                const long expected =
                    static_cast<long>(it_n->second) / static_cast<long>(it_k->second);
                const long rows = std::count(text.begin(), text.end(), '\n') - 1;
                if (rows != expected)
                    throw ValidationError("gan_metrics.csv has " + std::to_string(rows) +
                                          " rows, expected " + std::to_string(expected));
            }
        }
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw IoError("cannot open " + out_path.string() + " for writing");
        out << text;
        return out_path;
    }
    throw ValidationError("unknown plot view '" + view + "'");
}

}  // namespace simenh::pipeline
