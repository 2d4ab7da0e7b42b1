#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simenh/common/error.hpp"
#include "simenh/kernels/kernels.hpp"
#include "simenh/pipeline/config.hpp"
#include "simenh/pipeline/pipeline.hpp"

namespace {

int exit_code(simenh::ErrorKind kind) {
    switch (kind) {
        case simenh::ErrorKind::validation: return 1;
        case simenh::ErrorKind::numeric: return 2;
        case simenh::ErrorKind::io: return 3;
        case simenh::ErrorKind::network: return 4;
    }
    return 1;
}

void print_summary(const simenh::pipeline::PipelineResult& result, bool full) {
    std::cout << "run directory: " << result.run_dir.string() << '\n';
    if (full) {
        for (const auto& [key, value] : result.manifest.measurements)
            std::cout << "  " << key << " = " << value << '\n';
        std::cout << "  combined samples = " << result.combined.size() << '\n';
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace simenh;

    CLI::App app{"coarse-simulation output enhancement pipeline"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    bool resume = false;
    app.add_option("--config", config_path, "INI config file (defaults are the desk-scale run)");
    app.add_option("--seed", seed, "override the master seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_flag("--resume", resume, "reuse artifacts of already completed stages");

    // Single-stage verbs always reuse earlier artifacts; rerunning a stage by
    // name is the way to ask for just that much work.
    struct Verb {
        const char* name;
        const char* desc;
        pipeline::Stage stage;
        CLI::App* cmd = nullptr;
    };
    Verb verbs[] = {
        {"synth", "synthesize the clean goal and noisy reference series", pipeline::Stage::synth},
        {"quantize", "quantize the goal series into the coarse source", pipeline::Stage::quantize},
        {"make-dataset", "sample aligned source/reference training windows",
         pipeline::Stage::paired_dataset},
        {"train-enhancer", "train the enhancement network", pipeline::Stage::train_enhancer},
        {"enhance", "enhance one source window with the trained network",
         pipeline::Stage::enhance},
        {"extract-noise", "split the reference series into trend and noise",
         pipeline::Stage::extract_noise},
        {"train-gan", "train the noise generator and discriminator", pipeline::Stage::train_gan},
        {"generate-noise", "sample one synthetic noise window", pipeline::Stage::generate_noise},
        {"combine", "add generated noise onto the enhanced window", pipeline::Stage::combine},
        {"run", "run every stage and write the manifest", pipeline::Stage::combine},
    };
    for (Verb& v : verbs) v.cmd = app.add_subcommand(v.name, v.desc)->fallthrough();

    CLI::App* emit =
        app.add_subcommand("emit-plots", "write plot-ready CSVs for a finished run")->fallthrough();
    std::vector<std::string> views;
    std::string run_dir_arg;
    emit->add_option("--view", views, "plot views to emit (default: all)");
    emit->add_option("--run-dir", run_dir_arg, "run directory (default: derived from the config)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        pipeline::PipelineConfig cfg =
            config_path.empty() ? pipeline::default_config() : pipeline::load_config(config_path);
        if (seed) cfg.master_seed = *seed;
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        cfg.validate();

        if (emit->parsed()) {
            const std::filesystem::path run_dir =
                run_dir_arg.empty() ? std::filesystem::path(cfg.out_dir) / cfg.run_id()
                                    : std::filesystem::path(run_dir_arg);
            const std::vector<std::string> selected =
                views.empty() ? pipeline::plot_views() : views;
            for (const std::string& view : selected) {
                const std::filesystem::path written = pipeline::emit_plot_data(run_dir, view);
                std::cout << "wrote " << written.string() << '\n';
            }
            return 0;
        }

        for (const Verb& v : verbs) {
            if (!v.cmd->parsed()) continue;
            const bool is_run = std::string(v.name) == "run";
            const bool full = v.stage == pipeline::Stage::combine;
            std::cerr << "backend: " << kernels::backend_name(kernels::active_backend()) << '\n';
            const pipeline::PipelineResult result =
                pipeline::run_pipeline(cfg, is_run ? resume : true, v.stage);
            if (!full) std::cout << "completed stage " << pipeline::stage_name(v.stage) << '\n';
            print_summary(result, full);
            return 0;
        }
        return 0;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
