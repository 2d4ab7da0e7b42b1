#include "simenh/pipeline/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string_view>

#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"
#include "simenh/store/series_csv.hpp"

namespace simenh::pipeline {

namespace {

std::string trim(std::string_view s) {
    const auto from = s.find_first_not_of(" \t");
    if (from == std::string_view::npos) return {};
    const auto to = s.find_last_not_of(" \t");
    return std::string(s.substr(from, to - from + 1));
}

[[noreturn]] void config_error(const std::string& origin, std::size_t line,
                               const std::string& what) {
    throw ValidationError("config " + origin + " line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& text, const std::string& origin, std::size_t line,
                    const std::string& key) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        config_error(origin, line, "invalid number for " + key + ": '" + text + "'");
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& origin, std::size_t line,
                       const std::string& key) {
    std::int64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        config_error(origin, line, "invalid integer for " + key + ": '" + text + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& origin, std::size_t line,
                        const std::string& key) {
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        config_error(origin, line, "invalid unsigned integer for " + key + ": '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

// "period:amplitude[:phase]" entries separated by commas.
std::vector<signal::SignalComponent> parse_components(const std::string& text,
                                                      const std::string& origin,
                                                      std::size_t line) {
    std::vector<signal::SignalComponent> out;
    for (const std::string& entry : split(text, ',')) {
        const std::string item = trim(entry);
        if (item.empty()) config_error(origin, line, "empty signal component");
        const std::vector<std::string> parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3)
            config_error(origin, line,
                         "component '" + item + "' must be period:amplitude[:phase]");
        signal::SignalComponent c;
        c.period_s = parse_double(trim(parts[0]), origin, line, "component period");
        c.amplitude = parse_double(trim(parts[1]), origin, line, "component amplitude");
        c.phase_rad =
            parts.size() == 3 ? parse_double(trim(parts[2]), origin, line, "component phase") : 0.0;
        out.push_back(c);
    }
    return out;
}

std::string components_text(const std::vector<signal::SignalComponent>& components) {
    std::string out;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (i > 0) out += ",";
        out += store::format_double(components[i].period_s) + ":" +
               store::format_double(components[i].amplitude) + ":" +
               store::format_double(components[i].phase_rad);
    }
    return out;
}

}  // namespace

PipelineConfig default_config() {
    PipelineConfig cfg;
    cfg.signal.components = {{480.0, 1.0, 0.0}, {120.0, 0.35, 0.0}};
    cfg.signal.offset = 0.0;
    cfg.signal.sample_interval_s = 1.0;
    cfg.signal.num_samples = 700;
    return cfg;  // remaining members default to the desk-scale values
}

void PipelineConfig::validate() const {
    signal.validate();
    if (signal.components.empty())
        throw ValidationError("config: signal needs at least one component");
    if (quantizer_levels < 2) throw ValidationError("config: quantizer levels must be at least 2");
    if (quantizer_min && quantizer_max && !(*quantizer_min < *quantizer_max))
        throw ValidationError("config: quantizer min must be below max");
    if (!(noise_sigma >= 0.0)) throw ValidationError("config: noise sigma must be non-negative");
    if (ma_window < 1 || ma_window % 2 == 0)
        throw ValidationError("config: ma_window must be odd and positive");
    if (ma_window > signal.num_samples)
        throw ValidationError("config: ma_window exceeds num_samples");
    enhancer.validate();
    if (!(train_fraction > 0.0 && train_fraction <= 1.0))
        throw ValidationError("config: train_fraction must be in (0, 1]");
    gan.validate();
    if (gan_noise_scale && !(*gan_noise_scale > 0.0))
        throw ValidationError("config: gan noise_scale must be positive");
    if (n_pairs < 1) throw ValidationError("config: n_pairs must be at least 1");
    if (n_noise_windows < 1) throw ValidationError("config: n_noise_windows must be at least 1");
    if (enhancer.window_len > signal.num_samples)
        throw ValidationError("config: enhancer window_len exceeds num_samples");
    if (gan.sample_len > signal.num_samples)
        throw ValidationError("config: gan sample_len exceeds num_samples");
}

// Also the config.txt persisted with every run: a valid config file in a
// fixed order with fixed number formatting, so equal configs hash equally
// and any run can be reproduced by pointing --config at its config.txt.
std::string PipelineConfig::canonical_text() const {
    std::ostringstream out;
    const auto d = [](double v) { return store::format_double(v); };
    out << "[signal]\n"
        << "components = " << components_text(signal.components) << '\n'
        << "offset = " << d(signal.offset) << '\n'
        << "sample_interval = " << d(signal.sample_interval_s) << '\n'
        << "num_samples = " << signal.num_samples << '\n'
        << "\n[quantizer]\n"
        << "levels = " << quantizer_levels << '\n'
        << "min = " << (quantizer_min ? d(*quantizer_min) : "auto") << '\n'
        << "max = " << (quantizer_max ? d(*quantizer_max) : "auto") << '\n'
        << "\n[noise_injection]\n"
        << "sigma = " << d(noise_sigma) << '\n'
        << "\n[decomposition]\n"
        << "ma_window = " << ma_window << '\n'
        << "\n[enhancer]\n"
        << "window_len = " << enhancer.window_len << '\n'
        << "hidden_width = " << enhancer.hidden_width << '\n'
        << "epochs = " << enhancer.epochs << '\n'
        << "batch_size = " << enhancer.batch_size << '\n'
        << "learning_rate = " << d(enhancer.adam.learning_rate) << '\n'
        << "train_fraction = " << d(train_fraction) << '\n'
        << "\n[gan]\n"
        << "latent_dim = " << gan.latent_dim << '\n'
        << "generator_hidden = " << gan.generator_hidden << '\n'
        << "sample_len = " << gan.sample_len << '\n'
        << "iterations = " << gan.iterations << '\n'
        << "batch_size = " << gan.batch_size << '\n'
        << "metric_interval = " << gan.metric_interval << '\n'
        << "noise_scale = " << (gan_noise_scale ? d(*gan_noise_scale) : "auto") << '\n'
        << "learning_rate = " << d(gan.adam.learning_rate) << '\n'
        << "\n[dataset]\n"
        << "n_pairs = " << n_pairs << '\n'
        << "n_noise_windows = " << n_noise_windows << '\n'
        << "\n[run]\n"
        << "master_seed = " << master_seed << '\n';
    return out.str();
}

std::string PipelineConfig::config_hash() const {
    const std::uint64_t h = fnv1a64(canonical_text());
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string PipelineConfig::run_id() const { return "run-" + config_hash(); }

PipelineConfig parse_config(const std::string& text, const std::string& origin) {
    PipelineConfig cfg = default_config();

    static const std::set<std::string> kSections = {"signal",        "quantizer", "noise_injection",
                                                    "decomposition", "enhancer",  "gan",
                                                    "dataset",       "run"};
    std::istringstream stream(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    std::size_t line_no = 0;

    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = raw;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line.erase(comment);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') config_error(origin, line_no, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!kSections.contains(section))
                config_error(origin, line_no, "unknown section [" + section + "]");
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) config_error(origin, line_no, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) config_error(origin, line_no, "key outside any section");
        if (key.empty()) config_error(origin, line_no, "empty key");
        if (value.empty()) config_error(origin, line_no, "empty value for " + key);
        const std::string full_key = section + "." + key;
        if (!seen.insert(full_key).second)
            config_error(origin, line_no, "duplicate key " + full_key);

        if (section == "signal") {
            if (key == "components")
                cfg.signal.components = parse_components(value, origin, line_no);
            else if (key == "offset")
                cfg.signal.offset = parse_double(value, origin, line_no, full_key);
            else if (key == "sample_interval")
                cfg.signal.sample_interval_s = parse_double(value, origin, line_no, full_key);
            else if (key == "num_samples")
                cfg.signal.num_samples =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "quantizer") {
            if (key == "levels")
                cfg.quantizer_levels = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "min")
                cfg.quantizer_min = value == "auto"
                                        ? std::nullopt
                                        : std::optional<double>(
                                              parse_double(value, origin, line_no, full_key));
            else if (key == "max")
                cfg.quantizer_max = value == "auto"
                                        ? std::nullopt
                                        : std::optional<double>(
                                              parse_double(value, origin, line_no, full_key));
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "noise_injection") {
            if (key == "sigma")
                cfg.noise_sigma = parse_double(value, origin, line_no, full_key);
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "decomposition") {
            if (key == "ma_window")
                cfg.ma_window = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "enhancer") {
            if (key == "window_len")
                cfg.enhancer.window_len =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "hidden_width")
                cfg.enhancer.hidden_width =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "epochs")
                cfg.enhancer.epochs = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "batch_size")
                cfg.enhancer.batch_size =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "learning_rate")
                cfg.enhancer.adam.learning_rate = parse_double(value, origin, line_no, full_key);
            else if (key == "train_fraction")
                cfg.train_fraction = parse_double(value, origin, line_no, full_key);
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "gan") {
            if (key == "latent_dim")
                cfg.gan.latent_dim = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "generator_hidden")
                cfg.gan.generator_hidden =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "sample_len")
                cfg.gan.sample_len = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "iterations")
                cfg.gan.iterations = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "batch_size")
                cfg.gan.batch_size = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "metric_interval")
                cfg.gan.metric_interval =
                    static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "noise_scale")
                cfg.gan_noise_scale = value == "auto"
                                          ? std::nullopt
                                          : std::optional<double>(
                                                parse_double(value, origin, line_no, full_key));
            else if (key == "learning_rate")
                cfg.gan.adam.learning_rate = parse_double(value, origin, line_no, full_key);
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "dataset") {
            if (key == "n_pairs")
                cfg.n_pairs = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else if (key == "n_noise_windows")
                cfg.n_noise_windows = static_cast<int>(parse_int(value, origin, line_no, full_key));
            else
                config_error(origin, line_no, "unknown key " + full_key);
        } else if (section == "run") {
            if (key == "master_seed")
                cfg.master_seed = parse_u64(value, origin, line_no, full_key);
            else if (key == "out_dir")
                cfg.out_dir = value;
            else
                config_error(origin, line_no, "unknown key " + full_key);
        }
    }
    cfg.validate();
    return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

}  // namespace simenh::pipeline
