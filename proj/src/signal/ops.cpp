#include "simenh/signal/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "simenh/common/error.hpp"
#include "simenh/common/rng.hpp"

namespace simenh::signal {

TimeSeries TimeSeries::from_seconds(double start_s, double interval_s,
                                    std::vector<double> values) {
    if (!(interval_s > 0.0)) throw ValidationError("sample interval must be positive");
    TimeSeries out;
    out.start_time_ns = static_cast<std::int64_t>(std::llround(start_s * 1e9));
    out.sample_interval_ns = static_cast<std::int64_t>(std::llround(interval_s * 1e9));
    if (out.sample_interval_ns <= 0)
        throw ValidationError("sample interval must be at least one nanosecond");
    out.values = std::move(values);
    return out;
}

void TimeSeries::validate() const {
    if (sample_interval_ns <= 0) throw ValidationError("sample interval must be positive");
    if (values.empty()) throw ValidationError("time series has no samples");
}

void SignalSpec::validate() const {
    if (num_samples < 1) throw ValidationError("signal: num_samples must be at least 1");
    if (!(sample_interval_s > 0.0))
        throw ValidationError("signal: sample interval must be positive");
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (!(components[i].period_s > 0.0))
            throw ValidationError("signal: component " + std::to_string(i) +
                                  " period must be positive");
    }
}

TimeSeries synthesize(const SignalSpec& spec) {
    spec.validate();
    std::vector<double> values(static_cast<std::size_t>(spec.num_samples));
    for (int i = 0; i < spec.num_samples; ++i) {
        const double t = i * spec.sample_interval_s;
        double v = spec.offset;
        for (const SignalComponent& c : spec.components) {
            v += c.amplitude * std::sin(2.0 * std::numbers::pi * t / c.period_s + c.phase_rad);
        }
        values[static_cast<std::size_t>(i)] = v;
    }
    TimeSeries out = TimeSeries::from_seconds(0.0, spec.sample_interval_s, std::move(values));
    out.start_time_ns = spec.start_time_ns;
    return out;
}

TimeSeries add_gaussian_noise(const TimeSeries& series, double stddev, std::uint64_t seed) {
    if (!(stddev >= 0.0)) throw ValidationError("noise stddev must be non-negative");
    TimeSeries out = series;
    Rng rng(seed);
    for (double& v : out.values) v += rng.normal(0.0, stddev);
    return out;
}

void QuantizerSpec::validate() const {
    if (levels < 2) throw ValidationError("quantizer: levels must be at least 2");
    if (!(min_value < max_value))
        throw ValidationError("quantizer: min_value must be below max_value");
}

TimeSeries quantize(const TimeSeries& series, const QuantizerSpec& spec) {
    spec.validate();
    const double step = (spec.max_value - spec.min_value) / (spec.levels - 1);
    TimeSeries out = series;
    for (double& v : out.values) {
        if (v <= spec.min_value) {
            v = spec.min_value;
            continue;
        }
        if (v >= spec.max_value) {
            v = spec.max_value;
            continue;
        }
        const int k = std::clamp(static_cast<int>(std::floor((v - spec.min_value) / step)), 0,
                                 spec.levels - 2);
        const double lo = spec.min_value + k * step;
        const double hi = spec.min_value + (k + 1) * step;
        if (v - lo < hi - v) {
            v = lo;
        } else if (hi - v < v - lo) {
            v = hi;
        } else {
            // Exact midpoint: away from zero; equidistant magnitudes go positive.
            v = std::abs(lo) > std::abs(hi) ? lo : (std::abs(hi) > std::abs(lo) ? hi
                                                                                : std::max(lo, hi));
        }
    }
    return out;
}

TimeSeries moving_average(const TimeSeries& series, int window) {
    if (window < 1) throw ValidationError("moving average: window must be at least 1");
    if (window % 2 == 0) throw ValidationError("moving average: window must be odd");
    const int n = static_cast<int>(series.size());
    if (window > n)
        throw ValidationError("moving average: window " + std::to_string(window) +
                              " exceeds series length " + std::to_string(n));
    const int half = window / 2;
    TimeSeries out = series;
    for (int i = 0; i < n; ++i) {
        const int lo = std::max(0, i - half);
        const int hi = std::min(n - 1, i + half);
        double sum = 0.0;
        for (int j = lo; j <= hi; ++j) sum += series.values[static_cast<std::size_t>(j)];
        out.values[static_cast<std::size_t>(i)] = sum / (hi - lo + 1);
    }
    return out;
}

Decomposition extract_noise(const TimeSeries& series, int window) {
    Decomposition d;
    d.trend = moving_average(series, window);
    d.noise = series;
    for (std::size_t i = 0; i < series.size(); ++i) {
        d.noise.values[i] = series.values[i] - d.trend.values[i];
    }
    return d;
}

std::vector<double> window_random_offset(const TimeSeries& series, int window_len,
                                         std::uint64_t seed) {
    if (window_len < 1) throw ValidationError("window length must be at least 1");
    if (static_cast<std::size_t>(window_len) > series.size())
        throw ValidationError("window length " + std::to_string(window_len) +
                              " exceeds series length " + std::to_string(series.size()));
    Rng rng(seed);
    const std::uint64_t span = series.size() - static_cast<std::size_t>(window_len) + 1;
    const std::size_t offset = static_cast<std::size_t>(rng.uniform_int(span));
    return {series.values.begin() + static_cast<std::ptrdiff_t>(offset),
            series.values.begin() + static_cast<std::ptrdiff_t>(offset) + window_len};
}

TimeSeries window_at(const TimeSeries& series, std::size_t offset, int window_len) {
    if (window_len < 1) throw ValidationError("window length must be at least 1");
    if (offset + static_cast<std::size_t>(window_len) > series.size())
        throw ValidationError("window [" + std::to_string(offset) + ", " +
                              std::to_string(offset + static_cast<std::size_t>(window_len)) +
                              ") exceeds series length " + std::to_string(series.size()));
    TimeSeries out;
    out.start_time_ns = series.timestamp_ns(offset);
    out.sample_interval_ns = series.sample_interval_ns;
    out.values.assign(series.values.begin() + static_cast<std::ptrdiff_t>(offset),
                      series.values.begin() + static_cast<std::ptrdiff_t>(offset) + window_len);
    return out;
}

double NormParams::apply(double v) const {
    if (degenerate) return 0.5 * (lo + hi);
    return lo + (v - src_min) * (hi - lo) / (src_max - src_min);
}

double NormParams::invert(double y) const {
    if (degenerate) return src_min;
    return src_min + (y - lo) * (src_max - src_min) / (hi - lo);
}

namespace {

NormParams make_params(double src_min, double src_max, double lo, double hi) {
    if (!(lo < hi)) throw ValidationError("normalize: target range must have lo < hi");
    NormParams p;
    p.src_min = src_min;
    p.src_max = src_max;
    p.lo = lo;
    p.hi = hi;
    p.degenerate = !(src_min < src_max);
    return p;
}

}  // namespace

NormParams fit_norm_params(std::span<const double> values, double lo, double hi) {
    if (values.empty()) throw ValidationError("normalize: empty input");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return make_params(*mn, *mx, lo, hi);
}

NormParams fit_norm_params(std::span<const double> a, std::span<const double> b, double lo,
                           double hi) {
    if (a.empty() || b.empty()) throw ValidationError("normalize: empty input");
    const auto [amn, amx] = std::minmax_element(a.begin(), a.end());
    const auto [bmn, bmx] = std::minmax_element(b.begin(), b.end());
    return make_params(std::min(*amn, *bmn), std::max(*amx, *bmx), lo, hi);
}

std::vector<double> normalize(std::span<const double> values, const NormParams& params) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = params.apply(values[i]);
    return out;
}

std::vector<double> denormalize(std::span<const double> values, const NormParams& params) {
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = params.invert(values[i]);
    return out;
}

std::pair<TimeSeries, NormParams> normalize(const TimeSeries& series, double lo, double hi) {
    const NormParams params = fit_norm_params(series.values, lo, hi);
    TimeSeries out = series;
    out.values = normalize(series.values, params);
    return {std::move(out), params};
}

TimeSeries denormalize(const TimeSeries& series, const NormParams& params) {
    TimeSeries out = series;
    out.values = denormalize(series.values, params);
    return out;
}

double mean(std::span<const double> values) {
    if (values.empty()) throw ValidationError("mean: empty input");
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double stddev(std::span<const double> values) {
    const double m = mean(values);
    double sum = 0.0;
    for (double v : values) {
        const double d = v - m;
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(values.size()));
}

}  // namespace simenh::signal
