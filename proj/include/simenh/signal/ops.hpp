#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "simenh/signal/time_series.hpp"

namespace simenh::signal {

struct SignalComponent {
    double period_s = 1.0;  // > 0
    double amplitude = 1.0;
    double phase_rad = 0.0;
};

struct SignalSpec {
    std::vector<SignalComponent> components;
    double offset = 0.0;
    double sample_interval_s = 1.0;  // > 0
    int num_samples = 0;             // >= 1
    std::int64_t start_time_ns = 0;
    void validate() const;
};

// value[i] = offset + sum_k amplitude_k * sin(2*pi * t_i / period_k + phase_k)
// with t_i = i * sample_interval_s.
TimeSeries synthesize(const SignalSpec& spec);

// Adds zero-mean gaussian noise with the given standard deviation; the draw
// sequence is fixed by the seed.
TimeSeries add_gaussian_noise(const TimeSeries& series, double stddev, std::uint64_t seed);

struct QuantizerSpec {
    int levels = 2;          // >= 2
    double min_value = 0.0;  // < max_value
    double max_value = 1.0;
    void validate() const;
};

// Snaps every sample to the nearest of `levels` evenly spaced values spanning
// [min_value, max_value]. Out-of-range samples clamp to the end levels. Exact
// midpoints round away from zero; a midpoint at zero takes the positive level.
TimeSeries quantize(const TimeSeries& series, const QuantizerSpec& spec);

// Centered moving average with an odd window. Near the edges the window keeps
// its center and drops the positions that fall outside the series, so every
// output averages only real samples.
TimeSeries moving_average(const TimeSeries& series, int window);

struct Decomposition {
    TimeSeries trend;
    TimeSeries noise;  // series - trend, elementwise
};

Decomposition extract_noise(const TimeSeries& series, int window);

// Uniformly random window start in [0, size - window_len]; returns the slice.
std::vector<double> window_random_offset(const TimeSeries& series, int window_len,
                                         std::uint64_t seed);

// Slice with timestamps preserved.
TimeSeries window_at(const TimeSeries& series, std::size_t offset, int window_len);

struct NormParams {
    double src_min = 0.0;
    double src_max = 1.0;
    double lo = -1.0;
    double hi = 1.0;
    bool degenerate = false;  // src_min == src_max: map to midpoint, invert to src_min

    double apply(double v) const;
    double invert(double y) const;
};

NormParams fit_norm_params(std::span<const double> values, double lo, double hi);
NormParams fit_norm_params(std::span<const double> a, std::span<const double> b, double lo,
                           double hi);

std::vector<double> normalize(std::span<const double> values, const NormParams& params);
std::vector<double> denormalize(std::span<const double> values, const NormParams& params);

std::pair<TimeSeries, NormParams> normalize(const TimeSeries& series, double lo, double hi);
TimeSeries denormalize(const TimeSeries& series, const NormParams& params);

double mean(std::span<const double> values);
double stddev(std::span<const double> values);  // population (1/N) form

}  // namespace simenh::signal
