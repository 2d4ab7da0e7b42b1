#pragma once

#include <cstdint>
#include <vector>

namespace simenh::signal {

// Uniformly sampled series. Timestamps are integer nanoseconds so that write /
// read round-trips and interval checks are exact.
struct TimeSeries {
    std::int64_t start_time_ns = 0;
    std::int64_t sample_interval_ns = 1'000'000'000;
    std::vector<double> values;

    static TimeSeries from_seconds(double start_s, double interval_s, std::vector<double> values);

    std::size_t size() const { return values.size(); }
    std::int64_t timestamp_ns(std::size_t i) const {
        return start_time_ns + static_cast<std::int64_t>(i) * sample_interval_ns;
    }
    double interval_seconds() const { return static_cast<double>(sample_interval_ns) * 1e-9; }
    double time_seconds(std::size_t i) const {
        return static_cast<double>(i) * interval_seconds();
    }

    void validate() const;  // interval > 0, values non-empty
};

}  // namespace simenh::signal
