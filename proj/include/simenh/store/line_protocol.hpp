#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "simenh/signal/time_series.hpp"

namespace simenh::store {

// One point in line protocol form:
//   measurement[,tag=value...] field=value timestamp_ns
struct SeriesRecord {
    std::string measurement;
    std::map<std::string, std::string> tags;
    std::string field_name;
    double value = 0.0;
    std::int64_t timestamp_ns = 0;
};

// Commas, spaces, and (outside the measurement) equals signs are
// backslash-escaped.
std::string format_line(const SeriesRecord& record);

std::string format_series_lines(const signal::TimeSeries& series, const std::string& measurement,
                                const std::map<std::string, std::string>& tags,
                                const std::string& field_name);

void write_line_protocol(const signal::TimeSeries& series, const std::string& measurement,
                         const std::map<std::string, std::string>& tags,
                         const std::string& field_name, const std::filesystem::path& path);

// Parse errors carry line and column; timestamps must be non-decreasing
// across the file.
std::vector<SeriesRecord> read_line_protocol(const std::filesystem::path& path);
std::vector<SeriesRecord> parse_line_protocol(const std::string& text);

}  // namespace simenh::store
