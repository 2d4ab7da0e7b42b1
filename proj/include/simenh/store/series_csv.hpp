#pragma once

#include <filesystem>
#include <string>

#include "simenh/signal/time_series.hpp"

namespace simenh::store {

enum class TimestampFormat { nanoseconds, iso8601 };

// Header is exactly "timestamp,value". Values are written with shortest
// round-trip formatting, so read(write(s)) reproduces every double bit for
// bit. ISO timestamps carry nine fractional digits and a trailing Z.
void write_series_csv(const signal::TimeSeries& series, const std::filesystem::path& path,
                      TimestampFormat format = TimestampFormat::nanoseconds);

// Accepts either timestamp format (detected per file). Requires at least two
// rows to establish the sample interval and rejects the first row that breaks
// uniform spacing, naming its line number.
signal::TimeSeries read_series_csv(const std::filesystem::path& path);

std::string format_timestamp_iso8601(std::int64_t ns);
std::int64_t parse_timestamp_iso8601(const std::string& text);

// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace simenh::store
