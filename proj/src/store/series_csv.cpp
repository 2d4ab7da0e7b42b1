#include "simenh/store/series_csv.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "simenh/common/error.hpp"

namespace simenh::store {

std::string format_double(double v) {
    std::array<char, 32> buf;
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw IoError("failed to format a value");
    return std::string(buf.data(), end);
}

namespace {

constexpr std::int64_t kNsPerSec = 1'000'000'000;
constexpr std::int64_t kSecPerDay = 86'400;

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

constexpr int kMonthDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

// Civil-from-days and back, proleptic Gregorian calendar.
void civil_from_days(std::int64_t days, std::int64_t& y, int& m, int& d) {
    days += 719468;  // shift epoch from 1970-01-01 to 0000-03-01
    const std::int64_t era = floor_div(days, 146097);
    const int doe = static_cast<int>(days - era * 146097);
    const int yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const int doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const int mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    if (m <= 2) ++y;
}

std::int64_t days_from_civil(std::int64_t y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = floor_div(y, 400);
    const int yoe = static_cast<int>(y - era * 400);
    const int doy = (153 * (m > 2 ? m - 3 : m + 9) + 2) / 5 + d - 1;
    const int doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

bool all_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (c < '0' || c > '9') return false;
    return true;
}

double parse_value(std::string_view text, std::size_t line) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || end != text.data() + text.size())
        throw ParseError("invalid value '" + std::string(text) + "'", line);
    return v;
}

}  // namespace

std::string format_timestamp_iso8601(std::int64_t ns) {
    const std::int64_t secs = floor_div(ns, kNsPerSec);
    const std::int64_t frac = ns - secs * kNsPerSec;  // always in [0, 1e9)
    const std::int64_t days = floor_div(secs, kSecPerDay);
    std::int64_t rem = secs - days * kSecPerDay;
    std::int64_t year;
    int month, day;
    civil_from_days(days, year, month, day);
    const int hh = static_cast<int>(rem / 3600);
    const int mm = static_cast<int>(rem % 3600 / 60);
    const int ss = static_cast<int>(rem % 60);
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d-%02dT%02d:%02d:%02d.%09lldZ",
                  static_cast<long long>(year), month, day, hh, mm, ss,
                  static_cast<long long>(frac));
    return buf;
}

std::int64_t parse_timestamp_iso8601(const std::string& text) {
    // YYYY-MM-DDThh:mm:ss[.fffffffff]Z
    int year, month, day, hh, mm, ss;
    int consumed = 0;
    if (std::sscanf(text.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day, &hh, &mm, &ss,
                    &consumed) != 6)
        throw ValidationError("invalid timestamp '" + text + "'");
    std::string_view rest(text.c_str() + consumed);
    std::int64_t frac = 0;
    if (!rest.empty() && rest.front() == '.') {
        rest.remove_prefix(1);
        std::size_t n = 0;
        while (n < rest.size() && rest[n] >= '0' && rest[n] <= '9') ++n;
        if (n == 0 || n > 9) throw ValidationError("invalid timestamp '" + text + "'");
        for (std::size_t i = 0; i < 9; ++i) {
            frac = frac * 10 + (i < n ? rest[i] - '0' : 0);
        }
        rest.remove_prefix(n);
    }
    if (rest != "Z") throw ValidationError("invalid timestamp '" + text + "' (expected Z suffix)");
    if (month < 1 || month > 12) throw ValidationError("invalid timestamp '" + text + "'");
    int dim = kMonthDays[month - 1];
    if (month == 2 && is_leap(year)) dim = 29;
    if (day < 1 || day > dim || hh > 23 || mm > 59 || ss > 59 || hh < 0 || mm < 0 || ss < 0)
        throw ValidationError("invalid timestamp '" + text + "'");
    const std::int64_t days = days_from_civil(year, month, day);
    return (days * kSecPerDay + hh * 3600 + mm * 60 + ss) * kNsPerSec + frac;
}

void write_series_csv(const signal::TimeSeries& series, const std::filesystem::path& path,
                      TimestampFormat format) {
    series.validate();
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open CSV for writing: " + path.string());
    out << "timestamp,value\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const std::int64_t ts = series.timestamp_ns(i);
        if (format == TimestampFormat::nanoseconds) {
            out << ts;
        } else {
            out << format_timestamp_iso8601(ts);
        }
        out << ',' << format_double(series.values[i]) << '\n';
    }
    if (!out) throw IoError("failed writing CSV: " + path.string());
}

signal::TimeSeries read_series_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty file", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "timestamp,value")
        throw ParseError("expected header 'timestamp,value', got '" + line + "'", 1);

    std::vector<std::int64_t> timestamps;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'timestamp,value'", line_no);
        if (line.find(',', comma + 1) != std::string::npos)
            throw ParseError("too many fields", line_no);
        std::string ts_text = line.substr(0, comma);
        const std::string value_text = line.substr(comma + 1);

        std::int64_t ts;
        std::string_view digits(ts_text);
        const bool negative = !digits.empty() && digits.front() == '-';
        if (negative) digits.remove_prefix(1);
        if (all_digits(digits)) {
            const auto [end, ec] =
                std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), ts);
            if (ec != std::errc{} || end != ts_text.data() + ts_text.size())
                throw ParseError("invalid timestamp '" + ts_text + "'", line_no);
        } else {
            try {
                ts = parse_timestamp_iso8601(ts_text);
            } catch (const Error& e) {
                throw ParseError(e.what(), line_no);
            }
        }
        timestamps.push_back(ts);
        values.push_back(parse_value(value_text, line_no));
    }

    if (values.size() < 2)
        throw ValidationError("CSV " + path.string() +
                              " needs at least two rows to establish the sample interval");
    const std::int64_t interval = timestamps[1] - timestamps[0];
    if (interval <= 0)
        throw ValidationError("CSV " + path.string() + ": timestamps must increase (line 3)");
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        const std::int64_t gap = timestamps[i] - timestamps[i - 1];
        if (gap != interval)
            throw ValidationError("CSV " + path.string() + ": non-uniform sample interval at line " +
                                  std::to_string(i + 2) + " (expected " + std::to_string(interval) +
                                  " ns, got " + std::to_string(gap) + " ns)");
    }

    signal::TimeSeries series;
    series.start_time_ns = timestamps.front();
    series.sample_interval_ns = interval;
    series.values = std::move(values);
    return series;
}

}  // namespace simenh::store
