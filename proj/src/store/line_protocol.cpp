#include "simenh/store/line_protocol.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string_view>

#include "simenh/common/error.hpp"
#include "simenh/store/series_csv.hpp"

namespace simenh::store {

namespace {

std::string escaped(const std::string& text, bool escape_equals) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        if (c == ',' || c == ' ' || c == '\\' || (escape_equals && c == '=')) out += '\\';
        out += c;
    }
    return out;
}

void validate_record(const SeriesRecord& record) {
    if (record.measurement.empty()) throw ValidationError("line protocol: empty measurement");
    if (record.field_name.empty()) throw ValidationError("line protocol: empty field name");
    for (const auto& [key, value] : record.tags) {
        if (key.empty()) throw ValidationError("line protocol: empty tag key");
        if (value.empty())
            throw ValidationError("line protocol: empty value for tag '" + key + "'");
    }
}

}  // namespace

std::string format_line(const SeriesRecord& record) {
    validate_record(record);
    std::string out = escaped(record.measurement, false);
    for (const auto& [key, value] : record.tags) {
        out += ',';
        out += escaped(key, true);
        out += '=';
        out += escaped(value, true);
    }
    out += ' ';
    out += escaped(record.field_name, true);
    out += '=';
    out += format_double(record.value);
    out += ' ';
    out += std::to_string(record.timestamp_ns);
    return out;
}

std::string format_series_lines(const signal::TimeSeries& series, const std::string& measurement,
                                const std::map<std::string, std::string>& tags,
                                const std::string& field_name) {
    series.validate();
    SeriesRecord record;
    record.measurement = measurement;
    record.tags = tags;
    record.field_name = field_name;
    std::string out;
    for (std::size_t i = 0; i < series.size(); ++i) {
        record.value = series.values[i];
        record.timestamp_ns = series.timestamp_ns(i);
        out += format_line(record);
        out += '\n';
    }
    return out;
}

void write_line_protocol(const signal::TimeSeries& series, const std::string& measurement,
                         const std::map<std::string, std::string>& tags,
                         const std::string& field_name, const std::filesystem::path& path) {
    const std::string text = format_series_lines(series, measurement, tags, field_name);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path.string());
    out << text;
    if (!out) throw IoError("failed writing: " + path.string());
}

namespace {

class LineScanner {
  public:
    LineScanner(std::string_view line, std::size_t line_no) : line_(line), line_no_(line_no) {}

    bool done() const { return pos_ >= line_.size(); }
    char peek() const { return line_[pos_]; }
    std::size_t column() const { return pos_ + 1; }

    void expect(char c, const char* what) {
        if (done() || line_[pos_] != c)
            throw ParseError(std::string("expected ") + what, line_no_, column());
        ++pos_;
    }

    // Reads up to (not consuming) any unescaped delimiter.
    std::string token(std::string_view delims) {
        std::string out;
        while (pos_ < line_.size()) {
            const char c = line_[pos_];
            if (c == '\\') {
                if (pos_ + 1 >= line_.size())
                    throw ParseError("dangling escape", line_no_, column());
                out += line_[pos_ + 1];
                pos_ += 2;
                continue;
            }
            if (delims.find(c) != std::string_view::npos) break;
            out += c;
            ++pos_;
        }
        return out;
    }

    // Raw slice up to a delimiter; no escape handling (numeric fields).
    std::string_view raw_token(char delim) {
        const std::size_t start = pos_;
        while (pos_ < line_.size() && line_[pos_] != delim) ++pos_;
        return line_.substr(start, pos_ - start);
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError(what, line_no_, column());
    }

  private:
    std::string_view line_;
    std::size_t line_no_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<SeriesRecord> parse_line_protocol(const std::string& text) {
    std::vector<SeriesRecord> records;
    std::istringstream stream(text);
    std::string line;
    std::size_t line_no = 0;
    bool have_prev = false;
    std::int64_t prev_ts = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        LineScanner scan(line, line_no);
        SeriesRecord record;
        record.measurement = scan.token(", ");
        if (record.measurement.empty()) scan.fail("empty measurement");

        while (!scan.done() && scan.peek() == ',') {
            scan.expect(',', "','");
            const std::size_t key_col = scan.column();
            std::string key = scan.token("=, ");
            if (key.empty()) throw ParseError("empty tag key", line_no, key_col);
            scan.expect('=', "'=' after tag key");
            record.tags[std::move(key)] = scan.token(", ");
        }

        scan.expect(' ', "space before the field");
        const std::size_t field_col = scan.column();
        record.field_name = scan.token("=, ");
        if (record.field_name.empty()) throw ParseError("empty field name", line_no, field_col);
        scan.expect('=', "'=' after field name");

        const std::size_t value_col = scan.column();
        const std::string_view value_text = scan.raw_token(' ');
        const auto [vend, vec] =
            std::from_chars(value_text.data(), value_text.data() + value_text.size(),
                            record.value);
        if (vec != std::errc{} || vend != value_text.data() + value_text.size())
            throw ParseError("invalid field value '" + std::string(value_text) + "'", line_no,
                             value_col);

        scan.expect(' ', "space before the timestamp");
        const std::size_t ts_col = scan.column();
        const std::string_view ts_text = scan.raw_token(' ');
        const auto [tend, tec] =
            std::from_chars(ts_text.data(), ts_text.data() + ts_text.size(), record.timestamp_ns);
        if (tec != std::errc{} || tend != ts_text.data() + ts_text.size() || ts_text.empty())
            throw ParseError("invalid timestamp '" + std::string(ts_text) + "'", line_no, ts_col);
        if (!scan.done()) scan.fail("unexpected trailing content");

        if (have_prev && record.timestamp_ns < prev_ts)
            throw ParseError("timestamps must be non-decreasing", line_no, ts_col);
        prev_ts = record.timestamp_ns;
        have_prev = true;
        records.push_back(std::move(record));
    }
    return records;
}

std::vector<SeriesRecord> read_line_protocol(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_line_protocol(buf.str());
}

}  // namespace simenh::store
