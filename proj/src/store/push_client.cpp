#include "simenh/store/push_client.hpp"

#include <chrono>
#include <thread>

#include <httplib.h>

#include "simenh/common/error.hpp"
#include "simenh/store/line_protocol.hpp"

namespace simenh::store {

namespace {

struct ParsedUrl {
    std::string host_port;  // scheme://host:port for httplib
    std::string path;
};

ParsedUrl parse_url(const std::string& url) {
    const std::string scheme = "http://";
    if (url.rfind(scheme, 0) != 0)
        throw ValidationError("push endpoint must be an http:// URL, got '" + url + "'");
    const std::size_t path_start = url.find('/', scheme.size());
    if (path_start == std::string::npos) return {url, "/"};
    if (path_start == scheme.size()) throw ValidationError("push endpoint has no host: " + url);
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

PushResult push_series(const std::string& endpoint_url, const std::string& auth_token,
                       const signal::TimeSeries& series, const std::string& measurement,
                       const std::map<std::string, std::string>& tags,
                       const std::string& field_name, const PushOptions& options) {
    if (auth_token.empty()) throw ValidationError("push: auth token must not be empty");
    if (options.max_attempts < 1) throw ValidationError("push: max_attempts must be at least 1");
    if (series.values.empty()) throw ValidationError("push: series is empty");

    const ParsedUrl url = parse_url(endpoint_url);
    const std::string body = format_series_lines(series, measurement, tags, field_name);

    httplib::Client client(url.host_port);
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(10, 0);
    const httplib::Headers headers = {{"Authorization", "Token " + auth_token}};

    double backoff_ms = options.initial_backoff_ms;
    std::string last_failure = "connection failed";
    for (int attempt = 1; attempt <= options.max_attempts; ++attempt) {
        httplib::Result res =
            client.Post(url.path, headers, body, "text/plain; charset=utf-8");
        if (res) {
            const int status = res->status;
            if (status >= 200 && status < 300) return {status, attempt};
            if (status >= 400 && status < 500) {
                // The request itself is bad; retrying cannot help.
                throw ValidationError("push: endpoint rejected the request with HTTP " +
                                      std::to_string(status));
            }
            last_failure = "HTTP " + std::to_string(status);
        } else {
            last_failure = "connection failed (" + httplib::to_string(res.error()) + ")";
        }
        if (attempt < options.max_attempts) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(static_cast<std::int64_t>(backoff_ms)));
            backoff_ms *= options.backoff_multiplier;
        }
    }
    throw NetworkError("push: giving up after " + std::to_string(options.max_attempts) +
                       " attempts (last: " + last_failure + ")");
}

}  // namespace simenh::store
