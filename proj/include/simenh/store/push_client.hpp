#pragma once

#include <map>
#include <string>

#include "simenh/signal/time_series.hpp"

namespace simenh::store {

struct PushOptions {
    int max_attempts = 3;
    int initial_backoff_ms = 200;
    double backoff_multiplier = 2.0;
};

struct PushResult {
    int status = 0;    // final HTTP status
    int attempts = 0;  // requests actually sent
};

// POSTs the series as line protocol with a token auth header. 2xx succeeds.
// 4xx means the request itself is wrong and is surfaced immediately as a
// validation error. Connection failures and 5xx responses retry with
// exponential backoff up to max_attempts, then raise a network error.
PushResult push_series(const std::string& endpoint_url, const std::string& auth_token,
                       const signal::TimeSeries& series, const std::string& measurement,
                       const std::map<std::string, std::string>& tags,
                       const std::string& field_name, const PushOptions& options = {});

}  // namespace simenh::store
