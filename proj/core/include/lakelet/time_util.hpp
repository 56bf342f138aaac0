#pragma once

#include <cstdint>
#include <string>

namespace lakelet {

int64_t unix_millis_now();

/// UTC ISO-8601 with millisecond precision, e.g. "2019-03-23T07:00:43.328Z".
std::string iso8601_utc(int64_t unix_millis);
std::string iso8601_now();

/// Twitter-style timestamp, e.g. "Sat Mar 23 07:00:43 +0000 2019".
std::string twitter_time(int64_t unix_millis);

}  // namespace lakelet
