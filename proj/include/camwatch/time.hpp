#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace camwatch {

// All timestamps are UTC with one-second resolution.
using Timestamp = std::chrono::sys_seconds;
using Date = std::chrono::sys_days;

// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|±HH:MM)"; fractional seconds are
// truncated. Throws InvalidInput.
Timestamp parse_rfc3339(std::string_view text);
std::string format_rfc3339(Timestamp t);

// "YYYY-MM-DD". Throws InvalidInput.
Date parse_date(std::string_view text);
std::string format_date(Date d);

// "HHMMSS" of the time of day.
std::string format_hms(Timestamp t);

Date date_of(Timestamp t);
Timestamp now_utc();

}  // namespace camwatch
