#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace cdtrade {

using Date = std::chrono::sys_days;

// Strict ISO-8601 calendar date, YYYY-MM-DD.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date date);

// Next Monday..Friday after `date`.
Date next_weekday(Date date);

}  // namespace cdtrade
