#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace canamrf {

/// Shortest decimal text that parses back to the identical double.
std::string format_double(double v);

/// Parsers for config/checkpoint fields. `what` names the field in the
/// ParseError message.
double parse_double(std::string_view text, std::string_view what);
std::uint64_t parse_unsigned(std::string_view text, std::string_view what);

std::string_view trim(std::string_view s);

}  // namespace canamrf
