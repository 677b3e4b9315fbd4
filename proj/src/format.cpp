#include "canamrf/format.hpp"

#include <charconv>

#include "canamrf/errors.hpp"

namespace canamrf {

std::string format_double(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double parse_double(std::string_view text, std::string_view what) {
    text = trim(text);
    double v = 0.0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        throw ParseError(std::string(what) + ": '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::uint64_t parse_unsigned(std::string_view text, std::string_view what) {
    text = trim(text);
    std::uint64_t v = 0;
    auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        throw ParseError(std::string(what) + ": '" + std::string(text) + "' is not a non-negative integer");
    }
    return v;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

}  // namespace canamrf
