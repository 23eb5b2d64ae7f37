#include "attmatch/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "attmatch/error.hpp"

namespace attmatch::csv {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

std::vector<std::string> split_line(std::string_view line, char delimiter) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(delimiter, start);
        if (pos == std::string_view::npos) {
            fields.emplace_back(trim(line.substr(start)));
            break;
        }
        fields.emplace_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return fields;
}

std::int64_t parse_int(std::string_view field, const std::string& context) {
    std::int64_t value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw Error(context + ": expected an integer, got '" + std::string(field) + "'");
    }
    return value;
}

double parse_double(std::string_view field, const std::string& context) {
    double value = 0;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last || field.empty()) {
        throw Error(context + ": expected a number, got '" + std::string(field) + "'");
    }
    return value;
}

double parse_finite(std::string_view field, const std::string& context) {
    double value = parse_double(field, context);
    if (!std::isfinite(value)) {
        throw Error(context + ": non-finite value '" + std::string(field) + "'");
    }
    return value;
}

std::string format_double(double value) {
    char buffer[32];
    // %.17g round-trips any double; trim to the shortest representation that
    // still parses back to the same bits so files stay readable.
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buffer, sizeof(buffer), "%.*g", precision, value);
        double back = 0;
        auto [ptr, ec] = std::from_chars(buffer, buffer + std::char_traits<char>::length(buffer), back);
        (void)ptr;
        if (ec == std::errc{} && back == value) break;
    }
    return buffer;
}

}  // namespace attmatch::csv
