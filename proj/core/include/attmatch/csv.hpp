#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace attmatch::csv {

/// Splits one line on `delimiter`, trimming surrounding blanks and a trailing
/// CR. Quoting is not supported; fields must not contain the delimiter.
std::vector<std::string> split_line(std::string_view line, char delimiter);

/// Reads and splits every line of `in`. Blank lines are skipped.
/// Calls `fn(line_number, fields)` with 1-based line numbers.
template <typename Fn>
void for_each_row(std::istream& in, char delimiter, Fn&& fn);

/// Strict field parsers; throw attmatch::Error naming `context` on failure.
std::int64_t parse_int(std::string_view field, const std::string& context);
double parse_double(std::string_view field, const std::string& context);
/// Like parse_double but rejects NaN and infinities.
double parse_finite(std::string_view field, const std::string& context);

/// Shortest exact decimal for a double: round-trips through parse_double.
std::string format_double(double value);

}  // namespace attmatch::csv

#include <istream>

namespace attmatch::csv {

template <typename Fn>
void for_each_row(std::istream& in, char delimiter, Fn&& fn) {
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        fn(line_number, split_line(line, delimiter));
    }
}

}  // namespace attmatch::csv
