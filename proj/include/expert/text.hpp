#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace expert::text {

/// Unicode NFC normalization followed by whitespace collapsing (runs of
/// whitespace become one space, leading and trailing whitespace dropped).
/// Case is preserved.
std::string normalize(std::string_view utf8);

/// A lowercased token and the byte range it was cut from in the source text.
struct Token {
    std::string text;
    std::size_t begin = 0;
    std::size_t end = 0;
};

/// Splits on non-alphanumeric code points and lowercases each token.
/// Invalid UTF-8 bytes act as separators.
std::vector<Token> tokenize(std::string_view utf8);

/// Token texts only.
std::vector<std::string> terms(std::string_view utf8);

// Line-record helpers shared by every on-disk format.

/// Backslash-escapes tab, newline, carriage return and backslash.
std::string escape_field(std::string_view field);
/// Inverse of escape_field. Throws InvalidArgument on a dangling escape.
std::string unescape_field(std::string_view field);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Shortest representation that parses back to the identical value.
std::string format_double(double value);
std::string format_float(float value);

/// Whole-string numeric parse; throws InvalidArgument on garbage or trailing text.
double parse_double(std::string_view s);
float parse_float(std::string_view s);
long long parse_int(std::string_view s);

/// True for ids usable as file names and whitespace-delimited fields.
bool is_valid_id(std::string_view id);

}  // namespace expert::text
