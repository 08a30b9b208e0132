#include "expert/text.hpp"

#include <charconv>
#include <system_error>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "expert/errors.hpp"

namespace expert::text {

namespace {

void append_utf8(std::string& out, UChar32 c)
{
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    U8_APPEND_UNSAFE(buf, len, c);
    out.append(buf, static_cast<std::size_t>(len));
}

std::string to_nfc(std::string_view utf8)
{
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) {
        throw Error("ICU NFC normalizer unavailable");
    }
    icu::UnicodeString src = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8.data(), static_cast<int32_t>(utf8.size())));
    if (nfc->isNormalized(src, status) && U_SUCCESS(status)) {
        return std::string(utf8);
    }
    status = U_ZERO_ERROR;
    icu::UnicodeString dst = nfc->normalize(src, status);
    if (U_FAILURE(status)) {
        throw InvalidArgument("text could not be NFC-normalized");
    }
    std::string out;
    dst.toUTF8String(out);
    return out;
}

}  // namespace

std::string normalize(std::string_view utf8)
{
    std::string nfc = to_nfc(utf8);
    std::string out;
    out.reserve(nfc.size());
    const auto* s = reinterpret_cast<const uint8_t*>(nfc.data());
    const auto n = static_cast<int32_t>(nfc.size());
    int32_t i = 0;
    bool pending_space = false;
    while (i < n) {
        int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(s, i, n, c);
        if (c >= 0 && u_isUWhiteSpace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.append(nfc, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
    }
    return out;
}

std::vector<Token> tokenize(std::string_view utf8)
{
    std::vector<Token> tokens;
    const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
    const auto n = static_cast<int32_t>(utf8.size());
    int32_t i = 0;
    Token current;
    bool in_token = false;
    while (i < n) {
        int32_t start = i;
        UChar32 c = 0;
        U8_NEXT(s, i, n, c);
        if (c >= 0 && u_isalnum(c)) {
            if (!in_token) {
                current = Token{{}, static_cast<std::size_t>(start), 0};
                in_token = true;
            }
            append_utf8(current.text, u_tolower(c));
            current.end = static_cast<std::size_t>(i);
        } else if (in_token) {
            tokens.push_back(std::move(current));
            in_token = false;
        }
    }
    if (in_token) {
        tokens.push_back(std::move(current));
    }
    return tokens;
}

std::vector<std::string> terms(std::string_view utf8)
{
    std::vector<std::string> out;
    for (auto& t : tokenize(utf8)) {
        out.push_back(std::move(t.text));
    }
    return out;
}

std::string escape_field(std::string_view field)
{
    std::string out;
    out.reserve(field.size());
    for (char c : field) {
        switch (c) {
        case '\t': out += "\\t"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\\': out += "\\\\"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

std::string unescape_field(std::string_view field)
{
    std::string out;
    out.reserve(field.size());
    for (std::size_t i = 0; i < field.size(); ++i) {
        char c = field[i];
        if (c != '\\') {
            out.push_back(c);
            continue;
        }
        if (++i == field.size()) {
            throw InvalidArgument("dangling backslash escape");
        }
        switch (field[i]) {
        case 't': out.push_back('\t'); break;
        case 'n': out.push_back('\n'); break;
        case 'r': out.push_back('\r'); break;
        case '\\': out.push_back('\\'); break;
        default: throw InvalidArgument(std::string("unknown escape \\") + field[i]);
        }
    }
    return out;
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            parts.push_back(line.substr(start));
            return parts;
        }
        parts.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string format_double(double value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string format_float(float value)
{
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

template <typename T>
T parse_number(std::string_view s, const char* kind)
{
    T value{};
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size() || s.empty()) {
        throw InvalidArgument("not a valid " + std::string(kind) + ": '" + std::string(s) + "'");
    }
    return value;
}

}  // namespace

double parse_double(std::string_view s) { return parse_number<double>(s, "number"); }
float parse_float(std::string_view s) { return parse_number<float>(s, "number"); }
long long parse_int(std::string_view s) { return parse_number<long long>(s, "integer"); }

bool is_valid_id(std::string_view id)
{
    if (id.empty() || id == "." || id == "..") {
        return false;
    }
    for (unsigned char c : id) {
        if (c <= ' ' || c == '/' || c == '\\' || c == ';' || c == 0x7f) {
            return false;
        }
    }
    return true;
}

}  // namespace expert::text
