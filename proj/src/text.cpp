#include "mkf/text.hpp"

#include "mkf/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace mkf::text {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t end = text.find(sep, start);
        out.emplace_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    return out;
}

std::pair<std::string, KeyValues> split_spec(std::string_view text) {
    const std::size_t colon = text.find(':');
    std::string head(text.substr(0, colon));
    KeyValues pairs;
    if (colon == std::string_view::npos) return {head, pairs};
    std::string body(text.substr(colon + 1));
    for (char& c : body) {
        if (c == ';') c = ',';
    }
    for (const auto& item : split(body, ',')) {
        if (item.empty()) continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + item + "'");
        pairs.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
    return {head, pairs};
}

double parse_double(std::string_view value, std::string_view what) {
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError("invalid number for " + std::string(what) + ": '" + std::string(value) + "'");
    }
    return out;
}

std::int64_t parse_int(std::string_view value, std::string_view what) {
    std::int64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("invalid integer for " + std::string(what) + ": '" + std::string(value) + "'");
    }
    return out;
}

std::uint64_t parse_u64(std::string_view value, std::string_view what) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("invalid unsigned integer for " + std::string(what) + ": '" + std::string(value) + "'");
    }
    return out;
}

std::string format_double(double value) {
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

}  // namespace mkf::text
