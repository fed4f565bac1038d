#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Small parsing/formatting helpers shared by the spec-string parsers and the CSV layer.
namespace mkf::text {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Splits "head:k1=v1,k2=v2" (',' or ';' separated) into the head and its key/value pairs.
std::pair<std::string, KeyValues> split_spec(std::string_view text);

double parse_double(std::string_view value, std::string_view what);
std::int64_t parse_int(std::string_view value, std::string_view what);
std::uint64_t parse_u64(std::string_view value, std::string_view what);

/// Shortest representation that round-trips.
std::string format_double(double value);

std::vector<std::string> split(std::string_view text, char sep);

}  // namespace mkf::text
