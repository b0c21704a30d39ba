#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>

namespace rcef {

/// Reads flat `key = value` (or `key value`) lines; '#' starts a comment.
/// Duplicate keys are an error.
std::map<std::string, std::string> read_key_values(std::istream& in);

double parse_double(const std::string& key, const std::string& value);
std::int64_t parse_int(const std::string& key, const std::string& value);

/// Shortest round-trip decimal form, independent of the global locale.
std::string format_double(double value);

}  // namespace rcef
