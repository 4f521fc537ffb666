#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>

namespace qkd {

// `key = value` lines, `#` starts a comment, blank lines ignored.
// Keys are kept verbatim; duplicates and lines without '=' are errors.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::istream& in, std::string_view source);
KeyValues read_key_values_file(const std::string& path);

// Whole-string numeric parsing; accepts scientific notation.
double parse_double(std::string_view text, std::string_view what);
unsigned long long parse_count(std::string_view text, std::string_view what);

}  // namespace qkd
