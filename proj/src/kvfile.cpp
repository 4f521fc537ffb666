#include "qkd/kvfile.hpp"

#include <charconv>
#include <fstream>
#include <string>

#include "qkd/error.hpp"

namespace qkd {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

KeyValues parse_key_values(std::istream& in, std::string_view source) {
  KeyValues out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view view = line;
    if (const auto hash = view.find('#'); hash != std::string_view::npos) {
      view = view.substr(0, hash);
    }
    view = trim(view);
    if (view.empty()) continue;

    const auto eq = view.find('=');
    const std::string where = std::string(source) + ":" + std::to_string(lineno);
    if (eq == std::string_view::npos) {
      throw ParseError(where + ": expected 'key = value'");
    }
    const auto key = trim(view.substr(0, eq));
    const auto value = trim(view.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ParseError(where + ": empty key or value");
    }
    if (!out.emplace(std::string(key), std::string(value)).second) {
      throw ParseError(where + ": duplicate key '" + std::string(key) + "'");
    }
  }
  return out;
}

KeyValues read_key_values_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_key_values(in, path);
}

double parse_double(std::string_view text, std::string_view what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string(what) + ": not a number: '" + std::string(text) + "'");
  }
  return value;
}

unsigned long long parse_count(std::string_view text, std::string_view what) {
  unsigned long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ParseError(std::string(what) + ": not a non-negative integer: '" +
                     std::string(text) + "'");
  }
  return value;
}

}  // namespace qkd
