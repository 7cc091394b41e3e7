#ifndef KEYSCAN_UTIL_HPP
#define KEYSCAN_UTIL_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace keyscan {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

// Splits on whitespace runs, never returns empty tokens.
std::vector<std::string> split_ws(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);
bool ends_with(std::string_view s, std::string_view suffix);

// Parses smali integer literals: decimal or 0x hex, optional sign,
// optional trailing type suffix (t/s/L).
std::optional<std::int64_t> parse_int_literal(std::string_view tok);

std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Orders "smali" before "smali_classes2" before "smali_classes10".
bool natural_less(const std::string& a, const std::string& b);

// Fixed-point formatting with the given number of decimals (round half away
// from zero, locale independent).
std::string format_fixed(double value, int decimals);

}  // namespace keyscan

#endif
