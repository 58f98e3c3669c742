#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace proxkit {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Maximal [A-Za-z0-9]+ runs, lowercased.
std::vector<std::string> tokenize(std::string_view text);

/// Shortest round-trip decimal form (std::to_chars); deterministic across runs.
std::string format_double(double v);

/// One CSV field, quoted per RFC 4180 only when needed.
std::string csv_escape(std::string_view field);

/// Splits one CSV line honoring double-quoted fields.
std::vector<std::string> csv_split(std::string_view line);

/// FNV-1a 64-bit digest.
uint64_t fnv1a64(std::string_view bytes);
uint64_t fnv1a64_file(const std::filesystem::path& p);
std::string hex64(uint64_t v);

std::string read_file(const std::filesystem::path& p);
void write_file(const std::filesystem::path& p, std::string_view contents);

}  // namespace proxkit
