#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace muxillum {

/// Ordered key=value record, as used by manifests and noise model files.
/// Lines starting with '#' and blank lines are ignored on read.
using KeyValues = std::map<std::string, std::string>;

KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& entries);

/// Lookup helpers that raise FormatError naming the file and key.
std::string require_string(const KeyValues& kv, const std::string& key, const std::string& file);
double require_double(const KeyValues& kv, const std::string& key, const std::string& file);
long long require_int(const KeyValues& kv, const std::string& key, const std::string& file);

/// Whole-file helpers.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);
/// Fixed-point text with the given number of decimals.
std::string format_fixed(double v, int decimals);

std::vector<std::string> split(const std::string& s, char delim);
std::string trim(const std::string& s);

}  // namespace muxillum
