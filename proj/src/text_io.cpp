#include "muxillum/text_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "muxillum/error.hpp"

namespace muxillum {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& s, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == delim) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("short write to " + path.string());
}

KeyValues read_key_values(const std::filesystem::path& path) {
    const std::string text = read_text_file(path);
    KeyValues kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw FormatError(path.string(), "line " + std::to_string(lineno) + " is not key=value");
        }
        kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
    }
    return kv;
}

void write_key_values(const std::filesystem::path& path,
                      const std::vector<std::pair<std::string, std::string>>& entries) {
    std::string text;
    for (const auto& [k, v] : entries) text += k + "=" + v + "\n";
    write_text_file(path, text);
}

std::string require_string(const KeyValues& kv, const std::string& key, const std::string& file) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw FormatError(file, "missing key '" + key + "'");
    return it->second;
}

double require_double(const KeyValues& kv, const std::string& key, const std::string& file) {
    const std::string s = require_string(kv, key, file);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError(file, "key '" + key + "' is not a number: '" + s + "'");
    }
    return v;
}

long long require_int(const KeyValues& kv, const std::string& key, const std::string& file) {
    const std::string s = require_string(kv, key, file);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw FormatError(file, "key '" + key + "' is not an integer: '" + s + "'");
    }
    return v;
}

std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_fixed(double v, int decimals) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, ptr);
}

}  // namespace muxillum
