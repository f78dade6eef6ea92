#include "poppersim/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace poppersim::config {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

template <typename T>
T parse_number(const std::string& key, const std::string& raw, const char* kind) {
    const std::string s = trim(raw);
    T value{};
    const char* first = s.data();
    const char* last = s.data() + s.size();
    std::from_chars_result r{};
    if constexpr (std::is_floating_point_v<T>) {
        r = std::from_chars(first, last, value);
    } else {
        r = std::from_chars(first, last, value, 10);
    }
    if (s.empty() || r.ec != std::errc{} || r.ptr != last)
        fail("key '" + key + "': not a valid " + kind + " (got '" + s + "')");
    return value;
}

std::vector<std::string> split_list(const std::string& key, const std::string& raw) {
    std::vector<std::string> parts;
    std::string piece;
    std::istringstream in(raw);
    while (std::getline(in, piece, ',')) parts.push_back(trim(piece));
    if (parts.empty() || std::any_of(parts.begin(), parts.end(),
                                     [](const std::string& p) { return p.empty(); }))
        fail("key '" + key + "': expected a comma separated list (got '" + raw + "')");
    return parts;
}

} // namespace

RunConfig RunConfig::parse_text(const std::string& text,
                                const std::vector<std::string>& allowed_keys) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            fail("line " + std::to_string(line_no) + ": expected 'key = value', got '" +
                 stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty())
            fail("line " + std::to_string(line_no) + ": missing key before '='");
        if (std::find(allowed_keys.begin(), allowed_keys.end(), key) == allowed_keys.end())
            fail("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        const auto [it, inserted] = cfg.entries_.emplace(key, Entry{value, line_no, false});
        if (!inserted)
            fail("line " + std::to_string(line_no) + ": duplicate key '" + key +
                 "' (first set on line " + std::to_string(it->second.line) + ")");
    }
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path,
                                const std::vector<std::string>& allowed_keys) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_text(buffer.str(), allowed_keys);
}

RunConfig RunConfig::empty() { return RunConfig{}; }

bool RunConfig::has(const std::string& key) const { return entries_.count(key) != 0; }

double RunConfig::get_double(const std::string& key, double fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return parse_number<double>(key, it->second.value, "number");
}

int RunConfig::get_int(const std::string& key, int fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return parse_number<int>(key, it->second.value, "integer");
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return parse_number<std::uint64_t>(key, it->second.value, "unsigned integer");
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    return it->second.value;
}

std::vector<double> RunConfig::get_double_list(const std::string& key,
                                               const std::vector<double>& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    std::vector<double> out;
    for (const std::string& piece : split_list(key, it->second.value))
        out.push_back(parse_number<double>(key, piece, "number"));
    return out;
}

std::vector<int> RunConfig::get_int_list(const std::string& key,
                                         const std::vector<int>& fallback) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    it->second.used = true;
    std::vector<int> out;
    for (const std::string& piece : split_list(key, it->second.value))
        out.push_back(parse_number<int>(key, piece, "integer"));
    return out;
}

std::vector<std::string> RunConfig::unused_keys() const {
    std::vector<std::string> out;
    for (const auto& [key, entry] : entries_)
        if (!entry.used) out.push_back(key);
    return out;
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    if (v == 0.0) return std::signbit(v) ? "-0" : "0";
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

std::string format_int(long long v) { return std::to_string(v); }

std::string echo(const std::vector<std::pair<std::string, std::string>>& pairs) {
    auto sorted = pairs;
    std::sort(sorted.begin(), sorted.end());
    std::string out;
    for (const auto& [key, value] : sorted) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    }
    return out;
}

} // namespace poppersim::config
