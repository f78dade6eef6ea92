#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

// Flat key = value run configuration. '#' starts a comment, blank lines are
// ignored, keys must come from the declared set (unknown keys are rejected
// with their line number). Accessors consume keys so unread leftovers can be
// diagnosed; echo() serializes the effective configuration in a form that
// parses back identically, which is how outputs record what produced them.

namespace poppersim::config {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

class RunConfig {
public:
    static RunConfig parse_file(const std::string& path,
                                const std::vector<std::string>& allowed_keys);
    static RunConfig parse_text(const std::string& text,
                                const std::vector<std::string>& allowed_keys);
    static RunConfig empty();

    bool has(const std::string& key) const;

    double get_double(const std::string& key, double fallback);
    int get_int(const std::string& key, int fallback);
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    std::vector<double> get_double_list(const std::string& key,
                                        const std::vector<double>& fallback);
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback);

    // Keys present in the source but never read by any accessor.
    std::vector<std::string> unused_keys() const;

private:
    struct Entry {
        std::string value;
        int line = 0;
        bool used = false;
    };
    std::map<std::string, Entry> entries_;
};

// Deterministic numeric formatting used everywhere output must be
// byte-reproducible: shortest round-trip decimal of a double.
std::string format_double(double v);
std::string format_int(long long v);

// One "key = value" line per pair, sorted by key.
std::string echo(const std::vector<std::pair<std::string, std::string>>& pairs);

} // namespace poppersim::config
