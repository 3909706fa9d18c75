#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "krein/common.hpp"

namespace krein::app {

// Malformed config or override: exit code 1.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sectioned key = value configuration. See docs/config.md for the grammar.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "<string>");
    static Config load(const std::string& path);

    // Applies "section.key=value"; the key must be known.
    void set(const std::string& dotted, const std::string& value);
    void set(const std::string& section, const std::string& key, const std::string& value);

    bool has(const std::string& section, const std::string& key) const;
    std::string text(const std::string& section, const std::string& key, const std::string& fallback) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    std::optional<double> optional_number(const std::string& section, const std::string& key) const;
    long integer(const std::string& section, const std::string& key, long fallback) const;
    bool flag(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key,
                                std::vector<double> fallback = {}) const;
    Point point(const std::string& section, const std::string& key, Point fallback) const;
    std::vector<Point> points(const std::string& section, const std::string& key) const;

    const std::map<std::string, std::map<std::string, std::string>>& entries() const { return entries_; }

private:
    const std::string* raw(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, std::string>> entries_;
};

// Known sections and keys.
const std::map<std::string, std::vector<std::string>>& schema();

}  // namespace krein::app
