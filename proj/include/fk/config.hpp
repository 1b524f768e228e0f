#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

namespace fk {

/// Flat `key = value` text configuration. Blank lines and lines starting
/// with '#' are ignored; later keys override earlier ones.
class Config {
public:
    Config() = default;
    static Config parse(const std::string& text);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    std::string get(const std::string& key) const;
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Throws FormatError naming the first key that is not in `allowed`.
    void require_known(const std::set<std::string>& allowed) const;

private:
    std::map<std::string, std::string> values_;
};

}  // namespace fk
