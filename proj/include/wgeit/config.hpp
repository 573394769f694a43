#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace wgeit {

/// Flat `key = value` configuration. Blank lines and text after '#' are
/// ignored. Later assignments override earlier ones.
class Config {
public:
    static Config parse(std::istream& is);
    static Config load(const std::string& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, const std::string& value) { values_[key] = value; }

    /// Throws UsageError naming the key when it is absent or malformed.
    std::string require(const std::string& key) const;
    double require_double(const std::string& key) const;

    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<int> get_int_list(const std::string& key, const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace wgeit
