#include "wgeit/config.hpp"

#include <fstream>
#include <sstream>

#include "wgeit/error.hpp"

namespace wgeit {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T convert(const std::string& key, const std::string& text)
{
    std::istringstream is(text);
    T value{};
    is >> value;
    if (!is || !(is >> std::ws).eof())
        throw UsageError("config key '" + key + "': cannot parse '" + text + "'");
    return value;
}

} // namespace

Config Config::parse(std::istream& is)
{
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        if (key.empty())
            throw UsageError("config line " + std::to_string(lineno) + ": empty key");
        cfg.values_[key] = trim(line.substr(eq + 1));
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw UsageError("cannot open config file '" + path + "'");
    return parse(in);
}

std::string Config::require(const std::string& key) const
{
    auto it = values_.find(key);
    if (it == values_.end() || it->second.empty())
        throw UsageError("missing required config key '" + key + "'");
    return it->second;
}

double Config::require_double(const std::string& key) const { return convert<double>(key, require(key)); }

std::string Config::get(const std::string& key, const std::string& fallback) const
{
    auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const
{
    return has(key) ? convert<double>(key, values_.at(key)) : fallback;
}

long long Config::get_int(const std::string& key, long long fallback) const
{
    return has(key) ? convert<long long>(key, values_.at(key)) : fallback;
}

bool Config::get_bool(const std::string& key, bool fallback) const
{
    if (!has(key))
        return fallback;
    const std::string& v = values_.at(key);
    if (v == "true" || v == "1" || v == "yes")
        return true;
    if (v == "false" || v == "0" || v == "no")
        return false;
    throw UsageError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<int> Config::get_int_list(const std::string& key, const std::vector<int>& fallback) const
{
    if (!has(key))
        return fallback;
    std::vector<int> out;
    std::stringstream ss(values_.at(key));
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(convert<int>(key, trim(item)));
    if (out.empty())
        throw UsageError("config key '" + key + "': empty list");
    return out;
}

} // namespace wgeit
