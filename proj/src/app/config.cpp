#include "krein/app/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace krein::app {

const std::map<std::string, std::vector<std::string>>& schema() {
    static const std::map<std::string, std::vector<std::string>> s = {
        {"problem", {"type", "kappa", "omega", "L1", "L2", "hbar", "mass", "mode_cap"}},
        {"perturbation",
         {"kind", "support", "alpha", "inv_alpha_r", "mu2", "centers", "alphas", "curve", "center", "radius", "semi_a",
          "semi_b", "vertices", "closed", "order"}},
        {"solver",
         {"emin", "emax", "tol", "level", "depth", "cutoffs", "flow_mu2", "probe_level", "x", "y",
          "energy", "epsilon", "random_points", "random_alphas", "alpha_min", "alpha_max", "seed", "repulsive",
          "kmin", "kmax", "k_count", "grid_points", "band", "wavefunction", "modes", "disk_check"}},
        {"output", {"dir", "name", "profile_min", "profile_max", "profile_points", "deterministic"}},
    };
    return s;
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

void check_known(const std::string& section, const std::string& key) {
    const auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    if (std::find(it->second.begin(), it->second.end(), key) == it->second.end())
        throw ConfigError("unknown key '" + key + "' in [" + section + "]");
}

double parse_number(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(where + ": '" + t + "' is not a number");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = origin + ":" + std::to_string(lineno);
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!schema().count(section)) throw ConfigError(where + ": unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
        if (section.empty()) throw ConfigError(where + ": key outside a section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        try {
            check_known(section, key);
        } catch (const ConfigError& e) {
            throw ConfigError(where + ": " + e.what());
        }
        if (cfg.entries_[section].count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
        cfg.entries_[section][key] = value;
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path);
}

void Config::set(const std::string& dotted, const std::string& value) {
    const auto dot = dotted.find('.');
    if (dot == std::string::npos) throw ConfigError("override '" + dotted + "' must be section.key");
    set(dotted.substr(0, dot), dotted.substr(dot + 1), value);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
    check_known(section, key);
    entries_[section][key] = trim(value);
}

const std::string* Config::raw(const std::string& section, const std::string& key) const {
    const auto s = entries_.find(section);
    if (s == entries_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

bool Config::has(const std::string& section, const std::string& key) const { return raw(section, key) != nullptr; }

std::string Config::text(const std::string& section, const std::string& key, const std::string& fallback) const {
    const std::string* v = raw(section, key);
    return v ? *v : fallback;
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
    const std::string* v = raw(section, key);
    return v ? parse_number(*v, section + "." + key) : fallback;
}

std::optional<double> Config::optional_number(const std::string& section, const std::string& key) const {
    const std::string* v = raw(section, key);
    if (!v) return std::nullopt;
    return parse_number(*v, section + "." + key);
}

long Config::integer(const std::string& section, const std::string& key, long fallback) const {
    const std::string* v = raw(section, key);
    if (!v) return fallback;
    const std::string t = trim(*v);
    long out = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty())
        throw ConfigError(section + "." + key + ": '" + t + "' is not an integer");
    return out;
}

bool Config::flag(const std::string& section, const std::string& key, bool fallback) const {
    const std::string* v = raw(section, key);
    if (!v) return fallback;
    std::string t = trim(*v);
    std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
    if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
    if (t == "false" || t == "no" || t == "0" || t == "off") return false;
    throw ConfigError(section + "." + key + ": '" + t + "' is not a boolean");
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key,
                                    std::vector<double> fallback) const {
    const std::string* v = raw(section, key);
    if (!v) return fallback;
    std::vector<double> out;
    for (const std::string& item : split(*v, ',')) out.push_back(parse_number(item, section + "." + key));
    return out;
}

Point Config::point(const std::string& section, const std::string& key, Point fallback) const {
    const std::string* v = raw(section, key);
    if (!v) return fallback;
    const std::vector<std::string> parts = split(*v, ',');
    if (parts.size() == 1) return {parse_number(parts[0], section + "." + key), 0.0};
    if (parts.size() == 2)
        return {parse_number(parts[0], section + "." + key), parse_number(parts[1], section + "." + key)};
    throw ConfigError(section + "." + key + ": a point is 'x' or 'x, y'");
}

std::vector<Point> Config::points(const std::string& section, const std::string& key) const {
    const std::string* v = raw(section, key);
    if (!v) return {};
    std::vector<Point> out;
    for (const std::string& item : split(*v, ';')) {
        const std::vector<std::string> parts = split(item, ',');
        const std::string where = section + "." + key;
        if (parts.size() == 1)
            out.push_back({parse_number(parts[0], where), 0.0});
        else if (parts.size() == 2)
            out.push_back({parse_number(parts[0], where), parse_number(parts[1], where)});
        else
            throw ConfigError(where + ": points are 'x' or 'x, y', separated by ';'");
    }
    return out;
}

}  // namespace krein::app
