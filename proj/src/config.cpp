#include "balance_lab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace balance_lab {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": '" + v + "' is not a number");
    }
}

}  // namespace

void Section::add(std::string key, std::string value, int line) {
    for (const Entry& e : entries_)
        if (e.key == key)
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key +
                              "' in [" + name_ + "]");
    entries_.push_back({std::move(key), std::move(value), line});
}

const Section::Entry* Section::find(const std::string& key) const {
    for (const Entry& e : entries_)
        if (e.key == key) return &e;
    return nullptr;
}

bool Section::has(const std::string& key) const { return find(key) != nullptr; }

std::string Section::get_string(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) throw ConfigError("[" + name_ + "] is missing key '" + key + "'");
    return e->value;
}

std::string Section::get_string(const std::string& key, const std::string& fallback) const {
    const Entry* e = find(key);
    return e ? e->value : fallback;
}

double Section::get_double(const std::string& key) const {
    return parse_double(get_string(key), "[" + name_ + "] " + key);
}

double Section::get_double(const std::string& key, double fallback) const {
    const Entry* e = find(key);
    return e ? parse_double(e->value, "[" + name_ + "] " + key) : fallback;
}

std::optional<double> Section::maybe_double(const std::string& key) const {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return parse_double(e->value, "[" + name_ + "] " + key);
}

long Section::get_long(const std::string& key) const {
    const double d = get_double(key);
    const long v = static_cast<long>(d);
    if (static_cast<double>(v) != d)
        throw ConfigError("[" + name_ + "] " + key + ": expected an integer");
    return v;
}

long Section::get_long(const std::string& key, long fallback) const {
    return has(key) ? get_long(key) : fallback;
}

std::vector<double> Section::get_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    std::string item;
    std::stringstream ss(raw);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty())
            throw ConfigError("[" + name_ + "] " + key + ": empty list item");
        out.push_back(parse_double(item, "[" + name_ + "] " + key));
    }
    if (out.empty()) throw ConfigError("[" + name_ + "] " + key + ": empty list");
    return out;
}

Interval Section::get_interval(const std::string& key) const {
    const auto vals = get_list(key);
    if (vals.size() != 2)
        throw ConfigError("[" + name_ + "] " + key + ": expected 'lo, hi'");
    Interval iv{vals[0], vals[1]};
    if (!iv.valid()) throw ConfigError("[" + name_ + "] " + key + ": needs lo < hi");
    return iv;
}

void Section::restrict_keys(const std::vector<std::string>& allowed) const {
    for (const Entry& e : entries_) {
        if (std::find(allowed.begin(), allowed.end(), e.key) == allowed.end())
            throw ConfigError("line " + std::to_string(e.line) + ": unknown key '" + e.key +
                              "' in [" + name_ + "]");
    }
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    Section* current = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section");
            const std::string name = trim(s.substr(1, s.size() - 2));
            if (name.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
            for (const Section& sec : cfg.sections_)
                if (sec.name() == name)
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": duplicate section [" + name + "]");
            cfg.sections_.emplace_back(name, lineno);
            current = &cfg.sections_.back();
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
        if (!current)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": key outside any section");
        const std::string key = trim(s.substr(0, eq));
        const std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
        current->add(key, value, lineno);
    }
    return cfg;
}

Config Config::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

const Section* Config::find(const std::string& name) const {
    for (const Section& s : sections_)
        if (s.name() == name) return &s;
    return nullptr;
}

const Section& Config::at(const std::string& name) const {
    const Section* s = find(name);
    if (!s) throw ConfigError("missing required section [" + name + "]");
    return *s;
}

}  // namespace balance_lab
