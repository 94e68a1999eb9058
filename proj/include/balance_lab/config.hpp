#ifndef BALANCE_LAB_CONFIG_HPP
#define BALANCE_LAB_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "balance_lab/common.hpp"

namespace balance_lab {

/// One `[name]` section of a scenario file, keys in file order.
class Section {
public:
    Section(std::string name, int line) : name_(std::move(name)), line_(line) {}

    const std::string& name() const { return name_; }
    int line() const { return line_; }

    void add(std::string key, std::string value, int line);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::optional<double> maybe_double(const std::string& key) const;
    long get_long(const std::string& key) const;
    long get_long(const std::string& key, long fallback) const;
    std::vector<double> get_list(const std::string& key) const;
    Interval get_interval(const std::string& key) const;

    /// Every key must appear in `allowed`; unknown keys are rejected.
    void restrict_keys(const std::vector<std::string>& allowed) const;

private:
    struct Entry {
        std::string key, value;
        int line;
    };
    const Entry* find(const std::string& key) const;

    std::string name_;
    int line_;
    std::vector<Entry> entries_;
};

/// Parsed scenario file: ordered sections, `#` comments, `key = value` lines.
class Config {
public:
    static Config parse_file(const std::filesystem::path& path);
    static Config parse_string(const std::string& text, const std::string& origin = "<string>");

    const std::vector<Section>& sections() const { return sections_; }
    const Section* find(const std::string& name) const;
    /// Required section lookup.
    const Section& at(const std::string& name) const;

private:
    std::vector<Section> sections_;
};

}  // namespace balance_lab

#endif
