#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nudged_ns {

enum class Experiment {
    exp1_convergence,
    exp1_mu_sweep,
    exp2_noflow,
    exp3_cylinder_dns,
    exp3_cylinder_da,
    props,
};

const char* to_string(Experiment e);
/// Throws ConfigError on an unknown name.
Experiment parse_experiment(std::string_view name);

/// Flat key=value configuration with dotted keys.
///
/// Every experiment owns a table of known keys and their defaults. Loading a
/// file or applying an override with a key outside that table is an error,
/// so typos never pass silently. Typed getters throw ConfigError when a value
/// does not parse.
class Config {
public:
    static Config defaults(Experiment e);

    Experiment experiment() const { return experiment_; }

    /// Lines of `key = value`; `#` starts a comment; blank lines are skipped.
    void load_text(std::string_view text, std::string_view origin = "<text>");
    void load_file(const std::filesystem::path& path);
    /// Apply one `key=value` override.
    void set(std::string_view assignment);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    const std::string& get(const std::string& key) const;
    double get_double(const std::string& key) const;
    int get_int(const std::string& key) const;
    bool get_bool(const std::string& key) const;
    /// Comma-separated list; an empty value gives an empty list.
    std::vector<double> get_doubles(const std::string& key) const;
    std::vector<int> get_ints(const std::string& key) const;
    std::vector<std::string> get_strings(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return values_; }

    /// `key = value` lines in key order.
    std::string resolved() const;
    void write_resolved(const std::filesystem::path& path) const;

private:
    explicit Config(Experiment e) : experiment_(e) {}
    Experiment experiment_;
    std::map<std::string, std::string> values_;
};

} // namespace nudged_ns
