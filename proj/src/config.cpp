#include "nudged_ns/config.hpp"

#include "nudged_ns/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <utility>

namespace nudged_ns {

namespace {

using Table = std::vector<std::pair<const char*, const char*>>;

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s) {
    std::vector<std::string_view> out;
    if (trim(s).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = s.find(',', start);
        out.push_back(trim(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(std::string_view s, const std::string& key) {
    s = trim(s);
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError("key '" + key + "': not a number: '" + std::string(s) + "'");
    return v;
}

int to_int(std::string_view s, const std::string& key) {
    s = trim(s);
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty())
        throw ConfigError("key '" + key + "': not an integer: '" + std::string(s) + "'");
    return v;
}

Table common_keys(const char* out_dir) {
    return {{"out.dir", out_dir}};
}

Table exp1_keys() {
    return {
        {"run.nu", "0.01"},
        {"run.scheme", "BDF2"},
        {"run.element", "TH"},
        {"run.t_end", "4"},
        {"obs.kind", "coarse_p0_mean"},
    };
}

Table table_for(Experiment e) {
    Table t;
    auto add = [&t](const Table& more) { t.insert(t.end(), more.begin(), more.end()); };
    switch (e) {
    case Experiment::exp1_convergence:
        add(common_keys("out/exp1_convergence"));
        add(exp1_keys());
        add({
            {"run.gamma", "1"},
            {"run.mu", "10"},
            {"exp1.ladders", "spatial,temporal,coupled"},
            {"exp1.spatial_n", "4,8,16"},
            {"exp1.spatial_dt", "0.01"},
            {"exp1.temporal_n", "32"},
            {"exp1.temporal_dt", "0.5,0.25,0.125,0.0625"},
            {"exp1.coupled_n", "4,8,16,32"},
            {"exp1.coupled_ratio", "4"},
        });
        break;
    case Experiment::exp1_mu_sweep:
        add(common_keys("out/exp1_mu_sweep"));
        add(exp1_keys());
        add({
            {"run.gamma", "0"},
            {"mesh.n", "16"},
            {"obs.coarse_n", "16"},
            {"run.dt", "0.01"},
            {"run.cadence", "1"},
            {"exp1.mu_list", "1,10,100"},
        });
        break;
    case Experiment::exp2_noflow:
        add(common_keys("out/exp2_noflow"));
        add({
            {"run.nu", "1"},
            {"run.mu", "0.1"},
            {"run.dt", "0.025"},
            {"run.t_end", "0.8"},
            {"run.scheme", "BDF2"},
            {"run.cadence", "1"},
            {"mesh.n", "16"},
            {"obs.kind", "identity"},
            {"exp2.ra", "1e5"},
            {"exp2.pr", "1"},
            {"exp2.sv", "true"},
            {"exp2.th_gammas", "0,1,10"},
        });
        break;
    case Experiment::exp3_cylinder_dns:
    case Experiment::exp3_cylinder_da:
        add(common_keys("out/exp3_cylinder"));
        add({
            {"run.nu", "0.001"},
            {"run.mu", "10"},
            {"run.dt", "0.01"},
            {"run.scheme", "BDF2"},
            {"run.element", "SV"},
            {"run.gamma", "0"},
            {"run.cadence", "1"},
            {"mesh.nx", "44"},
            {"mesh.ny", "8"},
            {"mesh.n_circ", "16"},
            {"obs.kind", "coarse_p0_mean"},
            {"bc.inflow_peak", "1.5"},
            {"exp3.spinup", "2"},
            {"exp3.window", "3"},
            {"exp3.trajectory", ""},
        });
        break;
    case Experiment::props:
        add(common_keys("out/props"));
        add({
            {"props.seed", "20240917"},
            {"props.fault", "none"},
            {"props.long_steps", "2000"},
        });
        break;
    }
    return t;
}

} // namespace

const char* to_string(Experiment e) {
    switch (e) {
    case Experiment::exp1_convergence: return "exp1_convergence";
    case Experiment::exp1_mu_sweep: return "exp1_mu_sweep";
    case Experiment::exp2_noflow: return "exp2_noflow";
    case Experiment::exp3_cylinder_dns: return "exp3_cylinder_dns";
    case Experiment::exp3_cylinder_da: return "exp3_cylinder_da";
    case Experiment::props: return "props";
    }
    return "?";
}

Experiment parse_experiment(std::string_view name) {
    for (auto e : {Experiment::exp1_convergence, Experiment::exp1_mu_sweep, Experiment::exp2_noflow,
                   Experiment::exp3_cylinder_dns, Experiment::exp3_cylinder_da, Experiment::props}) {
        if (name == to_string(e)) return e;
    }
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

Config Config::defaults(Experiment e) {
    Config c(e);
    for (const auto& [k, v] : table_for(e)) c.values_[k] = v;
    return c;
}

void Config::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown key '" + key + "' for experiment " + to_string(experiment_));
    it->second = value;
}

void Config::set(std::string_view assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos)
        throw ConfigError("expected key=value, got '" + std::string(assignment) + "'");
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + std::string(assignment) + "'");
    set(std::string(key), std::string(trim(assignment.substr(eq + 1))));
}

void Config::load_text(std::string_view text, std::string_view origin) {
    std::istringstream in{std::string(text)};
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        try {
            set(s);
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(origin) + ":" + std::to_string(no) + ": " + e.what());
        }
    }
}

void Config::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    load_text(ss.str(), path.string());
}

const std::string& Config::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw ConfigError("unknown key '" + key + "' for experiment " + to_string(experiment_));
    return it->second;
}

double Config::get_double(const std::string& key) const { return to_double(get(key), key); }

int Config::get_int(const std::string& key) const { return to_int(get(key), key); }

bool Config::get_bool(const std::string& key) const {
    const auto& v = get(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> Config::get_doubles(const std::string& key) const {
    std::vector<double> out;
    for (auto s : split(get(key))) out.push_back(to_double(s, key));
    return out;
}

std::vector<int> Config::get_ints(const std::string& key) const {
    std::vector<int> out;
    for (auto s : split(get(key))) out.push_back(to_int(s, key));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key) const {
    std::vector<std::string> out;
    for (auto s : split(get(key))) out.emplace_back(s);
    return out;
}

std::string Config::resolved() const {
    std::string out = std::string("# experiment: ") + to_string(experiment_) + "\n";
    for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
    return out;
}

void Config::write_resolved(const std::filesystem::path& path) const {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << resolved();
}

} // namespace nudged_ns
