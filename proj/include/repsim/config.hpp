#pragma once

#include "repsim/protocol.hpp"

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

// Experiment configuration: a flat key = value text format with strict
// parsing (unknown or repeated keys are errors, every message carries a line
// number) and a canonical serializer such that parse(serialize(c)) == c.
namespace repsim {

namespace detail {

// Shortest round-trip decimal representation hosts 17 significant digits.
inline std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

class ConfigError : public std::runtime_error {
  public:
    ConfigError(int line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

    int line() const { return line_; }

  private:
    int line_;
};

// One experiment: a physical setup plus the sweep ranges. Defaults are the
// standard fiber/memory working point (20 km links at 20 km attenuation
// length, eta_h = 0.1, kappa = 1/s, tau = 1 ms, 100000 trials, buffers 1-30).
struct RunConfig {
    StateFamily family = StateFamily::Werner;
    double L0_km = 20.0;
    double L_att_km = 20.0;
    double eta_h = 0.1;
    double F0 = 1.0;
    double p_swap = 0.5;
    double p_gate = 1.0;
    double eta_meas = 1.0;
    double kappa_per_s = 1.0;
    double tau_s = 1e-3;
    std::vector<int> M_list = {1};
    int N_buffer_min = 1;
    int N_buffer_max = 30;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 0;
    int bins = 200;

    bool operator==(const RunConfig&) const = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t first = 0;
    std::size_t last = s.size();
    while (first < last && std::isspace(static_cast<unsigned char>(s[first]))) ++first;
    while (last > first && std::isspace(static_cast<unsigned char>(s[last - 1]))) --last;
    return s.substr(first, last - first);
}

inline double parse_double(const std::string& text, int line, const std::string& key) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(line, "value of '" + key + "' is not a number: '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(line, "trailing characters after number in '" + key + "'");
    return v;
}

inline std::uint64_t parse_u64(const std::string& text, int line, const std::string& key) {
    if (text.empty() || text[0] == '-')
        throw ConfigError(line, "value of '" + key + "' must be a nonnegative integer");
    std::size_t used = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(text, &used);
    } catch (const std::exception&) {
        throw ConfigError(line, "value of '" + key + "' is not an integer: '" + text + "'");
    }
    if (used != text.size())
        throw ConfigError(line, "trailing characters after integer in '" + key + "'");
    return v;
}

inline int parse_int(const std::string& text, int line, const std::string& key, int min_value) {
    const std::uint64_t v = parse_u64(text, line, key);
    if (v < static_cast<std::uint64_t>(min_value) || v > 1000000000u)
        throw ConfigError(line, "'" + key + "' must be an integer >= " +
                                    std::to_string(min_value));
    return static_cast<int>(v);
}

inline double parse_range(const std::string& text, int line, const std::string& key, double lo,
                          double hi) {
    const double v = parse_double(text, line, key);
    if (!(v >= lo && v <= hi))
        throw ConfigError(line, "'" + key + "' must be in [" + format_g17(lo) + ", " +
                                    format_g17(hi) + "]");
    return v;
}

inline double parse_positive(const std::string& text, int line, const std::string& key) {
    const double v = parse_double(text, line, key);
    if (!(v > 0.0)) throw ConfigError(line, "'" + key + "' must be > 0");
    return v;
}

inline std::vector<int> parse_int_list(const std::string& text, int line,
                                       const std::string& key) {
    std::vector<int> out;
    std::string item;
    std::istringstream stream(text);
    while (std::getline(stream, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(line, "empty entry in '" + key + "'");
        out.push_back(parse_int(item, line, key, 1));
    }
    if (out.empty()) throw ConfigError(line, "'" + key + "' must list at least one value");
    return out;
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::unordered_set<std::string> seen;
    int family_line = 0;
    int noise_line = 0;
    int n_min_line = 0;
    int n_max_line = 0;
    std::istringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const std::size_t comment = raw.find('#');
        if (comment != std::string::npos) raw.erase(comment);
        const std::string entry = detail::trim(raw);
        if (entry.empty()) continue;
        if (entry.front() == '[') {
            if (entry.back() != ']') throw ConfigError(line, "unterminated section header");
            continue; // sections are purely cosmetic grouping
        }
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError(line, "expected 'key = value', got '" + entry + "'");
        const std::string key = detail::trim(entry.substr(0, eq));
        const std::string value = detail::trim(entry.substr(eq + 1));
        if (key.empty()) throw ConfigError(line, "missing key before '='");
        if (value.empty()) throw ConfigError(line, "missing value for '" + key + "'");
        if (!seen.insert(key).second) throw ConfigError(line, "duplicate key '" + key + "'");
        if (key == "family") {
            family_line = line;
            if (value == "dephased") {
                cfg.family = StateFamily::Dephased;
            } else if (value == "werner") {
                cfg.family = StateFamily::Werner;
            } else {
                throw ConfigError(line, "family must be 'dephased' or 'werner'");
            }
        } else if (key == "L0_km") {
            cfg.L0_km = detail::parse_positive(value, line, key);
        } else if (key == "L_att_km") {
            cfg.L_att_km = detail::parse_positive(value, line, key);
        } else if (key == "eta_h") {
            cfg.eta_h = detail::parse_range(value, line, key, 0.0, 1.0);
        } else if (key == "F0") {
            cfg.F0 = detail::parse_range(value, line, key, 0.0, 1.0);
        } else if (key == "p_swap") {
            cfg.p_swap = detail::parse_range(value, line, key, 0.0, 1.0);
        } else if (key == "p_gate") {
            noise_line = std::max(noise_line, line);
            cfg.p_gate = detail::parse_range(value, line, key, 0.0, 1.0);
        } else if (key == "eta_meas") {
            noise_line = std::max(noise_line, line);
            cfg.eta_meas = detail::parse_range(value, line, key, 0.0, 1.0);
        } else if (key == "kappa_per_s") {
            cfg.kappa_per_s = detail::parse_range(value, line, key, 0.0, 1e30);
        } else if (key == "tau_s") {
            cfg.tau_s = detail::parse_positive(value, line, key);
        } else if (key == "M_list") {
            cfg.M_list = detail::parse_int_list(value, line, key);
        } else if (key == "N_buffer_min") {
            n_min_line = line;
            cfg.N_buffer_min = detail::parse_int(value, line, key, 1);
        } else if (key == "N_buffer_max") {
            n_max_line = line;
            cfg.N_buffer_max = detail::parse_int(value, line, key, 1);
        } else if (key == "trials") {
            cfg.trials = detail::parse_u64(value, line, key);
            if (cfg.trials < 1) throw ConfigError(line, "'trials' must be >= 1");
        } else if (key == "seed") {
            cfg.seed = detail::parse_u64(value, line, key);
        } else if (key == "bins") {
            cfg.bins = detail::parse_int(value, line, key, 1);
        } else {
            throw ConfigError(line, "unknown key '" + key + "'");
        }
    }
    if (cfg.N_buffer_min > cfg.N_buffer_max)
        throw ConfigError(std::max(n_min_line, n_max_line),
                          "N_buffer_min must not exceed N_buffer_max");
    if (cfg.family == StateFamily::Dephased && (cfg.p_gate != 1.0 || cfg.eta_meas != 1.0))
        throw ConfigError(std::max(family_line, noise_line),
                          "dephased family requires perfect operations (p_gate = eta_meas = 1)");
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

// Canonical text form; parse_config is its exact inverse.
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream out;
    out << "family = " << family_name(cfg.family) << "\n";
    out << "L0_km = " << detail::format_g17(cfg.L0_km) << "\n";
    out << "L_att_km = " << detail::format_g17(cfg.L_att_km) << "\n";
    out << "eta_h = " << detail::format_g17(cfg.eta_h) << "\n";
    out << "F0 = " << detail::format_g17(cfg.F0) << "\n";
    out << "p_swap = " << detail::format_g17(cfg.p_swap) << "\n";
    out << "p_gate = " << detail::format_g17(cfg.p_gate) << "\n";
    out << "eta_meas = " << detail::format_g17(cfg.eta_meas) << "\n";
    out << "kappa_per_s = " << detail::format_g17(cfg.kappa_per_s) << "\n";
    out << "tau_s = " << detail::format_g17(cfg.tau_s) << "\n";
    out << "M_list = ";
    for (std::size_t i = 0; i < cfg.M_list.size(); ++i) {
        if (i) out << ",";
        out << cfg.M_list[i];
    }
    out << "\n";
    out << "N_buffer_min = " << cfg.N_buffer_min << "\n";
    out << "N_buffer_max = " << cfg.N_buffer_max << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "bins = " << cfg.bins << "\n";
    return out.str();
}

// The simulation config for one (M, N_buffer) cell of a sweep.
inline SimConfig sim_config_for(const RunConfig& cfg, int M, int N_buffer) {
    SimConfig sim;
    sim.family = cfg.family;
    sim.gen = {cfg.L0_km, cfg.L_att_km, cfg.eta_h, cfg.F0, cfg.p_swap};
    sim.noise = {cfg.p_gate, cfg.eta_meas};
    sim.quality = quality_factor(cfg.kappa_per_s, cfg.tau_s);
    sim.M = M;
    sim.N_buffer = N_buffer;
    sim.trials = cfg.trials;
    sim.seed = cfg.seed;
    return sim;
}

} // namespace repsim
