#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "kinklab/dynamics.hpp"

namespace kinklab::cli {

// bad flags, bad config, contract violations: exit 2
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string fmt17(double v);

// header row plus one row per index; every column must have the same length
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns);
void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

// resolved configuration, serialized as sorted key=value lines
using ConfigMap = std::map<std::string, std::string>;
std::string config_hash(const ConfigMap& cfg);

class Manifest {
public:
    Manifest(std::string command, ConfigMap config);
    void add_output(const std::string& path) { outputs_.push_back(path); }
    // writes the manifest itself; it lists its own path last
    void write(const std::string& path);

private:
    std::string command_;
    ConfigMap config_;
    std::vector<std::string> outputs_;
    std::string started_;
};

std::string tool_version();

// flat "key = value" file, '#' comments; unknown keys are usage errors
ConfigMap read_key_values(const std::string& path);
inline const std::vector<std::string>& sim_keys() {
    static const std::vector<std::string> k = {"x_max",  "h",      "dt",     "t_max", "sponge_width", "sponge_strength",
                                               "record_every", "gamma", "A", "B", "window", "linear"};
    return k;
}
// applies string values onto a SimConfig; throws UsageError on a bad value
void apply_sim_value(SimConfig& c, const std::string& key, const std::string& value);
ConfigMap describe(const SimConfig& c);

// "<stem><suffix>" where stem drops the last extension of path
std::string sibling(const std::string& path, const std::string& suffix);

}  // namespace kinklab::cli
