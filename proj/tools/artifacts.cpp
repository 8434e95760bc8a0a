#include "artifacts.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#ifndef KINKLAB_VERSION
#define KINKLAB_VERSION "0.0.0"
#endif

namespace kinklab::cli {

std::string fmt17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<const std::vector<double>*>& columns) {
    if (header.size() != columns.size()) throw std::logic_error("write_csv: header/column count mismatch");
    std::size_t n = columns.empty() ? 0 : columns.front()->size();
    for (auto* c : columns)
        if (c->size() != n) throw std::logic_error("write_csv: ragged columns");
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    for (std::size_t j = 0; j < header.size(); ++j) f << (j ? "," : "") << header[j];
    f << '\n';
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j) f << (j ? "," : "") << fmt17((*columns[j])[i]);
        f << '\n';
    }
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << j.dump(2) << '\n';
    if (!f) throw std::runtime_error("write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read " + path);
    try {
        return nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string config_hash(const ConfigMap& cfg) {
    std::string s;
    for (const auto& [k, v] : cfg) s += k + "=" + v + "\n";
    return hex64(fnv1a(s));
}

namespace {

std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

Manifest::Manifest(std::string command, ConfigMap config)
    : command_(std::move(command)), config_(std::move(config)), started_(utc_now()) {}

void Manifest::write(const std::string& path) {
    nlohmann::json j;
    j["command"] = command_;
    j["config"] = config_;
    j["config_hash"] = config_hash(config_);
    j["tool_version"] = tool_version();
    auto outs = outputs_;
    outs.push_back(path);
    j["outputs"] = outs;
    j["timestamps"] = {{"started", started_}, {"finished", utc_now()}};
    write_json(path, j);
}

std::string tool_version() { return KINKLAB_VERSION; }

ConfigMap read_key_values(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config " + path);
    ConfigMap out;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (auto c = line.find('#'); c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        bool known = false;
        for (const auto& k : sim_keys()) known = known || k == key;
        if (!known) throw UsageError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

void apply_sim_value(SimConfig& c, const std::string& key, const std::string& value) {
    auto num = [&]() {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != value.size()) throw UsageError("bad value for " + key + ": '" + value + "'");
        return v;
    };
    if (key == "x_max") c.x_max = num();
    else if (key == "h") c.h = num();
    else if (key == "dt") c.dt = num();
    else if (key == "t_max") c.t_max = num();
    else if (key == "sponge_width") c.sponge_width = num();
    else if (key == "sponge_strength") c.sponge_strength = num();
    else if (key == "record_every") {
        double v = num();
        if (v != static_cast<int>(v)) throw UsageError("record_every must be an integer");
        c.record_every = static_cast<int>(v);
    } else if (key == "gamma") c.gamma = num();
    else if (key == "A") c.A = num();
    else if (key == "B") c.B = num();
    else if (key == "window") c.window = num();
    else if (key == "linear") {
        if (value == "true" || value == "1") c.linear = true;
        else if (value == "false" || value == "0") c.linear = false;
        else throw UsageError("linear must be true or false");
    } else throw UsageError("unknown key '" + key + "'");
}

ConfigMap describe(const SimConfig& c) {
    return {{"x_max", fmt17(c.x_max)},
            {"h", fmt17(c.h)},
            {"dt", fmt17(c.dt)},
            {"t_max", fmt17(c.t_max)},
            {"sponge_width", fmt17(c.sponge_width)},
            {"sponge_strength", fmt17(c.sponge_strength)},
            {"record_every", std::to_string(c.record_every)},
            {"gamma", fmt17(c.gamma)},
            {"A", fmt17(c.A)},
            {"B", fmt17(c.B)},
            {"window", fmt17(c.window)},
            {"linear", c.linear ? "true" : "false"}};
}

std::string sibling(const std::string& path, const std::string& suffix) {
    auto slash = path.find_last_of('/');
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + suffix;
    return path.substr(0, dot) + suffix;
}

}  // namespace kinklab::cli
