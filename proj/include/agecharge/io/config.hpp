#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "agecharge/battery/model.hpp"
#include "agecharge/env/charge_env.hpp"
#include "agecharge/sac/config.hpp"

namespace agecharge::io {

struct CompareConfig {
    double V_cv = 4.5;
};

/// Everything a run needs, parsed from one JSON document with sections
/// "battery", "functions", "sim", "env", "sac", "compare".
struct RunConfig {
    battery::BatteryParams battery;
    battery::FunctionTable functions;
    battery::SimOptions sim;
    env::EnvConfig env;
    sac::SacConfig sac;
    CompareConfig compare;
};

/// Reads and validates a config file. Throws ConfigError naming the offending key; JSON
/// syntax errors report line and column.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json parse_json_text(const std::string& text, const std::string& origin);

nlohmann::json to_json(const RunConfig& c);
battery::BatteryParams params_from_json(const nlohmann::json& j);
nlohmann::json params_to_json(const battery::BatteryParams& p);
battery::FunctionTable functions_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical (sorted-key) serialisation.
std::uint64_t config_hash(const RunConfig& c);
std::string hex64(std::uint64_t v);

/// Default config shipped in data/ (path baked in at build time).
std::filesystem::path default_config_path();

}  // namespace agecharge::io
