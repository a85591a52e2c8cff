#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "agecharge/env/charge_env.hpp"

namespace agecharge::io {

/// Columns: t, I, V, SOC, T_jel, T_can, J_SEI_int, J_LP_int, delta_film, violation.
void write_trajectory_csv(std::ostream& out, const std::vector<env::IntervalRecord>& records);
void write_trajectory_csv(const std::filesystem::path& path, const std::vector<env::IntervalRecord>& records);

/// Column-oriented JSON object with the same fields as the CSV.
nlohmann::json trajectory_json(const std::vector<env::IntervalRecord>& records);

/// Provenance of one command invocation's output directory.
struct RunManifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string code_version;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;  // relative to the run directory
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(const RunManifest& m);
void write_manifest(const std::filesystem::path& dir, const RunManifest& m);
/// UTC, ISO 8601.
std::string timestamp_now();
std::string code_version();

}  // namespace agecharge::io
