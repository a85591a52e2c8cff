#include "agecharge/io/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#ifndef AGECHARGE_VERSION
#define AGECHARGE_VERSION "unknown"
#endif

namespace agecharge::io {

void write_trajectory_csv(std::ostream& out, const std::vector<env::IntervalRecord>& records) {
    out << "t,I,V,SOC,T_jel,T_can,J_SEI_int,J_LP_int,delta_film,violation\n";
    out << std::setprecision(12);
    for (const auto& r : records) {
        out << r.t << ',' << r.I << ',' << r.V << ',' << r.soc << ',' << r.T_jel << ',' << r.T_can << ','
            << r.J_SEI_int << ',' << r.J_LP_int << ',' << r.delta_film << ',' << r.violation << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const std::vector<env::IntervalRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_trajectory_csv(out, records);
}

nlohmann::json trajectory_json(const std::vector<env::IntervalRecord>& records) {
    nlohmann::json j;
    auto col = [&](const char* name, auto get) {
        auto& a = j[name] = nlohmann::json::array();
        for (const auto& r : records) a.push_back(get(r));
    };
    col("t", [](const env::IntervalRecord& r) { return r.t; });
    col("I", [](const env::IntervalRecord& r) { return r.I; });
    col("V", [](const env::IntervalRecord& r) { return r.V; });
    col("SOC", [](const env::IntervalRecord& r) { return r.soc; });
    col("T_jel", [](const env::IntervalRecord& r) { return r.T_jel; });
    col("T_can", [](const env::IntervalRecord& r) { return r.T_can; });
    col("J_SEI_int", [](const env::IntervalRecord& r) { return r.J_SEI_int; });
    col("J_LP_int", [](const env::IntervalRecord& r) { return r.J_LP_int; });
    col("delta_film", [](const env::IntervalRecord& r) { return r.delta_film; });
    col("violation", [](const env::IntervalRecord& r) { return r.violation; });
    return j;
}

nlohmann::json to_json(const RunManifest& m) {
    return {{"command", m.command},   {"config_hash", m.config_hash}, {"seed", m.seed},
            {"code_version", m.code_version}, {"started", m.started}, {"finished", m.finished},
            {"outputs", m.outputs},   {"extra", m.extra}};
}

void write_manifest(const std::filesystem::path& dir, const RunManifest& m) {
    std::ofstream out(dir / "manifest.json");
    if (!out) throw std::runtime_error("cannot write manifest in " + dir.string());
    out << to_json(m).dump(1) << '\n';
}

std::string timestamp_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::ostringstream ss;
    ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return ss.str();
}

std::string code_version() { return AGECHARGE_VERSION; }

}  // namespace agecharge::io
