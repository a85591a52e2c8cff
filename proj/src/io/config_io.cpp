#include "agecharge/io/config.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "agecharge/common/errors.hpp"
#include "agecharge/common/seed.hpp"

#ifndef AGECHARGE_DATA_DIR
#define AGECHARGE_DATA_DIR "data"
#endif

namespace agecharge::io {

using nlohmann::json;

namespace {

template <class S, class T>
using Field = std::pair<const char*, T S::*>;

const std::vector<Field<battery::BatteryParams, double>> kBatteryFields{
    {"R_s_pos", &battery::BatteryParams::R_s_pos},
    {"R_s_neg", &battery::BatteryParams::R_s_neg},
    {"L_pos", &battery::BatteryParams::L_pos},
    {"L_neg", &battery::BatteryParams::L_neg},
    {"L_sep", &battery::BatteryParams::L_sep},
    {"D_s_pos", &battery::BatteryParams::D_s_pos},
    {"D_s_neg", &battery::BatteryParams::D_s_neg},
    {"eps_e_pos", &battery::BatteryParams::eps_e_pos},
    {"eps_e_neg", &battery::BatteryParams::eps_e_neg},
    {"eps_e_sep", &battery::BatteryParams::eps_e_sep},
    {"eps_s_pos", &battery::BatteryParams::eps_s_pos},
    {"eps_s_neg", &battery::BatteryParams::eps_s_neg},
    {"t_c0", &battery::BatteryParams::t_c0},
    {"brugg", &battery::BatteryParams::brugg},
    {"k_pos", &battery::BatteryParams::k_pos},
    {"k_neg", &battery::BatteryParams::k_neg},
    {"alpha", &battery::BatteryParams::alpha},
    {"alpha_a", &battery::BatteryParams::alpha_a},
    {"alpha_c", &battery::BatteryParams::alpha_c},
    {"R_f_pos", &battery::BatteryParams::R_f_pos},
    {"R_f_neg", &battery::BatteryParams::R_f_neg},
    {"c_s_max_pos", &battery::BatteryParams::c_s_max_pos},
    {"c_s_max_neg", &battery::BatteryParams::c_s_max_neg},
    {"c_e0", &battery::BatteryParams::c_e0},
    {"n_li", &battery::BatteryParams::n_li},
    {"F", &battery::BatteryParams::F},
    {"R_gas", &battery::BatteryParams::R_gas},
    {"rho_jel", &battery::BatteryParams::rho_jel},
    {"rho_can", &battery::BatteryParams::rho_can},
    {"cp_jel", &battery::BatteryParams::cp_jel},
    {"cp_can", &battery::BatteryParams::cp_can},
    {"h_jel_can", &battery::BatteryParams::h_jel_can},
    {"h_can_amb", &battery::BatteryParams::h_can_amb},
    {"T_amb", &battery::BatteryParams::T_amb},
    {"T_ref", &battery::BatteryParams::T_ref},
    {"c_EC0", &battery::BatteryParams::c_EC0},
    {"D_EC", &battery::BatteryParams::D_EC},
    {"k_SEI", &battery::BatteryParams::k_SEI},
    {"k_LP", &battery::BatteryParams::k_LP},
    {"alpha_c_SEI", &battery::BatteryParams::alpha_c_SEI},
    {"alpha_a_LP", &battery::BatteryParams::alpha_a_LP},
    {"alpha_c_LP", &battery::BatteryParams::alpha_c_LP},
    {"U_SEI", &battery::BatteryParams::U_SEI},
    {"c_e_ref", &battery::BatteryParams::c_e_ref},
    {"M_SEI", &battery::BatteryParams::M_SEI},
    {"rho_SEI", &battery::BatteryParams::rho_SEI},
    {"M_Li", &battery::BatteryParams::M_Li},
    {"rho_Li", &battery::BatteryParams::rho_Li},
    {"delta_film0", &battery::BatteryParams::delta_film0},
    {"ocv_soc0", &battery::BatteryParams::ocv_soc0},
    {"ocv_soc100", &battery::BatteryParams::ocv_soc100},
};

const std::array<Field<battery::ActivationEnergies, double>, 8> kActivationFields{{
    {"D_s_pos", &battery::ActivationEnergies::D_s_pos},
    {"D_s_neg", &battery::ActivationEnergies::D_s_neg},
    {"kappa_eff", &battery::ActivationEnergies::kappa_eff},
    {"k_pos", &battery::ActivationEnergies::k_pos},
    {"k_neg", &battery::ActivationEnergies::k_neg},
    {"k_SEI", &battery::ActivationEnergies::k_SEI},
    {"D_EC", &battery::ActivationEnergies::D_EC},
    {"k_LP", &battery::ActivationEnergies::k_LP},
}};

const std::array<const char*, 7> kTableNames{"U_pos", "U_neg", "dU_dT_pos", "dU_dT_neg", "D_e", "kappa", "activity"};

double get_number(const json& obj, const std::string& key, const std::string& path) {
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(path + key, "expected a number");
    return v.get<double>();
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const std::string& path) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path.substr(0, path.size() - 1), "expected an object");
    for (const auto& [k, v] : obj.items()) {
        if (!known.count(k)) throw ConfigError(path + k, "unknown key");
    }
}

// Optional scalar helpers for sections with defaults.
template <class T>
void read_opt(const json& obj, const std::string& key, T& out, const std::string& path) {
    if (!obj.contains(key)) return;
    const auto& v = obj.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError(path + key, "expected a boolean");
        out = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() && !(v.is_number() && v.get<double>() == static_cast<double>(v.get<long long>()))) {
            throw ConfigError(path + key, "expected an integer");
        }
        const auto x = v.get<long long>();
        if (std::is_unsigned_v<T> && x < 0) throw ConfigError(path + key, "must be non-negative");
        out = static_cast<T>(x);
    } else {
        if (!v.is_number()) throw ConfigError(path + key, "expected a number");
        out = v.get<double>();
    }
}

battery::MonotoneCubic table_from_json(const json& j, const std::string& name) {
    const std::string path = "functions." + name;
    if (!j.is_object() || !j.contains("x") || !j.contains("y")) throw ConfigError(path, "table needs 'x' and 'y' arrays");
    reject_unknown(j, {"x", "y"}, path + ".");
    std::vector<double> x, y;
    try {
        x = j.at("x").get<std::vector<double>>();
        y = j.at("y").get<std::vector<double>>();
    } catch (const json::exception&) {
        throw ConfigError(path, "'x' and 'y' must be numeric arrays");
    }
    try {
        return battery::MonotoneCubic(std::move(x), std::move(y), name);
    } catch (const ConfigError& e) {
        throw ConfigError(path, e.detail());
    }
}

json table_to_json(const battery::MonotoneCubic& t) {
    return json{{"x", std::vector<double>(t.xs().begin(), t.xs().end())},
                {"y", std::vector<double>(t.ys().begin(), t.ys().end())}};
}

}  // namespace

battery::BatteryParams params_from_json(const json& j) {
    battery::BatteryParams p;
    std::set<std::string> known{"E_act", "a_pos", "a_neg"};
    for (const auto& [name, member] : kBatteryFields) {
        known.insert(name);
        if (!j.contains(name)) throw ConfigError(std::string("battery.") + name, "missing required key");
        p.*member = get_number(j, name, "battery.");
    }
    reject_unknown(j, known, "battery.");
    if (!j.contains("E_act")) throw ConfigError("battery.E_act", "missing required key");
    const auto& e = j.at("E_act");
    std::set<std::string> eknown;
    for (const auto& [name, member] : kActivationFields) {
        eknown.insert(name);
        if (!e.contains(name)) throw ConfigError(std::string("battery.E_act.") + name, "missing required key");
        p.E_act.*member = get_number(e, name, "battery.E_act.");
    }
    reject_unknown(e, eknown, "battery.E_act.");
    for (const auto& [key, derived] : {std::pair{"a_pos", p.a_pos()}, std::pair{"a_neg", p.a_neg()}}) {
        if (!j.contains(key)) continue;
        const double given = get_number(j, key, "battery.");
        if (std::abs(given - derived) > 1e-6 * std::abs(derived)) {
            throw ConfigError(std::string("battery.") + key, "inconsistent with 3 eps_s / R_s");
        }
    }
    try {
        p.validate();
    } catch (const ConfigError& err) {
        throw ConfigError("battery." + err.key(), err.detail());
    }
    return p;
}

json params_to_json(const battery::BatteryParams& p) {
    json j;
    for (const auto& [name, member] : kBatteryFields) {
        j[name] = p.*member;
    }
    json e;
    for (const auto& [name, member] : kActivationFields) e[name] = p.E_act.*member;
    j["E_act"] = e;
    return j;
}

battery::FunctionTable functions_from_json(const json& j) {
    reject_unknown(j, std::set<std::string>(kTableNames.begin(), kTableNames.end()), "functions.");
    for (const char* n : kTableNames) {
        if (!j.contains(n)) throw ConfigError(std::string("functions.") + n, "missing required table");
    }
    battery::FunctionTable f;
    f.U_pos = table_from_json(j.at("U_pos"), "U_pos");
    f.U_neg = table_from_json(j.at("U_neg"), "U_neg");
    f.dU_dT_pos = table_from_json(j.at("dU_dT_pos"), "dU_dT_pos");
    f.dU_dT_neg = table_from_json(j.at("dU_dT_neg"), "dU_dT_neg");
    f.D_e = table_from_json(j.at("D_e"), "D_e");
    f.kappa = table_from_json(j.at("kappa"), "kappa");
    f.activity = table_from_json(j.at("activity"), "activity");
    try {
        f.validate();
    } catch (const ConfigError& err) {
        throw ConfigError("functions." + err.key(), err.detail());
    }
    return f;
}

RunConfig parse_config(const json& j) {
    reject_unknown(j, {"battery", "functions", "sim", "env", "sac", "compare"}, "");
    if (!j.contains("battery")) throw ConfigError("battery", "missing required section");
    if (!j.contains("functions")) throw ConfigError("functions", "missing required section");
    RunConfig c;
    c.battery = params_from_json(j.at("battery"));
    c.functions = functions_from_json(j.at("functions"));

    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        reject_unknown(s, {"n_r", "n_x", "substep_max"}, "sim.");
        read_opt(s, "n_r", c.sim.n_r, "sim.");
        read_opt(s, "n_x", c.sim.n_x, "sim.");
        read_opt(s, "substep_max", c.sim.substep_max, "sim.");
        if (c.sim.n_r < 2) throw ConfigError("sim.n_r", "need at least 2 radial shells");
        if (c.sim.n_x < 2) throw ConfigError("sim.n_x", "need at least 2 cells per region");
        if (!(c.sim.substep_max > 0.0)) throw ConfigError("sim.substep_max", "must be positive");
    }

    if (j.contains("env")) {
        const auto& e = j.at("env");
        const std::string P = "env.";
        reject_unknown(e, {"dt", "window", "soc_given", "t_given_min", "t_given_max", "i_min_crate", "i_max_crate",
                           "V_min", "V_max", "T_min", "T_max", "omega_SEI", "omega_SAF", "ocv0", "T0",
                           "temperature_window"}, P);
        auto& v = c.env;
        read_opt(e, "dt", v.dt, P);
        read_opt(e, "window", v.window, P);
        read_opt(e, "soc_given", v.soc_given, P);
        read_opt(e, "t_given_min", v.t_given_min, P);
        read_opt(e, "t_given_max", v.t_given_max, P);
        read_opt(e, "i_min_crate", v.i_min_crate, P);
        read_opt(e, "i_max_crate", v.i_max_crate, P);
        read_opt(e, "V_min", v.V_min, P);
        read_opt(e, "V_max", v.V_max, P);
        read_opt(e, "T_min", v.T_min, P);
        read_opt(e, "T_max", v.T_max, P);
        read_opt(e, "omega_SEI", v.omega_SEI, P);
        read_opt(e, "omega_SAF", v.omega_SAF, P);
        read_opt(e, "ocv0", v.ocv0, P);
        read_opt(e, "T0", v.T0, P);
        if (e.contains("temperature_window")) {
            const auto& tw = e.at("temperature_window");
            if (tw == "jel") {
                v.temperature_window = env::TemperatureWindow::Jel;
            } else if (tw == "can") {
                v.temperature_window = env::TemperatureWindow::Can;
            } else {
                throw ConfigError("env.temperature_window", "expected \"jel\" or \"can\"");
            }
        }
        try {
            v.validate();
        } catch (const ConfigError& err) {
            throw ConfigError("env." + err.key(), err.detail());
        }
    }

    if (j.contains("sac")) {
        const auto& s = j.at("sac");
        const std::string P = "sac.";
        reject_unknown(s, {"hidden_layers", "hidden_width", "gamma", "learning_rate", "tau", "batch_size",
                           "updates_per_step", "max_updates_per_episode", "entropy_scale", "her_relabels",
                           "buffer_capacity", "warmup_transitions", "eval_every", "eval_episodes",
                           "stochastic_eval", "episodes", "checkpoint_every", "log_std_min", "log_std_max"}, P);
        auto& v = c.sac;
        read_opt(s, "hidden_layers", v.hidden_layers, P);
        read_opt(s, "hidden_width", v.hidden_width, P);
        read_opt(s, "gamma", v.gamma, P);
        read_opt(s, "learning_rate", v.learning_rate, P);
        read_opt(s, "tau", v.tau, P);
        read_opt(s, "batch_size", v.batch_size, P);
        read_opt(s, "updates_per_step", v.updates_per_step, P);
        read_opt(s, "max_updates_per_episode", v.max_updates_per_episode, P);
        read_opt(s, "entropy_scale", v.entropy_scale, P);
        read_opt(s, "her_relabels", v.her_relabels, P);
        read_opt(s, "buffer_capacity", v.buffer_capacity, P);
        read_opt(s, "warmup_transitions", v.warmup_transitions, P);
        read_opt(s, "eval_every", v.eval_every, P);
        read_opt(s, "eval_episodes", v.eval_episodes, P);
        read_opt(s, "stochastic_eval", v.stochastic_eval, P);
        read_opt(s, "episodes", v.episodes, P);
        read_opt(s, "checkpoint_every", v.checkpoint_every, P);
        read_opt(s, "log_std_min", v.log_std_min, P);
        read_opt(s, "log_std_max", v.log_std_max, P);
        try {
            v.validate();
        } catch (const ConfigError& err) {
            throw ConfigError("sac." + err.key(), err.detail());
        }
    }

    if (j.contains("compare")) {
        const auto& s = j.at("compare");
        reject_unknown(s, {"V_cv"}, "compare.");
        read_opt(s, "V_cv", c.compare.V_cv, "compare.");
        if (c.compare.V_cv > c.env.V_max) throw ConfigError("compare.V_cv", "must not exceed env.V_max");
    }
    return c;
}

json to_json(const RunConfig& c) {
    json j;
    j["battery"] = params_to_json(c.battery);
    const auto& f = c.functions;
    j["functions"] = {{"U_pos", table_to_json(f.U_pos)},         {"U_neg", table_to_json(f.U_neg)},
                      {"dU_dT_pos", table_to_json(f.dU_dT_pos)}, {"dU_dT_neg", table_to_json(f.dU_dT_neg)},
                      {"D_e", table_to_json(f.D_e)},             {"kappa", table_to_json(f.kappa)},
                      {"activity", table_to_json(f.activity)}};
    j["sim"] = {{"n_r", c.sim.n_r}, {"n_x", c.sim.n_x}, {"substep_max", c.sim.substep_max}};
    const auto& e = c.env;
    j["env"] = {{"dt", e.dt},
                {"window", e.window},
                {"soc_given", e.soc_given},
                {"t_given_min", e.t_given_min},
                {"t_given_max", e.t_given_max},
                {"i_min_crate", e.i_min_crate},
                {"i_max_crate", e.i_max_crate},
                {"V_min", e.V_min},
                {"V_max", e.V_max},
                {"T_min", e.T_min},
                {"T_max", e.T_max},
                {"omega_SEI", e.omega_SEI},
                {"omega_SAF", e.omega_SAF},
                {"ocv0", e.ocv0},
                {"T0", e.T0},
                {"temperature_window", e.temperature_window == env::TemperatureWindow::Jel ? "jel" : "can"}};
    const auto& s = c.sac;
    j["sac"] = {{"hidden_layers", s.hidden_layers},
                {"hidden_width", s.hidden_width},
                {"gamma", s.gamma},
                {"learning_rate", s.learning_rate},
                {"tau", s.tau},
                {"batch_size", s.batch_size},
                {"updates_per_step", s.updates_per_step},
                {"max_updates_per_episode", s.max_updates_per_episode},
                {"entropy_scale", s.entropy_scale},
                {"her_relabels", s.her_relabels},
                {"buffer_capacity", s.buffer_capacity},
                {"warmup_transitions", s.warmup_transitions},
                {"eval_every", s.eval_every},
                {"eval_episodes", s.eval_episodes},
                {"stochastic_eval", s.stochastic_eval},
                {"episodes", s.episodes},
                {"checkpoint_every", s.checkpoint_every},
                {"log_std_min", s.log_std_min},
                {"log_std_max", s.log_std_max}};
    j["compare"] = {{"V_cv", c.compare.V_cv}};
    return j;
}

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ConfigError("", origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": JSON syntax error");
    }
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(parse_json_text(ss.str(), path.string()));
}

std::uint64_t config_hash(const RunConfig& c) { return fnv1a64(to_json(c).dump()); }

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::filesystem::path default_config_path() {
    return std::filesystem::path(AGECHARGE_DATA_DIR) / "default_config.json";
}

}  // namespace agecharge::io
