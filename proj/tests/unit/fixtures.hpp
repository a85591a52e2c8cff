#pragma once

#include <memory>

#include "agecharge/battery/model.hpp"
#include "agecharge/env/charge_env.hpp"
#include "agecharge/io/config.hpp"

namespace fixtures {

inline const agecharge::io::RunConfig& default_config() {
    static const auto cfg = agecharge::io::load_config(agecharge::io::default_config_path());
    return cfg;
}

inline agecharge::io::RunConfig small_config(int n = 8) {
    auto cfg = default_config();
    cfg.sim.n_r = n;
    cfg.sim.n_x = n;
    return cfg;
}

inline agecharge::io::RunConfig no_aging(agecharge::io::RunConfig cfg) {
    cfg.battery.k_SEI = 0.0;
    cfg.battery.k_LP = 0.0;
    return cfg;
}

inline std::shared_ptr<const agecharge::battery::BatteryModel> make_model(const agecharge::io::RunConfig& cfg) {
    return std::make_shared<const agecharge::battery::BatteryModel>(cfg.battery, cfg.functions, cfg.sim);
}

}  // namespace fixtures
