#pragma once

#include <string>
#include <vector>

#include "agecharge/env/charge_env.hpp"

namespace agecharge::baselines {

/// Piecewise-constant current on consecutive intervals, starting at t = 0.
using CurrentProfile = std::vector<env::Segment>;

struct ProfileMetrics {
    double t_given = 0.0;
    double terminal_soc = 0.0;
    double sei_total = 0.0;  // -sum J_SEI_int, >= 0
    int violations = 0;
    double peak_T = 0.0;     // max T_jel over interval ends
    double peak_V = 0.0;
    double duration = 0.0;   // sum of segment lengths
    std::vector<env::IntervalRecord> trajectory;
};

/// Coulomb-counted constant current I = I_1C * 3600 * (soc_given - soc0) / t_given over
/// [0, t_given] on the env's control grid. Throws InfeasibleError outside [I_min, I_max].
CurrentProfile cc_controller(const env::ChargeEnv& env, double t_given, double soc_given, double soc0);

struct CcCvResult {
    CurrentProfile profile;
    double I_cc = 0.0;
    int cv_start = -1;  // first CV interval, -1 if the CV phase never starts
    int bisection_iterations = 0;
};

/// CC phase at a bisected rate, then per-interval currents holding the end-of-interval
/// voltage at V_cv (to 1 mV, clipped to [I_min, I_max]) until t_given. The CC rate is chosen
/// so the SOC at t_given matches soc_given to within one interval's coulomb count.
/// Throws InfeasibleError if I_max cannot reach soc_given, ConfigError if V_cv > V_max.
CcCvResult cccv_controller(const env::ChargeEnv& env, double t_given, double soc_given, double V_cv);

/// Simulates the profile from the env's reset state and scores every interval with the
/// env's safety indicator. Throws std::invalid_argument if the profile runs past
/// t_given + dt; NumericalError propagates.
ProfileMetrics evaluate_profile(const env::ChargeEnv& env, const CurrentProfile& profile, double t_given);

/// Segments actually applied in a logged trajectory.
CurrentProfile profile_from_records(const std::vector<env::IntervalRecord>& records);

/// SOC at the env's reset state.
double initial_soc(const env::ChargeEnv& env);

}  // namespace agecharge::baselines
