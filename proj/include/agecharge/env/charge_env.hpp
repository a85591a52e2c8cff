#pragma once

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "agecharge/battery/model.hpp"

namespace agecharge::env {

enum class TemperatureWindow { Jel, Can };

struct EnvConfig {
    double dt = 5.0;             // control interval, s
    int window = 12;             // history length l
    double soc_given = 0.8;
    double t_given_min = 720.0;  // s
    double t_given_max = 7200.0;
    double i_min_crate = 0.0;    // current bounds as multiples of the 1C current density
    double i_max_crate = 5.0;
    double V_min = 2.8, V_max = 4.5;
    double T_min = 273.15, T_max = 318.15;
    double omega_SEI = 2.0e10;
    double omega_SAF = 1.0e2;
    double ocv0 = 3.3;
    double T0 = 298.15;
    TemperatureWindow temperature_window = TemperatureWindow::Jel;

    void validate() const;
};

enum class Termination { None, TimeUp, MaxRateBoundary, MinRateBoundary };

std::string_view to_string(Termination t);

/// Agent-visible state: goal fields, sliding windows of measurements, current SOC.
struct Observation {
    double t_remaining = 0.0;
    double soc_given = 0.0;
    std::vector<double> I_window;  // oldest first
    std::vector<double> V_window;
    std::vector<double> T_window;
    double soc_now = 0.0;
};

/// One control interval, as logged.
struct IntervalRecord {
    int k = 0;
    double t = 0.0;     // end of the interval, s
    double dt = 0.0;
    double action = 0.0;
    double I = 0.0;
    double V = 0.0;
    double soc = 0.0;
    double T_jel = 0.0;
    double T_can = 0.0;
    double J_SEI_int = 0.0;
    double J_LP_int = 0.0;
    double delta_film = 0.0;  // m, end of interval
    int violation = 0;
};

/// Constant-current segment of a charging profile.
struct Segment {
    double I = 0.0;
    double dt = 0.0;
};

/// Result of closing an episode: sums over the episode plus the completion tail.
struct TerminalOutcome {
    Termination cause = Termination::None;
    double reward = 0.0;
    double sei_sum = 0.0;           // sum of J_SEI_int, episode + tail (<= 0)
    int violations = 0;             // episode + tail
    std::vector<Segment> tail;      // constant-current completion
    std::vector<IntervalRecord> tail_records;
    double soc_final = 0.0;         // after the tail
    double t_final = 0.0;           // episode time + tail time
    bool blown_up = false;
};

struct StepInfo {
    Termination cause = Termination::None;
    int safety_violation = 0;
    double J_SEI_int = 0.0;
    double J_LP_int = 0.0;
    bool action_clipped = false;
};

struct StepResult {
    Observation obs;
    double reward = 0.0;
    bool done = false;
    StepInfo info;
    std::optional<TerminalOutcome> terminal;  // set when done
};

/// Goal-conditioned charging MDP on top of the battery model. Single-threaded; run one
/// instance per worker for parallel rollouts.
class ChargeEnv {
public:
    ChargeEnv(std::shared_ptr<const battery::BatteryModel> model, EnvConfig cfg);

    Observation reset(double t_given);
    StepResult step(double action);

    double i_min() const { return i_min_; }
    double i_max() const { return i_max_; }
    const EnvConfig& config() const { return cfg_; }
    const battery::BatteryModel& model() const { return *model_; }

    /// Affine map [0,1] -> [I_min, I_max]; out-of-range actions are clipped.
    double scale_action(double a, bool* clipped = nullptr) const;

    /// Terminal cause for a goal; priority time_up > max_rate > min_rate.
    Termination check_termination(double soc_now, double t_remaining, double soc_given) const;
    Termination check_termination(double soc_now, double t_remaining) const {
        return check_termination(soc_now, t_remaining, cfg_.soc_given);
    }

    /// 1 if the interval breaks any current, voltage, temperature or plating bound.
    int safety_indicator(const battery::StepOutput& out, double I) const;

    /// Completion tail at constant current I from `state` until soc_given is reached by
    /// coulomb counting: floor(n) full intervals plus the fractional remainder.
    std::vector<Segment> completion_tail(double soc_now, double soc_given, double I) const;

    /// Sparse terminal reward for a logged trajectory ending in `terminal_state`.
    /// Simulates the completion tail for boundary terminations. Throws NumericalError
    /// if the tail blows up.
    TerminalOutcome terminal_reward(const std::vector<IntervalRecord>& trajectory, Termination cause,
                                    const battery::BatteryState& terminal_state, double soc_now,
                                    double soc_given, double t_now) const;

    /// Network input: every field affinely scaled to roughly [-1, 1].
    std::vector<double> features(const Observation& obs) const;
    std::size_t feature_dim() const { return 3 + 3 * static_cast<std::size_t>(cfg_.window); }

    const std::vector<IntervalRecord>& log() const { return log_; }
    /// Battery state at the start of each interval, plus the current one.
    const std::vector<battery::BatteryState>& states() const { return states_; }
    const Observation& observation() const { return obs_; }
    double t_given() const { return t_given_; }
    int k() const { return k_; }
    bool active() const { return active_; }
    /// Upper bound ceil(t_given / dt) on the episode length.
    int max_steps() const;

private:
    TerminalOutcome blow_up_outcome(int remaining) const;

    std::shared_ptr<const battery::BatteryModel> model_;
    EnvConfig cfg_;
    double i_min_ = 0.0;
    double i_max_ = 0.0;

    double t_given_ = 0.0;
    int k_ = 0;
    bool active_ = false;
    battery::BatteryState state_;
    Observation obs_;
    std::vector<IntervalRecord> log_;
    std::vector<battery::BatteryState> states_;
};

/// Simulates `profile` from `start`, scoring every segment with the env's safety
/// indicator. Shared by the env tail and the baseline evaluator so both tally identically.
std::vector<IntervalRecord> simulate_segments(const ChargeEnv& env, battery::BatteryState& state,
                                              const std::vector<Segment>& profile, int k0, double t0);

}  // namespace agecharge::env
