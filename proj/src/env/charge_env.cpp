#include "agecharge/env/charge_env.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "agecharge/common/errors.hpp"

namespace agecharge::env {

namespace {
constexpr double kTimeEps = 1e-9;
constexpr double kSocEps = 1e-12;
constexpr double kPlatingTol = 1e-12;  // mol/m^2
}  // namespace

std::string_view to_string(Termination t) {
    switch (t) {
        case Termination::None: return "none";
        case Termination::TimeUp: return "time_up";
        case Termination::MaxRateBoundary: return "max_rate_boundary";
        case Termination::MinRateBoundary: return "min_rate_boundary";
    }
    return "none";
}

void EnvConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("dt", "must be positive");
    if (window < 1) throw ConfigError("window", "must be at least 1");
    if (!(soc_given > 0.0 && soc_given <= 1.0)) throw ConfigError("soc_given", "must lie in (0, 1]");
    if (!(t_given_min > 0.0 && t_given_min <= t_given_max)) {
        throw ConfigError("t_given_min", "t_given range must be positive and ordered");
    }
    if (!(i_min_crate >= 0.0 && i_min_crate < i_max_crate)) throw ConfigError("i_max_crate", "need 0 <= I_min < I_max");
    if (!(V_min < V_max)) throw ConfigError("V_max", "need V_min < V_max");
    if (!(T_min < T_max)) throw ConfigError("T_max", "need T_min < T_max");
    if (!(omega_SEI >= 0.0)) throw ConfigError("omega_SEI", "must be non-negative");
    if (!(omega_SAF >= 0.0)) throw ConfigError("omega_SAF", "must be non-negative");
    if (!(T0 > 0.0)) throw ConfigError("T0", "must be positive");
}

ChargeEnv::ChargeEnv(std::shared_ptr<const battery::BatteryModel> model, EnvConfig cfg)
    : model_(std::move(model)), cfg_(cfg) {
    cfg_.validate();
    i_min_ = cfg_.i_min_crate * model_->i_1c();
    i_max_ = cfg_.i_max_crate * model_->i_1c();
}

int ChargeEnv::max_steps() const {
    return static_cast<int>(std::ceil(t_given_ / cfg_.dt - kTimeEps));
}

Observation ChargeEnv::reset(double t_given) {
    if (!(t_given >= cfg_.t_given_min - kTimeEps && t_given <= cfg_.t_given_max + kTimeEps)) {
        throw ConfigError("t_given", "t_given " + std::to_string(t_given) + " s outside the configured range");
    }
    t_given_ = t_given;
    k_ = 0;
    active_ = true;
    state_ = model_->init_equilibrium(cfg_.ocv0, cfg_.T0);
    log_.clear();
    states_.clear();
    states_.push_back(state_);

    const auto l = static_cast<std::size_t>(cfg_.window);
    const double I0 = i_min_;
    const double V0 = model_->voltage(state_, I0);
    const double T0 = cfg_.temperature_window == TemperatureWindow::Jel ? state_.T_jel : state_.T_can;
    obs_.t_remaining = t_given;
    obs_.soc_given = cfg_.soc_given;
    obs_.I_window.assign(l, I0);
    obs_.V_window.assign(l, V0);
    obs_.T_window.assign(l, T0);
    obs_.soc_now = model_->soc(state_);
    return obs_;
}

double ChargeEnv::scale_action(double a, bool* clipped) const {
    double c = std::clamp(std::isnan(a) ? 0.0 : a, 0.0, 1.0);
    if (clipped) *clipped = c != a;
    return i_min_ + c * (i_max_ - i_min_);
}

Termination ChargeEnv::check_termination(double soc_now, double t_remaining, double soc_given) const {
    if (t_remaining <= kTimeEps) return Termination::TimeUp;
    const double required = soc_given - soc_now;
    const double hours = t_remaining / 3600.0;
    if ((i_max_ / model_->i_1c()) * hours <= required + kSocEps) return Termination::MaxRateBoundary;
    if ((i_min_ / model_->i_1c()) * hours >= required - kSocEps) return Termination::MinRateBoundary;
    return Termination::None;
}

int ChargeEnv::safety_indicator(const battery::StepOutput& out, double I) const {
    if (I < i_min_ || I > i_max_) return 1;
    if (out.V < cfg_.V_min || out.V > cfg_.V_max) return 1;
    if (out.T_jel < cfg_.T_min || out.T_jel > cfg_.T_max) return 1;
    if (out.J_LP_int < -kPlatingTol) return 1;
    return 0;
}

std::vector<Segment> ChargeEnv::completion_tail(double soc_now, double soc_given, double I) const {
    std::vector<Segment> tail;
    const double required = soc_given - soc_now;
    if (!(required > 0.0) || !(I > 0.0)) return tail;
    const double seconds = 3600.0 * required * model_->i_1c() / I;
    const double n = std::floor(seconds / cfg_.dt);
    for (int j = 0; j < static_cast<int>(n); ++j) tail.push_back({I, cfg_.dt});
    const double rest = seconds - n * cfg_.dt;
    if (rest > kTimeEps) tail.push_back({I, rest});
    return tail;
}

std::vector<IntervalRecord> simulate_segments(const ChargeEnv& env, battery::BatteryState& state,
                                              const std::vector<Segment>& profile, int k0, double t0) {
    std::vector<IntervalRecord> out;
    out.reserve(profile.size());
    const double span = env.i_max() - env.i_min();
    double t = t0;
    int k = k0;
    for (const auto& seg : profile) {
        auto [next, so] = env.model().step(state, seg.I, seg.dt);
        state = std::move(next);
        t += seg.dt;
        IntervalRecord r;
        r.k = k++;
        r.t = t;
        r.dt = seg.dt;
        r.action = span > 0.0 ? (seg.I - env.i_min()) / span : 0.0;
        r.I = seg.I;
        r.V = so.V;
        r.soc = so.soc;
        r.T_jel = so.T_jel;
        r.T_can = so.T_can;
        r.J_SEI_int = so.J_SEI_int;
        r.J_LP_int = so.J_LP_int;
        r.delta_film = state.delta_film;
        r.violation = env.safety_indicator(so, seg.I);
        out.push_back(r);
    }
    return out;
}

TerminalOutcome ChargeEnv::terminal_reward(const std::vector<IntervalRecord>& trajectory, Termination cause,
                                           const battery::BatteryState& terminal_state, double soc_now,
                                           double soc_given, double t_now) const {
    if (cause == Termination::None) throw std::invalid_argument("terminal_reward needs a terminal cause");
    TerminalOutcome o;
    o.cause = cause;
    for (const auto& r : trajectory) {
        o.sei_sum += r.J_SEI_int;
        o.violations += r.violation;
    }
    o.soc_final = soc_now;
    o.t_final = t_now;
    if (cause == Termination::MaxRateBoundary) o.tail = completion_tail(soc_now, soc_given, i_max_);
    if (cause == Termination::MinRateBoundary) o.tail = completion_tail(soc_now, soc_given, i_min_);
    if (!o.tail.empty()) {
        battery::BatteryState s = terminal_state;
        const int k0 = trajectory.empty() ? 0 : trajectory.back().k + 1;
        o.tail_records = simulate_segments(*this, s, o.tail, k0, t_now);
        for (const auto& r : o.tail_records) {
            o.sei_sum += r.J_SEI_int;
            o.violations += r.violation;
        }
        o.soc_final = o.tail_records.back().soc;
        o.t_final = o.tail_records.back().t;
    }
    o.reward = cfg_.omega_SEI * o.sei_sum - cfg_.omega_SAF * static_cast<double>(o.violations);
    return o;
}

TerminalOutcome ChargeEnv::blow_up_outcome(int remaining) const {
    TerminalOutcome o;
    o.cause = Termination::TimeUp;
    o.blown_up = true;
    for (const auto& r : log_) {
        o.sei_sum += r.J_SEI_int;
        o.violations += r.violation;
    }
    o.violations += std::max(remaining, 1);
    o.soc_final = log_.empty() ? obs_.soc_now : log_.back().soc;
    o.t_final = static_cast<double>(k_) * cfg_.dt;
    o.reward = cfg_.omega_SEI * o.sei_sum - cfg_.omega_SAF * static_cast<double>(o.violations);
    return o;
}

StepResult ChargeEnv::step(double action) {
    if (!active_) throw std::logic_error("ChargeEnv::step called without an active episode");
    StepResult res;
    const double I = scale_action(action, &res.info.action_clipped);

    battery::StepOutput so;
    try {
        auto [next, out] = model_->step(state_, I, cfg_.dt);
        state_ = std::move(next);
        so = out;
    } catch (const NumericalError&) {
        // the failing interval and everything left of the budget count as violations
        res.done = true;
        res.info.cause = Termination::TimeUp;
        res.info.safety_violation = 1;
        res.terminal = blow_up_outcome(max_steps() - k_);
        res.reward = res.terminal->reward;
        res.obs = obs_;
        active_ = false;
        return res;
    }

    IntervalRecord r;
    r.k = k_;
    r.t = static_cast<double>(k_ + 1) * cfg_.dt;
    r.dt = cfg_.dt;
    r.action = std::clamp(std::isnan(action) ? 0.0 : action, 0.0, 1.0);
    r.I = I;
    r.V = so.V;
    r.soc = so.soc;
    r.T_jel = so.T_jel;
    r.T_can = so.T_can;
    r.J_SEI_int = so.J_SEI_int;
    r.J_LP_int = so.J_LP_int;
    r.delta_film = state_.delta_film;
    r.violation = safety_indicator(so, I);
    log_.push_back(r);
    states_.push_back(state_);
    ++k_;

    obs_.t_remaining = t_given_ - static_cast<double>(k_) * cfg_.dt;
    auto push = [](std::vector<double>& w, double v) {
        std::rotate(w.begin(), w.begin() + 1, w.end());
        w.back() = v;
    };
    push(obs_.I_window, I);
    push(obs_.V_window, so.V);
    push(obs_.T_window, cfg_.temperature_window == TemperatureWindow::Jel ? so.T_jel : so.T_can);
    obs_.soc_now = so.soc;

    res.obs = obs_;
    res.info.safety_violation = r.violation;
    res.info.J_SEI_int = so.J_SEI_int;
    res.info.J_LP_int = so.J_LP_int;
    res.info.cause = check_termination(obs_.soc_now, obs_.t_remaining);
    if (res.info.cause != Termination::None) {
        res.done = true;
        active_ = false;
        try {
            res.terminal = terminal_reward(log_, res.info.cause, state_, obs_.soc_now, cfg_.soc_given,
                                           static_cast<double>(k_) * cfg_.dt);
        } catch (const NumericalError&) {
            const auto tail = completion_tail(obs_.soc_now, cfg_.soc_given,
                                              res.info.cause == Termination::MaxRateBoundary ? i_max_ : i_min_);
            res.terminal = blow_up_outcome(static_cast<int>(tail.size()));
            res.terminal->cause = res.info.cause;
        }
        res.reward = res.terminal->reward;
    }
    return res;
}

std::vector<double> ChargeEnv::features(const Observation& obs) const {
    std::vector<double> x;
    x.reserve(feature_dim());
    auto affine = [](double v, double lo, double hi) { return 2.0 * (v - lo) / (hi - lo) - 1.0; };
    x.push_back(affine(obs.t_remaining, 0.0, cfg_.t_given_max));
    x.push_back(affine(obs.soc_given, 0.0, 1.0));
    for (double v : obs.I_window) x.push_back(affine(v, i_min_, i_max_));
    for (double v : obs.V_window) x.push_back(affine(v, cfg_.V_min, cfg_.V_max));
    for (double v : obs.T_window) x.push_back(affine(v, cfg_.T_min, cfg_.T_max));
    x.push_back(affine(obs.soc_now, 0.0, 1.0));
    return x;
}

}  // namespace agecharge::env
