#include "agecharge/baselines/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "agecharge/common/errors.hpp"

namespace agecharge::baselines {

namespace {

constexpr double kTimeEps = 1e-9;

CurrentProfile grid_profile(double I, double t_given, double dt) {
    CurrentProfile p;
    const double n = std::floor(t_given / dt + kTimeEps);
    for (int k = 0; k < static_cast<int>(n); ++k) p.push_back({I, dt});
    const double rest = t_given - n * dt;
    if (rest > kTimeEps) p.push_back({I, rest});
    return p;
}

battery::BatteryState start_state(const env::ChargeEnv& env) {
    return env.model().init_equilibrium(env.config().ocv0, env.config().T0);
}

/// CC at I_cc until the voltage would pass V_cv, then voltage-held intervals.
CcCvResult run_cccv(const env::ChargeEnv& env, double I_cc, double t_given, double V_cv, double& soc_end) {
    const auto& model = env.model();
    const double dt = env.config().dt;
    CcCvResult res;
    res.I_cc = I_cc;
    auto s = start_state(env);
    const auto grid = grid_profile(I_cc, t_given, dt);
    bool cv = false;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double h = grid[k].dt;
        double I = I_cc;
        if (!cv) {
            auto [next, out] = model.step(s, I, h);
            if (out.V <= V_cv) {
                s = std::move(next);
                res.profile.push_back({I, h});
                continue;
            }
            cv = true;
            res.cv_start = static_cast<int>(k);
        }
        const double hi_cap = res.profile.empty() ? I_cc : std::min(I_cc, res.profile.back().I);
        auto dv = [&](double x) { return model.step(s, x, h).second.V - V_cv; };
        const double lo = env.i_min();
        if (dv(lo) >= 0.0) {
            I = lo;
        } else if (dv(hi_cap) <= 0.0) {
            I = hi_cap;
        } else {
            std::uintmax_t it = 60;
            auto tol = [&](double a, double b) { return std::abs(b - a) < 1e-9 * std::max(1.0, std::abs(b)); };
            auto r = boost::math::tools::toms748_solve(dv, lo, hi_cap, tol, it);
            // bracket end that stays at or below V_cv
            I = dv(r.second) <= 0.0 ? r.second : r.first;
        }
        s = model.step(s, I, h).first;
        res.profile.push_back({I, h});
    }
    soc_end = model.soc(s);
    return res;
}

}  // namespace

double initial_soc(const env::ChargeEnv& env) { return env.model().soc(start_state(env)); }

CurrentProfile cc_controller(const env::ChargeEnv& env, double t_given, double soc_given, double soc0) {
    if (!(t_given > 0.0)) throw std::invalid_argument("cc_controller: t_given must be positive");
    const double I = env.model().i_1c() * 3600.0 * (soc_given - soc0) / t_given;
    if (I > env.i_max() * (1.0 + 1e-12) || I < env.i_min() * (1.0 - 1e-12)) {
        throw InfeasibleError("CC rate " + std::to_string(I / env.model().i_1c()) + "C for t_given " +
                              std::to_string(t_given) + " s is outside the current bounds");
    }
    return grid_profile(I, t_given, env.config().dt);
}

CcCvResult cccv_controller(const env::ChargeEnv& env, double t_given, double soc_given, double V_cv) {
    if (V_cv > env.config().V_max) throw ConfigError("V_cv", "must not exceed V_max");
    const double i1c = env.model().i_1c();
    const double dt = env.config().dt;
    const double soc0 = initial_soc(env);
    double lo = std::max(env.i_min(), i1c * 3600.0 * (soc_given - soc0) / t_given);
    double hi = env.i_max();
    if (lo > hi) throw InfeasibleError("CC-CV: coulomb rate for t_given " + std::to_string(t_given) + " s exceeds I_max");

    // a run that leaves the admissible region has overshot the target
    auto attempt = [&](double I, double& soc) {
        try {
            return run_cccv(env, I, t_given, V_cv, soc);
        } catch (const NumericalError&) {
            soc = std::numeric_limits<double>::infinity();
            return CcCvResult{};
        }
    };
    double soc_hi = 0.0;
    auto best = attempt(hi, soc_hi);
    if (soc_hi < soc_given - 1e-12) {
        throw InfeasibleError("CC-CV: even I_max reaches only SOC " + std::to_string(soc_hi) + " by t_given " +
                              std::to_string(t_given) + " s");
    }
    double soc_lo = 0.0;
    auto low = attempt(lo, soc_lo);
    if (soc_lo >= soc_given && std::isfinite(soc_lo)) return low;

    int iters = 0;
    double best_err = soc_hi - soc_given;
    for (; iters < 60; ++iters) {
        const double mid = 0.5 * (lo + hi);
        double soc_mid = 0.0;
        auto r = attempt(mid, soc_mid);
        const double err = soc_mid - soc_given;
        if (std::abs(err) < std::abs(best_err)) {
            best = r;
            best_err = err;
        }
        if (std::abs(err) <= 0.5 * mid * dt / (3600.0 * i1c)) break;
        (err < 0.0 ? lo : hi) = mid;
        if (hi - lo < 1e-9 * i1c) break;
    }
    if (!std::isfinite(best_err)) {
        throw NumericalError("CC-CV: no bisected rate for t_given " + std::to_string(t_given) + " s stays simulable");
    }
    best.bisection_iterations = iters + 1;
    return best;
}

ProfileMetrics evaluate_profile(const env::ChargeEnv& env, const CurrentProfile& profile, double t_given) {
    double total = 0.0;
    for (const auto& seg : profile) total += seg.dt;
    if (total > t_given + env.config().dt + kTimeEps) {
        throw std::invalid_argument("evaluate_profile: profile lasts " + std::to_string(total) +
                                    " s, beyond t_given " + std::to_string(t_given) + " s");
    }
    ProfileMetrics m;
    m.t_given = t_given;
    m.duration = total;
    auto s = start_state(env);
    m.terminal_soc = env.model().soc(s);
    m.peak_T = s.T_jel;
    m.peak_V = env.model().voltage(s, 0.0);
    m.trajectory = env::simulate_segments(env, s, profile, 0, 0.0);
    double sei = 0.0;
    for (const auto& r : m.trajectory) {
        sei += r.J_SEI_int;
        m.violations += r.violation;
        m.peak_T = std::max(m.peak_T, r.T_jel);
        m.peak_V = std::max(m.peak_V, r.V);
    }
    m.sei_total = -sei;
    if (!m.trajectory.empty()) m.terminal_soc = m.trajectory.back().soc;
    return m;
}

CurrentProfile profile_from_records(const std::vector<env::IntervalRecord>& records) {
    CurrentProfile p;
    p.reserve(records.size());
    for (const auto& r : records) p.push_back({r.I, r.dt});
    return p;
}

}  // namespace agecharge::baselines
