#include "agecharge/baselines/compare.hpp"

#include <algorithm>
#include <exception>
#include <iomanip>

#include "agecharge/common/errors.hpp"
#include "agecharge/common/seed.hpp"
#include "agecharge/sac/trainer.hpp"

namespace agecharge::baselines {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::Sac: return "SAC";
        case Strategy::Cc: return "CC";
        case Strategy::CcCv: return "CC-CV";
    }
    return "?";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(std::max(n, 0));
    for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return v;
}

std::vector<ComparisonRow> compare_strategies(const sac::SacAgent* agent,
                                              std::shared_ptr<const battery::BatteryModel> model,
                                              const env::EnvConfig& cfg, const std::vector<double>& t_givens,
                                              double V_cv, std::uint64_t seed) {
    for (double t : t_givens) {
        if (!(t >= cfg.t_given_min - 1e-9 && t <= cfg.t_given_max + 1e-9)) {
            throw ConfigError("t_given", std::to_string(t) + " s outside [" + std::to_string(cfg.t_given_min) + ", " +
                                             std::to_string(cfg.t_given_max) + "]");
        }
    }
    std::vector<Strategy> strategies;
    if (agent) strategies.push_back(Strategy::Sac);
    strategies.push_back(Strategy::Cc);
    strategies.push_back(Strategy::CcCv);
    const int ns = static_cast<int>(strategies.size());
    const int n = static_cast<int>(t_givens.size()) * ns;
    std::vector<ComparisonRow> rows(n);
    std::exception_ptr err;

#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < n; ++idx) {
        auto& row = rows[idx];
        row.t_given = t_givens[idx / ns];
        row.strategy = strategies[idx % ns];
        row.metrics.t_given = row.t_given;
        try {
            env::ChargeEnv env(model, cfg);
            CurrentProfile profile;
            double horizon = row.t_given;
            switch (row.strategy) {
                case Strategy::Sac: {
                    std::mt19937_64 rng(derive_seed(seed, "compare", static_cast<std::uint64_t>(idx)));
                    const auto ep = sac::collect_episode(env, *agent, row.t_given, sac::ActionMode::Mean, rng);
                    profile = profile_from_records(ep.log);
                    const auto tail = profile_from_records(ep.outcome.tail_records);
                    profile.insert(profile.end(), tail.begin(), tail.end());
                    // an unreachable goal is finished by a max-rate tail that may outlast t_given
                    horizon = std::max(horizon, ep.outcome.t_final);
                    if (ep.outcome.blown_up) {
                        row.status = "failed";
                        row.note = "episode left the admissible region";
                    }
                    break;
                }
                case Strategy::Cc:
                    profile = cc_controller(env, row.t_given, cfg.soc_given, initial_soc(env));
                    break;
                case Strategy::CcCv:
                    profile = cccv_controller(env, row.t_given, cfg.soc_given, V_cv).profile;
                    break;
            }
            if (row.status == "ok") {
                row.metrics = evaluate_profile(env, profile, horizon);
                row.metrics.t_given = row.t_given;
            }
        } catch (const InfeasibleError& e) {
            row.status = "infeasible";
            row.note = e.what();
        } catch (const NumericalError& e) {
            row.status = "failed";
            row.note = e.what();
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return rows;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "strategy,t_given,status,sei_total,violations,peak_T,peak_V,terminal_soc,duration,note\n";
    out << std::setprecision(12);
    for (const auto& r : rows) {
        std::string note = r.note;
        for (char& c : note) {
            if (c == ',' || c == '\n') c = ';';
        }
        const auto& m = r.metrics;
        out << to_string(r.strategy) << ',' << r.t_given << ',' << r.status << ',' << m.sei_total << ','
            << m.violations << ',' << m.peak_T << ',' << m.peak_V << ',' << m.terminal_soc << ',' << m.duration << ','
            << note << '\n';
    }
}

}  // namespace agecharge::baselines
