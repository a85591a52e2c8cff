#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "agecharge/baselines/baselines.hpp"
#include "agecharge/sac/agent.hpp"

namespace agecharge::baselines {

enum class Strategy { Sac, Cc, CcCv };
std::string to_string(Strategy s);

struct ComparisonRow {
    Strategy strategy = Strategy::Cc;
    double t_given = 0.0;
    std::string status = "ok";  // ok, infeasible, failed
    std::string note;
    ProfileMetrics metrics;
};

/// Runs the SAC policy (mean actions; skipped when agent is null), CC and CC-CV on every
/// t_given from the same initial state, in parallel over (strategy, t_given) pairs.
/// Infeasible or failed cases become flagged rows. Rows are ordered by t_given, then strategy.
std::vector<ComparisonRow> compare_strategies(const sac::SacAgent* agent,
                                              std::shared_ptr<const battery::BatteryModel> model,
                                              const env::EnvConfig& cfg, const std::vector<double>& t_givens,
                                              double V_cv, std::uint64_t seed);

/// Header: strategy,t_given,status,sei_total,violations,peak_T,peak_V,terminal_soc,duration,note
void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);

/// n values evenly spaced over [lo, hi].
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace agecharge::baselines
