#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "agecharge/env/charge_env.hpp"
#include "agecharge/io/config.hpp"
#include "agecharge/sac/agent.hpp"
#include "agecharge/sac/replay_buffer.hpp"

namespace agecharge::sac {

/// Everything logged while rolling one episode.
struct EpisodeData {
    int episode = 0;
    double t_given = 0.0;
    double soc_given = 0.0;
    std::vector<env::Observation> obs;          // obs[k] seen before action k; one extra at the end
    std::vector<double> actions;
    std::vector<env::IntervalRecord> log;
    std::vector<battery::BatteryState> states;  // states[k] before action k; one extra at the end
    env::TerminalOutcome outcome;
    double reward_sum = 0.0;
    int steps() const { return static_cast<int>(actions.size()); }
};

enum class ActionMode { Mean, Sample, Uniform };

/// Rolls one episode from reset(t_given). Throws if the env rejects t_given.
EpisodeData collect_episode(env::ChargeEnv& env, const SacAgent& agent, double t_given, ActionMode mode,
                            std::mt19937_64& rng, int episode_id = 0);

/// Transitions of an episode as collected: zero reward until the terminal one.
std::vector<Transition> episode_transitions(const env::ChargeEnv& env, const EpisodeData& ep);

/// Copies of the episode scored against goals it actually achieved. Relabel 0 uses the
/// final outcome (elapsed time and SOC including the completion tail); further relabels
/// cut the episode at a random step and use the time and SOC reached there. Termination
/// is re-checked step by step under each new goal and the copy is truncated where it
/// fires. Goals outside the configured t_given range are skipped, as are blown-up episodes.
std::vector<Transition> her_relabel(const env::ChargeEnv& env, const EpisodeData& ep, int relabels,
                                    std::mt19937_64& rng);

/// The first `cut` steps of the episode rescored against goal (t_given, soc_given).
/// If no termination fires before the last kept step, that step closes with the original
/// cause when cut is the full episode and with time_up otherwise.
std::vector<Transition> relabel_to_goal(const env::ChargeEnv& env, const EpisodeData& ep, double t_given,
                                        double soc_given, int cut);

struct EpisodeMetrics {
    double t_given = 0.0;
    double reward = 0.0;
    double sei_total = 0.0;  // -sum J_SEI_int over episode and tail, >= 0
    int violations = 0;
    int steps = 0;
    env::Termination cause = env::Termination::None;
    bool blown_up = false;
    double soc_final = 0.0;
    double t_final = 0.0;
    std::vector<env::IntervalRecord> trajectory;  // episode then tail
};

/// Rollouts of the policy (mean action unless stochastic), one per t_given, in parallel.
std::vector<EpisodeMetrics> evaluate_policy(const SacAgent& agent, std::shared_ptr<const battery::BatteryModel> model,
                                            const env::EnvConfig& cfg, const std::vector<double>& t_givens,
                                            bool stochastic, std::uint64_t seed);

struct MetricsRow {
    int episode = 0;
    double eval_mean = 0.0, eval_min = 0.0, eval_max = 0.0;
    double J_V = 0.0, J_Q = 0.0, J_pi = 0.0;  // means over the updates since the last row
    std::size_t buffer_size = 0;
};

struct EpisodeSummary {
    int episode = 0;
    double t_given = 0.0;
    double reward = 0.0;
    double sei_total = 0.0;
    int violations = 0;
    int steps = 0;
    env::Termination cause = env::Termination::None;
    int updates = 0;
    Losses losses;  // means over this episode's updates
    std::size_t buffer_size = 0;
};

struct TrainOptions {
    std::filesystem::path run_dir;
    std::uint64_t seed = 0;
    bool resume = false;
    int episodes = -1;  // overrides cfg.sac.episodes when >= 0
    std::function<void(const EpisodeSummary&)> on_episode;
    std::function<void(const MetricsRow&)> on_eval;
};

struct TrainResult {
    std::vector<MetricsRow> metrics;
    int episodes_done = 0;
    std::filesystem::path last_checkpoint;
};

/// Runs cfg.sac.episodes episodes with t_given ~ U(t_given_min, t_given_max). Every
/// eval_every episodes evaluates eval_episodes fresh t_given draws and appends a row to
/// metrics.csv; every checkpoint_every episodes writes checkpoints/ep<N>.ckpt and
/// latest.ckpt. Resume continues from latest.ckpt and refuses a different config hash.
/// Episode k always draws from derive_seed(seed, "train-episode", k).
TrainResult train(const io::RunConfig& cfg, const TrainOptions& opt);

/// Writes the agent plus run bookkeeping.
void save_training_checkpoint(const std::filesystem::path& path, const SacAgent& agent, const io::RunConfig& cfg,
                              std::uint64_t seed, int episodes_done);
/// Loads weights into `agent`; throws ConfigError("checkpoint", ...) on a config-hash mismatch
/// when `cfg` is given.
nlohmann::json load_agent_checkpoint(const std::filesystem::path& path, SacAgent& agent,
                                     const io::RunConfig* cfg = nullptr);

}  // namespace agecharge::sac
