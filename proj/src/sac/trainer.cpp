#include "agecharge/sac/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <sstream>

#include "agecharge/common/errors.hpp"
#include "agecharge/common/seed.hpp"
#include "agecharge/nn/checkpoint.hpp"

namespace agecharge::sac {

namespace fs = std::filesystem;

namespace {

constexpr double kTimeEps = 1e-9;
constexpr int kMaxBadUpdates = 10;

Transition make_transition(const env::ChargeEnv& env, const env::Observation& o, double a, double r,
                           const env::Observation& o2, bool done, int episode, int step, double t_given,
                           double soc_given) {
    Transition t;
    t.s = env.features(o);
    t.a = a;
    t.r = r;
    t.s2 = env.features(o2);
    t.done = done;
    t.episode = episode;
    t.step = step;
    t.t_given = t_given;
    t.soc_given = soc_given;
    return t;
}

env::Observation with_goal(env::Observation o, double t_given, double soc_given, int k, double dt) {
    o.t_remaining = t_given - static_cast<double>(k) * dt;
    o.soc_given = soc_given;
    return o;
}

void write_metrics_header(std::ostream& out) { out << "episode,eval_mean,eval_min,eval_max,J_V,J_Q,J_pi,buffer_size\n"; }

void write_metrics_row(std::ostream& out, const MetricsRow& r) {
    out << r.episode << ',' << r.eval_mean << ',' << r.eval_min << ',' << r.eval_max << ',' << r.J_V << ','
        << r.J_Q << ',' << r.J_pi << ',' << r.buffer_size << '\n';
}

std::vector<MetricsRow> read_metrics(const fs::path& path) {
    std::vector<MetricsRow> rows;
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        MetricsRow r;
        ss >> r.episode >> r.eval_mean >> r.eval_min >> r.eval_max >> r.J_V >> r.J_Q >> r.J_pi >> r.buffer_size;
        if (ss) rows.push_back(r);
    }
    return rows;
}

}  // namespace

EpisodeData collect_episode(env::ChargeEnv& env, const SacAgent& agent, double t_given, ActionMode mode,
                            std::mt19937_64& rng, int episode_id) {
    EpisodeData ep;
    ep.episode = episode_id;
    ep.t_given = t_given;
    ep.soc_given = env.config().soc_given;
    ep.obs.push_back(env.reset(t_given));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    while (env.active()) {
        double a = 0.0;
        switch (mode) {
            case ActionMode::Mean: a = agent.act(env.features(ep.obs.back()), false, rng); break;
            case ActionMode::Sample: a = agent.act(env.features(ep.obs.back()), true, rng); break;
            case ActionMode::Uniform: a = U(rng); break;
        }
        auto res = env.step(a);
        ep.actions.push_back(a);
        ep.obs.push_back(res.obs);
        ep.reward_sum += res.reward;
        if (res.done) ep.outcome = *res.terminal;
    }
    ep.log = env.log();
    ep.states = env.states();
    return ep;
}

std::vector<Transition> episode_transitions(const env::ChargeEnv& env, const EpisodeData& ep) {
    std::vector<Transition> out;
    const int n = ep.steps();
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        const bool last = k + 1 == n;
        out.push_back(make_transition(env, ep.obs[k], ep.actions[k], last ? ep.outcome.reward : 0.0, ep.obs[k + 1],
                                      last, ep.episode, k, ep.t_given, ep.soc_given));
    }
    return out;
}

std::vector<Transition> relabel_to_goal(const env::ChargeEnv& env, const EpisodeData& ep, double t_given,
                                        double soc_given, int cut) {
    if (ep.outcome.blown_up) throw std::invalid_argument("relabel_to_goal: blown-up episodes cannot be rescored");
    if (cut < 1 || cut > static_cast<int>(ep.log.size())) throw std::out_of_range("relabel_to_goal: bad cut");
    const double dt = env.config().dt;
    std::vector<Transition> out;
    for (int k = 0; k < cut; ++k) {
        const double soc_now = ep.log[k].soc;
        const double t_rem = t_given - static_cast<double>(k + 1) * dt;
        auto cause = env.check_termination(soc_now, t_rem, soc_given);
        if (cause == env::Termination::None && k + 1 == cut) {
            cause = cut == ep.steps() ? ep.outcome.cause : env::Termination::TimeUp;
        }
        const auto o = with_goal(ep.obs[k], t_given, soc_given, k, dt);
        const auto o2 = with_goal(ep.obs[k + 1], t_given, soc_given, k + 1, dt);
        if (cause == env::Termination::None) {
            out.push_back(make_transition(env, o, ep.actions[k], 0.0, o2, false, ep.episode, k, t_given, soc_given));
            continue;
        }
        const std::vector<env::IntervalRecord> traj(ep.log.begin(), ep.log.begin() + k + 1);
        const auto term = env.terminal_reward(traj, cause, ep.states[k + 1], soc_now, soc_given,
                                              static_cast<double>(k + 1) * dt);
        out.push_back(make_transition(env, o, ep.actions[k], term.reward, o2, true, ep.episode, k, t_given, soc_given));
        break;
    }
    return out;
}

std::vector<Transition> her_relabel(const env::ChargeEnv& env, const EpisodeData& ep, int relabels,
                                    std::mt19937_64& rng) {
    std::vector<Transition> out;
    if (ep.outcome.blown_up || ep.log.empty()) return out;
    const auto& cfg = env.config();
    const int n = ep.steps();
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int r = 0; r < relabels; ++r) {
        double t_goal = ep.outcome.t_final;
        double soc_goal = ep.outcome.soc_final;
        int cut = n;
        if (r > 0) {
            const int j = pick(rng);
            t_goal = static_cast<double>(j + 1) * cfg.dt;
            soc_goal = ep.log[j].soc;
            cut = j + 1;
        }
        if (t_goal < cfg.t_given_min - kTimeEps || t_goal > cfg.t_given_max + kTimeEps) continue;
        if (!(soc_goal > 0.0 && soc_goal <= 1.0)) continue;
        try {
            auto ts = relabel_to_goal(env, ep, t_goal, soc_goal, cut);
            out.insert(out.end(), std::make_move_iterator(ts.begin()), std::make_move_iterator(ts.end()));
        } catch (const NumericalError&) {
            // tail blew up under the new goal; drop this relabel
        }
    }
    return out;
}

std::vector<EpisodeMetrics> evaluate_policy(const SacAgent& agent, std::shared_ptr<const battery::BatteryModel> model,
                                            const env::EnvConfig& cfg, const std::vector<double>& t_givens,
                                            bool stochastic, std::uint64_t seed) {
    const int n = static_cast<int>(t_givens.size());
    std::vector<EpisodeMetrics> out(n);
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        try {
            env::ChargeEnv env(model, cfg);
            std::mt19937_64 rng(derive_seed(seed, "eval", static_cast<std::uint64_t>(i)));
            auto ep = collect_episode(env, agent, t_givens[i], stochastic ? ActionMode::Sample : ActionMode::Mean, rng, i);
            auto& m = out[i];
            m.t_given = t_givens[i];
            m.reward = ep.reward_sum;
            m.sei_total = -ep.outcome.sei_sum;
            m.violations = ep.outcome.violations;
            m.steps = ep.steps();
            m.cause = ep.outcome.cause;
            m.blown_up = ep.outcome.blown_up;
            m.soc_final = ep.outcome.soc_final;
            m.t_final = ep.outcome.t_final;
            m.trajectory = ep.log;
            m.trajectory.insert(m.trajectory.end(), ep.outcome.tail_records.begin(), ep.outcome.tail_records.end());
        } catch (...) {
#pragma omp critical
            if (!err) err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);
    return out;
}

void save_training_checkpoint(const fs::path& path, const SacAgent& agent, const io::RunConfig& cfg,
                              std::uint64_t seed, int episodes_done) {
    nn::Checkpoint c;
    agent.save(c);
    c.meta["config_hash"] = io::hex64(io::config_hash(cfg));
    c.meta["seed"] = seed;
    c.meta["episodes_done"] = episodes_done;
    nn::save_checkpoint(path, c);
}

nlohmann::json load_agent_checkpoint(const fs::path& path, SacAgent& agent, const io::RunConfig* cfg) {
    const auto c = nn::load_checkpoint(path);
    if (cfg) {
        const auto want = io::hex64(io::config_hash(*cfg));
        const auto got = c.meta.value("config_hash", std::string());
        if (got != want) {
            throw ConfigError("checkpoint", path.string() + " was written with config hash " + got +
                                                ", current config hashes to " + want);
        }
    }
    agent.load(c);
    return c.meta;
}

TrainResult train(const io::RunConfig& cfg, const TrainOptions& opt) {
    const auto model = std::make_shared<const battery::BatteryModel>(cfg.battery, cfg.functions, cfg.sim);
    env::ChargeEnv env(model, cfg.env);
    const auto& sc = cfg.sac;
    const int episodes = opt.episodes >= 0 ? opt.episodes : sc.episodes;
    SacAgent agent(static_cast<int>(env.feature_dim()), sc, opt.seed);
    ReplayBuffer buffer(sc.buffer_capacity);

    const fs::path ckpt_dir = opt.run_dir / "checkpoints";
    fs::create_directories(ckpt_dir);
    const fs::path metrics_path = opt.run_dir / "metrics.csv";
    const fs::path latest = ckpt_dir / "latest.ckpt";

    TrainResult result;
    int start = 0;
    if (opt.resume && fs::exists(latest)) {
        const auto meta = load_agent_checkpoint(latest, agent, &cfg);
        if (meta.value("seed", opt.seed) != opt.seed) {
            throw ConfigError("seed", "resume seed differs from the checkpoint's");
        }
        start = meta.value("episodes_done", 0);
        for (const auto& r : read_metrics(metrics_path)) {
            if (r.episode <= start) result.metrics.push_back(r);
        }
    }
    {
        std::ofstream out(metrics_path, std::ios::trunc);
        write_metrics_header(out);
        for (const auto& r : result.metrics) write_metrics_row(out, r);
    }
    {
        std::ofstream out(opt.run_dir / "config.json", std::ios::trunc);
        out << io::to_json(cfg).dump(1) << '\n';
    }

    std::uniform_real_distribution<double> T(cfg.env.t_given_min, cfg.env.t_given_max);
    const std::size_t warmup = std::max(sc.warmup_transitions, static_cast<std::size_t>(sc.batch_size));
    std::size_t pushed_since_start = 0;
    Losses acc{};
    int acc_n = 0;
    int bad_updates = 0;

    for (int ep_id = start; ep_id < episodes; ++ep_id) {
        std::mt19937_64 rng(derive_seed(opt.seed, "train-episode", static_cast<std::uint64_t>(ep_id)));
        const double t_given = T(rng);
        const bool random = pushed_since_start < warmup && start == 0;
        auto ep = collect_episode(env, agent, t_given, random ? ActionMode::Uniform : ActionMode::Sample, rng, ep_id);

        auto ts = episode_transitions(env, ep);
        std::mt19937_64 her_rng(derive_seed(opt.seed, "her", static_cast<std::uint64_t>(ep_id)));
        auto hs = her_relabel(env, ep, sc.her_relabels, her_rng);
        pushed_since_start += ts.size() + hs.size();
        buffer.push(std::move(ts));
        buffer.push(std::move(hs));

        EpisodeSummary sum;
        sum.episode = ep_id;
        sum.t_given = t_given;
        sum.reward = ep.reward_sum;
        sum.sei_total = -ep.outcome.sei_sum;
        sum.violations = ep.outcome.violations;
        sum.steps = ep.steps();
        sum.cause = ep.outcome.cause;

        if (buffer.size() >= warmup || (start > 0 && buffer.size() >= static_cast<std::size_t>(sc.batch_size))) {
            int n_upd = static_cast<int>(std::floor(sc.updates_per_step * ep.steps()));
            if (sc.max_updates_per_episode > 0) n_upd = std::min(n_upd, sc.max_updates_per_episode);
            std::mt19937_64 urng(derive_seed(opt.seed, "update", static_cast<std::uint64_t>(ep_id)));
            Losses ep_l{};
            int done = 0;
            for (int u = 0; u < n_upd; ++u) {
                try {
                    const auto l = agent.update(make_batch(buffer.sample(sc.batch_size, urng)), urng);
                    ep_l.J_V += l.J_V;
                    ep_l.J_Q += l.J_Q;
                    ep_l.J_pi += l.J_pi;
                    ++done;
                    bad_updates = 0;
                } catch (const NumericalError&) {
                    if (++bad_updates > kMaxBadUpdates) throw;
                }
            }
            if (done > 0) {
                acc.J_V += ep_l.J_V;
                acc.J_Q += ep_l.J_Q;
                acc.J_pi += ep_l.J_pi;
                acc_n += done;
                sum.losses = {ep_l.J_V / done, ep_l.J_Q / done, ep_l.J_pi / done};
            }
            sum.updates = done;
        }
        sum.buffer_size = buffer.size();
        if (opt.on_episode) opt.on_episode(sum);

        const int done_eps = ep_id + 1;
        if (done_eps % sc.eval_every == 0) {
            const auto idx = static_cast<std::uint64_t>(done_eps / sc.eval_every);
            std::mt19937_64 erng(derive_seed(opt.seed, "eval-goals", idx));
            std::vector<double> goals(sc.eval_episodes);
            for (auto& g : goals) g = T(erng);
            const auto ms = evaluate_policy(agent, model, cfg.env, goals, sc.stochastic_eval,
                                            derive_seed(opt.seed, "eval-noise", idx));
            MetricsRow row;
            row.episode = done_eps;
            row.eval_min = ms.front().reward;
            row.eval_max = ms.front().reward;
            for (const auto& m : ms) {
                row.eval_mean += m.reward / static_cast<double>(ms.size());
                row.eval_min = std::min(row.eval_min, m.reward);
                row.eval_max = std::max(row.eval_max, m.reward);
            }
            if (acc_n > 0) {
                row.J_V = acc.J_V / acc_n;
                row.J_Q = acc.J_Q / acc_n;
                row.J_pi = acc.J_pi / acc_n;
            }
            row.buffer_size = buffer.size();
            acc = {};
            acc_n = 0;
            result.metrics.push_back(row);
            std::ofstream out(metrics_path, std::ios::app);
            write_metrics_row(out, row);
            if (opt.on_eval) opt.on_eval(row);
        }
        if (done_eps % sc.checkpoint_every == 0 || done_eps == episodes) {
            const auto path = ckpt_dir / ("ep" + std::to_string(done_eps) + ".ckpt");
            save_training_checkpoint(path, agent, cfg, opt.seed, done_eps);
            fs::copy_file(path, latest, fs::copy_options::overwrite_existing);
            result.last_checkpoint = path;
        }
        result.episodes_done = done_eps;
    }
    if (result.episodes_done == 0) result.episodes_done = start;
    return result;
}

}  // namespace agecharge::sac
