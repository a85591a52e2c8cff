#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "agecharge/baselines/baselines.hpp"
#include "agecharge/baselines/compare.hpp"
#include "agecharge/common/errors.hpp"
#include "agecharge/io/config.hpp"
#include "agecharge/io/report.hpp"
#include "agecharge/sac/trainer.hpp"

namespace fs = std::filesystem;
using namespace agecharge;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out = "out";
};

struct SimulateArgs {
    std::string profile = "const";
    double crate = 1.0;
    double duration = 3600.0;
    std::string table;
    double t_given = 3600.0;
    bool no_aging = false;
};

io::RunConfig load(const Common& c) {
    return io::load_config(c.config.empty() ? io::default_config_path() : fs::path(c.config));
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(item, &used);
        } catch (const std::exception&) {
            throw ConfigError("--t-given", "cannot parse '" + item + "'");
        }
        if (used != item.size()) throw ConfigError("--t-given", "cannot parse '" + item + "'");
        v.push_back(x);
    }
    return v;
}

std::vector<double> goal_list(const std::string& arg, const io::RunConfig& cfg, int n_default) {
    if (!arg.empty()) return parse_list(arg);
    return baselines::linspace(cfg.env.t_given_min, cfg.env.t_given_max, n_default);
}

// constant current over `duration`, cut onto the control grid
void append_constant(baselines::CurrentProfile& p, double I, double duration, double dt) {
    const double n = std::floor(duration / dt + 1e-9);
    for (int k = 0; k < static_cast<int>(n); ++k) p.push_back({I, dt});
    if (duration - n * dt > 1e-9) p.push_back({I, duration - n * dt});
}

// CSV rows "duration_s,crate"
baselines::CurrentProfile read_table(const std::string& path, double i1c, double dt) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--table", "cannot open " + path);
    baselines::CurrentProfile p;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        double d = 0.0, c = 0.0;
        char comma = 0;
        std::istringstream ss(line);
        if (!(ss >> d >> comma >> c) || comma != ',') {
            if (lineno == 1) continue;
            throw ConfigError("--table", path + ":" + std::to_string(lineno) + ": expected 'duration,crate'");
        }
        if (!(d > 0.0)) throw ConfigError("--table", path + ":" + std::to_string(lineno) + ": duration must be positive");
        append_constant(p, c * i1c, d, dt);
    }
    return p;
}

io::RunManifest start_manifest(const std::string& cmd, const io::RunConfig& cfg, std::uint64_t seed) {
    io::RunManifest m;
    m.command = cmd;
    m.config_hash = io::hex64(io::config_hash(cfg));
    m.seed = seed;
    m.code_version = io::code_version();
    m.started = io::timestamp_now();
    return m;
}

void finish(const fs::path& dir, io::RunManifest m, const io::RunConfig& cfg) {
    std::ofstream(dir / "config.json") << io::to_json(cfg).dump(1) << '\n';
    m.outputs.insert(m.outputs.begin(), "config.json");
    m.finished = io::timestamp_now();
    io::write_manifest(dir, m);
}

int cmd_simulate(const Common& c, const SimulateArgs& a) {
    auto cfg = load(c);
    if (a.no_aging) {
        cfg.battery.k_SEI = 0.0;
        cfg.battery.k_LP = 0.0;
    }
    const auto model = std::make_shared<const battery::BatteryModel>(cfg.battery, cfg.functions, cfg.sim);
    env::ChargeEnv env(model, cfg.env);
    const double dt = cfg.env.dt;
    baselines::CurrentProfile profile;
    double horizon = a.duration;
    if (a.profile == "const") {
        if (!(a.duration > 0.0)) throw ConfigError("--duration", "must be positive");
        append_constant(profile, a.crate * model->i_1c(), a.duration, dt);
    } else if (a.profile == "table") {
        if (a.table.empty()) throw ConfigError("--table", "required with --profile table");
        profile = read_table(a.table, model->i_1c(), dt);
        horizon = 0.0;
        for (const auto& s : profile) horizon += s.dt;
    } else if (a.profile == "cc") {
        profile = baselines::cc_controller(env, a.t_given, cfg.env.soc_given, baselines::initial_soc(env));
        horizon = a.t_given;
    } else if (a.profile == "cccv") {
        profile = baselines::cccv_controller(env, a.t_given, cfg.env.soc_given, cfg.compare.V_cv).profile;
        horizon = a.t_given;
    } else {
        throw ConfigError("--profile", "expected const, table, cc or cccv");
    }

    const fs::path dir(c.out);
    fs::create_directories(dir);
    auto man = start_manifest("simulate", cfg, c.seed);
    const auto m = baselines::evaluate_profile(env, profile, horizon);
    io::write_trajectory_csv(dir / "trajectory.csv", m.trajectory);
    const json summary{{"profile", a.profile},           {"duration", m.duration},
                       {"terminal_soc", m.terminal_soc}, {"sei_total", m.sei_total},
                       {"violations", m.violations},     {"peak_T", m.peak_T},
                       {"peak_V", m.peak_V},             {"i_1c", model->i_1c()},
                       {"initial_soc", baselines::initial_soc(env)}};
    std::ofstream(dir / "summary.json") << summary.dump(1) << '\n';
    man.outputs = {"trajectory.csv", "summary.json"};
    man.extra = {{"profile", a.profile}};
    finish(dir, man, cfg);
    std::cout << summary.dump() << '\n';
    return kExitOk;
}

int cmd_train(const Common& c, int episodes, bool resume) {
    const auto cfg = load(c);
    const fs::path dir(c.out);
    fs::create_directories(dir);
    auto man = start_manifest("train", cfg, c.seed);

    const auto mode = resume ? std::ios::app : std::ios::trunc;
    std::ofstream episodes_log(dir / "episodes.jsonl", mode);
    sac::TrainOptions opt;
    opt.run_dir = dir;
    opt.seed = c.seed;
    opt.resume = resume;
    opt.episodes = episodes;
    opt.on_episode = [&](const sac::EpisodeSummary& s) {
        episodes_log << json{{"episode", s.episode},
                             {"t_given", s.t_given},
                             {"reward", s.reward},
                             {"sei_total", s.sei_total},
                             {"violations", s.violations},
                             {"steps", s.steps},
                             {"cause", env::to_string(s.cause)},
                             {"updates", s.updates},
                             {"J_V", s.losses.J_V},
                             {"J_Q", s.losses.J_Q},
                             {"J_pi", s.losses.J_pi},
                             {"buffer_size", s.buffer_size}}
                            .dump()
                     << '\n';
        episodes_log.flush();
    };
    opt.on_eval = [](const sac::MetricsRow& r) {
        std::printf("episode %d  eval mean %.3f  min %.3f  max %.3f  buffer %zu\n", r.episode, r.eval_mean,
                    r.eval_min, r.eval_max, r.buffer_size);
        std::fflush(stdout);
    };
    const auto res = sac::train(cfg, opt);
    man.outputs = {"metrics.csv", "episodes.jsonl", "checkpoints/latest.ckpt"};
    if (!res.last_checkpoint.empty()) man.outputs.push_back(fs::relative(res.last_checkpoint, dir).string());
    man.extra = {{"episodes_done", res.episodes_done}, {"resumed", resume}};
    finish(dir, man, cfg);
    return kExitOk;
}

std::unique_ptr<sac::SacAgent> load_agent(const std::string& path, const io::RunConfig& cfg, std::uint64_t seed,
                                          const env::ChargeEnv& env) {
    if (path.empty()) throw ConfigError("--checkpoint", "required");
    auto agent = std::make_unique<sac::SacAgent>(static_cast<int>(env.feature_dim()), cfg.sac, seed);
    sac::load_agent_checkpoint(path, *agent, &cfg);
    return agent;
}

int cmd_eval(const Common& c, const std::string& ckpt, const std::string& goals_arg) {
    const auto cfg = load(c);
    const auto model = std::make_shared<const battery::BatteryModel>(cfg.battery, cfg.functions, cfg.sim);
    env::ChargeEnv env(model, cfg.env);
    const auto agent = load_agent(ckpt, cfg, c.seed, env);
    const auto goals = goal_list(goals_arg, cfg, 40);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    auto man = start_manifest("eval", cfg, c.seed);
    const auto ms = sac::evaluate_policy(*agent, model, cfg.env, goals, cfg.sac.stochastic_eval, c.seed);
    std::ofstream csv(dir / "eval.csv");
    std::ofstream traj(dir / "trajectories.jsonl");
    csv << "t_given,reward,sei_total,violations,steps,cause,soc_final,t_final\n";
    csv.precision(12);
    for (const auto& m : ms) {
        csv << m.t_given << ',' << m.reward << ',' << m.sei_total << ',' << m.violations << ',' << m.steps << ','
            << env::to_string(m.cause) << ',' << m.soc_final << ',' << m.t_final << '\n';
        json j{{"strategy", "SAC"}, {"t_given", m.t_given}, {"trajectory", io::trajectory_json(m.trajectory)}};
        traj << j.dump() << '\n';
    }
    man.outputs = {"eval.csv", "trajectories.jsonl"};
    man.extra = {{"checkpoint", fs::absolute(ckpt).string()}};
    finish(dir, man, cfg);
    return kExitOk;
}

int cmd_compare(const Common& c, const std::string& ckpt, const std::string& goals_arg) {
    const auto cfg = load(c);
    const auto model = std::make_shared<const battery::BatteryModel>(cfg.battery, cfg.functions, cfg.sim);
    env::ChargeEnv env(model, cfg.env);
    std::unique_ptr<sac::SacAgent> agent;
    if (!ckpt.empty()) agent = load_agent(ckpt, cfg, c.seed, env);
    const auto goals = goal_list(goals_arg, cfg, 40);

    const fs::path dir(c.out);
    fs::create_directories(dir);
    auto man = start_manifest("compare", cfg, c.seed);
    const auto rows = baselines::compare_strategies(agent.get(), model, cfg.env, goals, cfg.compare.V_cv, c.seed);
    std::ofstream csv(dir / "comparison.csv");
    baselines::write_comparison_csv(csv, rows);
    std::ofstream traj(dir / "trajectories.jsonl");
    for (const auto& r : rows) {
        json j{{"strategy", baselines::to_string(r.strategy)},
               {"t_given", r.t_given},
               {"status", r.status},
               {"trajectory", io::trajectory_json(r.metrics.trajectory)}};
        traj << j.dump() << '\n';
    }
    man.outputs = {"comparison.csv", "trajectories.jsonl"};
    man.extra = {{"checkpoint", ckpt.empty() ? "" : fs::absolute(ckpt).string()}, {"V_cv", cfg.compare.V_cv}};
    finish(dir, man, cfg);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aging-aware charging: battery simulation, SAC training and baseline comparison"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "config JSON (default: shipped data/default_config.json)");
        sub->add_option("--seed", common.seed, "global seed");
        sub->add_option("--out", common.out, "output directory");
    };

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "simulate a current profile and write trajectory.csv");
    add_common(s);
    s->add_option("--profile", sim.profile, "const, table, cc or cccv")->check(CLI::IsMember({"const", "table", "cc", "cccv"}));
    s->add_option("--crate", sim.crate, "current as a multiple of 1C for --profile const");
    s->add_option("--duration", sim.duration, "seconds, for --profile const");
    s->add_option("--table", sim.table, "CSV of 'duration_s,crate' rows for --profile table");
    s->add_option("--t-given", sim.t_given, "charge time in seconds for cc/cccv");
    s->add_flag("--no-aging", sim.no_aging, "set k_SEI and k_LP to zero");

    int episodes = -1;
    bool resume = false;
    auto* t = app.add_subcommand("train", "train the SAC charging policy");
    add_common(t);
    t->add_option("--episodes", episodes, "override sac.episodes");
    t->add_flag("--resume", resume, "continue from <out>/checkpoints/latest.ckpt");

    std::string ckpt, goals;
    auto* e = app.add_subcommand("eval", "evaluate a checkpoint on a list of charge times");
    add_common(e);
    e->add_option("--checkpoint", ckpt, "checkpoint file")->required();
    e->add_option("--t-given", goals, "comma-separated charge times in seconds (default: 40 evenly spaced)");

    auto* cmp = app.add_subcommand("compare", "compare SAC, CC and CC-CV on a list of charge times");
    add_common(cmp);
    cmp->add_option("--checkpoint", ckpt, "checkpoint file (omit to compare the baselines only)");
    cmp->add_option("--t-given", goals, "comma-separated charge times in seconds (default: 40 evenly spaced)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& err) {
        const int rc = app.exit(err);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (s->parsed()) return cmd_simulate(common, sim);
        if (t->parsed()) return cmd_train(common, episodes, resume);
        if (e->parsed()) return cmd_eval(common, ckpt, goals);
        if (cmp->parsed()) return cmd_compare(common, ckpt, goals);
    } catch (const ConfigError& err) {
        std::cerr << "config error: " << err.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& err) {
        std::cerr << "numerical error: " << err.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
