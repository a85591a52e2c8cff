#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "agecharge/baselines/baselines.hpp"
#include "agecharge/baselines/compare.hpp"
#include "agecharge/common/errors.hpp"
#include "agecharge/io/config.hpp"
#include "agecharge/io/report.hpp"
#include "agecharge/nn/gaussian.hpp"
#include "agecharge/sac/agent.hpp"
#include "agecharge/sac/trainer.hpp"
#include "../unit/gradcheck.hpp"

namespace fs = std::filesystem;
using namespace agecharge;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

io::RunConfig no_aging(io::RunConfig c) {
    c.battery.k_SEI = 0.0;
    c.battery.k_LP = 0.0;
    return c;
}

std::shared_ptr<const battery::BatteryModel> make_model(const io::RunConfig& c) {
    return std::make_shared<const battery::BatteryModel>(c.battery, c.functions, c.sim);
}

// 1: solid lithium tracks the charge passed; the electrolyte holds its inventory
Outcome lithium_conservation(const io::RunConfig& base) {
    const auto t0 = Clock::now();
    const auto cfg = no_aging(base);
    const auto m = make_model(cfg);
    const double I = m->i_1c(), dt = 5.0, F = cfg.battery.F;
    // 1C magnitude for 2 h, reversed to stay inside the SOC window
    const std::vector<std::pair<double, double>> phases{{I, 3000.0}, {-I, 3000.0}, {I, 1200.0}};
    auto s = m->init_equilibrium(cfg.env.ocv0, cfg.env.T0);
    const double an0 = m->anode_lithium(s), ca0 = m->cathode_lithium(s), el0 = m->electrolyte_lithium(s);
    double charge = 0.0, throughput = 0.0, worst = 0.0, drift = 0.0;
    for (auto [Ip, dur] : phases) {
        for (int k = 0; k < static_cast<int>(dur / dt); ++k) {
            s = m->step(s, Ip, dt).first;
            charge += Ip * dt / F;
            throughput += std::abs(Ip) * dt / F;
            worst = std::max({worst, std::abs(m->anode_lithium(s) - an0 - charge) / throughput,
                              std::abs(ca0 - m->cathode_lithium(s) - charge) / throughput});
            drift = std::max(drift, std::abs(m->electrolyte_lithium(s) - el0) / el0);
        }
    }
    const double hours = 2.0, rt = seconds_since(t0);
    const double drift_rate = drift / hours;
    return {worst < 1e-5 && drift_rate < 1e-6 && rt < 10.0,
            fmt("solid rel err %.2e (<1e-5), electrolyte drift %.2e/h (<1e-6), %.2f s", worst, drift_rate, rt)};
}

// 2
Outcome equilibrium_voltage(const io::RunConfig& cfg) {
    const auto m = make_model(cfg);
    const auto s = m->init_equilibrium(3.3, cfg.env.T0);
    const double V = m->voltage(s, 0.0);
    return {std::abs(V - 3.3) <= 1e-3, fmt("V(I=0) = %.6f V", V)};
}

// 3
Outcome coulomb_counting(const io::RunConfig& base) {
    double worst = 0.0, excess = -1.0;
    for (bool aging : {false, true}) {
        const auto cfg = aging ? base : no_aging(base);
        const auto m = make_model(cfg);
        for (auto [crate, dur] : {std::pair{0.5, 3600.0}, std::pair{1.0, 2400.0}, std::pair{2.0, 1200.0},
                                  std::pair{3.0, 600.0}, std::pair{5.0, 480.0}}) {
            auto s = m->init_equilibrium(cfg.env.ocv0, cfg.env.T0);
            const double soc0 = m->soc(s);
            for (int k = 0; k < static_cast<int>(dur / 5.0); ++k) s = m->step(s, crate * m->i_1c(), 5.0).first;
            const double dsoc = m->soc(s) - soc0, counted = crate * dur / 3600.0;
            if (aging) {
                excess = std::max(excess, dsoc - counted);
            } else {
                worst = std::max(worst, std::abs(dsoc - counted));
            }
        }
    }
    // side current leaves intercalation untouched, so equality up to round-off is expected
    return {worst < 1e-3 && excess <= 1e-9,
            fmt("max |dSOC - It/(3600 I1C)| = %.2e without aging; with aging max(dSOC - count) = %.2e", worst,
                excess)};
}

// 4
Outcome convergence_order(const io::RunConfig& base) {
    const auto t0 = Clock::now();
    auto final_v = [&](int n, double h) {
        auto cfg = no_aging(base);
        cfg.sim.n_r = n;
        cfg.sim.n_x = n;
        cfg.sim.substep_max = h;
        const auto m = make_model(cfg);
        auto s = m->init_equilibrium(cfg.env.ocv0, cfg.env.T0);
        battery::StepOutput o;
        for (int k = 0; k < 360; ++k) std::tie(s, o) = m->step(s, m->i_1c(), 5.0);
        return o.V;
    };
    auto study = [](const std::vector<double>& err, double order) {
        bool ok = true;
        std::vector<double> p;
        for (std::size_t i = 1; i < err.size(); ++i) {
            ok = ok && err[i] < err[i - 1];
            p.push_back(std::log2(err[i - 1] / err[i]));
        }
        for (double x : p) ok = ok && std::abs(x - order) < 0.25;
        return std::pair{ok, p};
    };
    const double ref_t = final_v(16, 1.0 / 64);
    std::vector<double> et;
    for (double h : {2.5, 1.25, 0.625, 0.3125}) et.push_back(std::abs(final_v(16, h) - ref_t));
    const double ref_x = final_v(128, 1.0);
    std::vector<double> ex;
    for (int n : {4, 8, 16, 32}) ex.push_back(std::abs(final_v(n, 1.0) - ref_x));
    const auto [ok_t, pt] = study(et, 1.0);
    const auto [ok_x, px] = study(ex, 2.0);
    const double rt = seconds_since(t0);
    return {ok_t && ok_x && rt < 60.0,
            fmt("time orders %.2f %.2f %.2f (expect 1), grid orders %.2f %.2f %.2f (expect 2), %.1f s", pt[0], pt[1],
                pt[2], px[0], px[1], px[2], rt)};
}

// 5
Outcome gradient_validation(const io::RunConfig& cfg, int obs_dim) {
    sac::SacAgent agent(obs_dim, cfg.sac, 101);
    std::mt19937_64 rng(102);
    std::normal_distribution<double> N(0.0, 0.5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto batch = [&](int n) {
        std::vector<sac::Transition> ts(n);
        for (auto& t : ts) {
            t.s.resize(obs_dim);
            t.s2.resize(obs_dim);
            for (auto& x : t.s) x = N(rng);
            for (auto& x : t.s2) x = N(rng);
            t.a = U(rng);
            t.r = 100.0 * N(rng);
            t.done = U(rng) < 0.2;
        }
        return sac::make_batch(ts);
    };
    double worst = 0.0;
    int checked = 0;
    auto check_all = [&] {
        const auto b = batch(16);
        std::vector<double> eps(16);
        for (auto& e : eps) e = N(rng) * 2.0;
        const std::size_t stride = 13;
        for (const auto& r :
             {gradcheck::check(agent.v, [&] { return agent.value_loss(b, eps); }, gradcheck::patterns({&agent.v}), stride),
              gradcheck::check(agent.q, [&] { return agent.q_loss(b); }, gradcheck::patterns({&agent.q}), stride),
              gradcheck::check(agent.policy, [&] { return agent.policy_loss(b, eps); },
                               gradcheck::patterns({&agent.policy, &agent.q}), stride)}) {
            worst = std::max(worst, r.max_rel_err);
            checked += r.checked;
        }
    };
    check_all();
    for (int k = 0; k < 100; ++k) agent.update(batch(cfg.sac.batch_size), rng);
    check_all();
    return {worst < 1e-4 && checked > 0,
            fmt("max rel err %.2e over %d entries of J_V, J_Q, J_pi at init and after 100 updates", worst, checked)};
}

// 6
Outcome squashed_normalisation() {
    std::mt19937_64 rng(103);
    std::uniform_real_distribution<double> mu(-3.0, 3.0), ls(-3.0, 1.0);
    boost::math::quadrature::tanh_sinh<double> q;
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const nn::GaussianPolicyHead h{mu(rng), ls(rng)};
        const double mass = q.integrate([&](double a) { return std::exp(h.log_prob(a)); }, 0.0, 1.0);
        worst = std::max(worst, std::abs(mass - 1.0));
    }
    return {worst <= 1e-3, fmt("max |mass - 1| = %.2e over 100 heads", worst)};
}

// 7
Outcome bandit_sanity() {
    const auto t0 = Clock::now();
    sac::SacConfig c;
    c.hidden_layers = 2;
    c.hidden_width = 32;
    c.batch_size = 64;
    c.learning_rate = 3e-4;
    c.entropy_scale = 0.01;
    c.warmup_transitions = 1000;
    double worst = 0.0;
    std::string parts;
    for (double opt : {0.7, 0.3}) {
        sac::QuadraticBandit bandit;
        bandit.optimum = opt;
        bandit.curvature = 10.0;
        sac::SacAgent agent(bandit.obs_dim, c, 104);
        const double a = sac::train_bandit(agent, bandit, 8000, 105);
        worst = std::max(worst, std::abs(a - opt));
        parts += fmt("%.4f (optimum %.1f) ", a, opt);
    }
    const double rt = seconds_since(t0);
    return {worst < 1e-2 && rt < 120.0, fmt("mean actions %s, %.1f s", parts.c_str(), rt)};
}

// 8
Outcome goal_attainment(const io::RunConfig& cfg) {
    env::ChargeEnv env(make_model(cfg), cfg.env);
    std::mt19937_64 rng(106);
    std::uniform_real_distribution<double> U(0.0, 1.0), T(cfg.env.t_given_min, cfg.env.t_given_max);
    const double one_interval = cfg.env.i_max_crate * cfg.env.dt / 3600.0;
    double worst = 0.0;
    int blown = 0;
    for (int ep = 0; ep < 100; ++ep) {
        env.reset(T(rng));
        env::StepResult r;
        do {
            r = env.step(U(rng));
        } while (!r.done);
        if (r.terminal->blown_up) {
            ++blown;
            continue;
        }
        worst = std::max(worst, std::abs(r.terminal->soc_final - cfg.env.soc_given));
    }
    return {worst <= one_interval && blown == 0,
            fmt("max |SOC_final - 0.8| = %.2e (one interval %.2e), %d blown up", worst, one_interval, blown)};
}

// 11
Outcome metric_consistency(const io::RunConfig& cfg) {
    env::ChargeEnv env(make_model(cfg), cfg.env);
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> U(0.0, 1.0), T(cfg.env.t_given_min, cfg.env.t_given_max);
    int mismatches = 0;
    for (int ep = 0; ep < 30; ++ep) {
        const double t_given = T(rng);
        env.reset(t_given);
        env::StepResult r;
        do {
            r = env.step(U(rng));
        } while (!r.done);
        auto records = env.log();
        records.insert(records.end(), r.terminal->tail_records.begin(), r.terminal->tail_records.end());
        const auto m = baselines::evaluate_profile(env, baselines::profile_from_records(records),
                                                   std::max(t_given, r.terminal->t_final));
        mismatches += m.sei_total != -r.terminal->sei_sum || m.violations != r.terminal->violations;
    }
    return {mismatches == 0, fmt("%d of 30 random episodes differ", mismatches)};
}

// Spearman correlation with a one-sided t approximation for the p-value
std::pair<double, double> spearman(const std::vector<double>& y) {
    const int n = static_cast<int>(y.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return y[a] < y[b]; });
    std::vector<double> rank(n);
    for (int i = 0; i < n;) {
        int j = i;
        while (j + 1 < n && y[idx[j + 1]] == y[idx[i]]) ++j;
        for (int k = i; k <= j; ++k) rank[idx[k]] = 0.5 * (i + j) + 1.0;
        i = j + 1;
    }
    double mx = (n + 1) / 2.0, sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (int i = 0; i < n; ++i) {
        sxy += (i + 1 - mx) * (rank[i] - mx);
        sxx += (i + 1 - mx) * (i + 1 - mx);
        syy += (rank[i] - mx) * (rank[i] - mx);
    }
    const double rho = sxy / std::sqrt(sxx * syy);
    if (n < 3 || std::abs(rho) >= 1.0) return {rho, rho > 0 ? 0.0 : 1.0};
    const double t = rho * std::sqrt((n - 2) / (1.0 - rho * rho));
    const boost::math::students_t dist(n - 2);
    return {rho, boost::math::cdf(boost::math::complement(dist, t))};
}

struct TrainingRun {
    sac::TrainResult result;
    std::unique_ptr<sac::SacAgent> agent;
    double seconds = 0.0;
};

// 9
Outcome training_trend(const TrainingRun& run) {
    std::vector<double> means;
    for (const auto& r : run.result.metrics) means.push_back(r.eval_mean);
    if (means.size() < 3) return {false, fmt("only %zu evaluation rows", means.size())};
    const auto [rho, p] = spearman(means);
    return {rho > 0.0 && p < 0.05,
            fmt("Spearman rho %.3f, one-sided p %.4f over %zu evaluations (first %.1f, last %.1f), %.0f s", rho, p,
                means.size(), means.front(), means.back(), run.seconds)};
}

// 10
Outcome comparative_claim(const TrainingRun& run, const io::RunConfig& cfg, const fs::path& dir) {
    const auto goals = baselines::linspace(cfg.env.t_given_min, cfg.env.t_given_max, 40);
    const auto model = make_model(cfg);
    const auto rows = baselines::compare_strategies(run.agent.get(), model, cfg.env, goals, cfg.compare.V_cv, 11);
    const auto csv = dir / "comparison.csv";
    {
        std::ofstream out(csv);
        baselines::write_comparison_csv(out, rows);
    }
    int cases = 0, sei_wins = 0, v_sac = 0, v_cccv = 0;
    for (double g : goals) {
        const baselines::ComparisonRow *sac = nullptr, *cc = nullptr, *cccv = nullptr;
        for (const auto& r : rows) {
            if (r.t_given != g || r.status != "ok") continue;
            if (r.strategy == baselines::Strategy::Sac) sac = &r;
            if (r.strategy == baselines::Strategy::Cc) cc = &r;
            if (r.strategy == baselines::Strategy::CcCv) cccv = &r;
        }
        if (!sac || !cc || !cccv) continue;
        ++cases;
        sei_wins += sac->metrics.sei_total <= cc->metrics.sei_total;
        v_sac += sac->metrics.violations;
        v_cccv += cccv->metrics.violations;
    }
    const double share = cases ? static_cast<double>(sei_wins) / cases : 0.0;
    return {cases >= 10 && share >= 0.6 && v_sac <= v_cccv,
            fmt("SEI <= CC in %d/%d cases (%.0f%%, need 60%%), violations SAC %d vs CC-CV %d; %s", sei_wins, cases,
                100.0 * share, v_sac, v_cccv, csv.string().c_str())};
}

TrainingRun desk_training(const io::RunConfig& cfg, const fs::path& dir, std::uint64_t seed) {
    const auto t0 = Clock::now();
    TrainingRun run;
    sac::TrainOptions opt;
    opt.run_dir = dir;
    opt.seed = seed;
    opt.resume = true;
    opt.on_eval = [](const sac::MetricsRow& r) {
        std::printf("    training: episode %d eval mean %.1f\n", r.episode, r.eval_mean);
        std::fflush(stdout);
    };
    run.result = sac::train(cfg, opt);
    run.seconds = seconds_since(t0);
    const auto model = make_model(cfg);
    env::ChargeEnv env(model, cfg.env);
    run.agent = std::make_unique<sac::SacAgent>(static_cast<int>(env.feature_dim()), cfg.sac, seed);
    sac::load_agent_checkpoint(dir / "checkpoints" / "latest.ckpt", *run.agent, &cfg);
    return run;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria report"};
    std::string config = io::default_config_path().string();
    std::string desk = (io::default_config_path().parent_path() / "desk_config.json").string();
    std::string run_dir = "acceptance_run";
    std::uint64_t seed = 2;
    bool skip_training = false;
    app.add_option("--config", config, "config for criteria 1-8 and 11");
    app.add_option("--desk-config", desk, "config for the desk-scale training run");
    app.add_option("--run-dir", run_dir, "training output; an existing run with the same config is resumed");
    app.add_option("--seed", seed, "training seed");
    app.add_flag("--skip-training", skip_training, "report criteria 9 and 10 as not run");
    CLI11_PARSE(app, argc, argv);

    const auto cfg = io::load_config(config);
    const auto desk_cfg = io::load_config(desk);
    env::ChargeEnv probe(make_model(desk_cfg), desk_cfg.env);

    int failed = 0;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, "lithium conservation", [&] { return lithium_conservation(cfg); });
    report(2, "equilibrium voltage", [&] { return equilibrium_voltage(cfg); });
    report(3, "coulomb-counting SOC", [&] { return coulomb_counting(cfg); });
    report(4, "convergence order", [&] { return convergence_order(cfg); });
    report(5, "gradient validation", [&] { return gradient_validation(desk_cfg, static_cast<int>(probe.feature_dim())); });
    report(6, "squashed-Gaussian normalisation", [&] { return squashed_normalisation(); });
    report(7, "bandit sanity", [&] { return bandit_sanity(); });
    report(8, "goal attainment", [&] { return goal_attainment(desk_cfg); });

    if (skip_training) {
        std::printf("[SKIP]  9 desk-scale training trend: not run\n");
        std::printf("[SKIP] 10 comparative claim: not run\n");
    } else {
        const fs::path dir(run_dir);
        fs::create_directories(dir);
        TrainingRun run;
        bool trained = false;
        report(9, "desk-scale training trend", [&] {
            run = desk_training(desk_cfg, dir, seed);
            trained = true;
            return training_trend(run);
        });
        report(10, "comparative claim", [&] {
            if (!trained) return Outcome{false, "training did not complete"};
            return comparative_claim(run, desk_cfg, dir);
        });
    }
    report(11, "metric consistency", [&] { return metric_consistency(desk_cfg); });

    std::printf("%d criteria failed\n", failed);
    return 0;
}
