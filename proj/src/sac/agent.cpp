#include "agecharge/sac/agent.hpp"

#include <cmath>
#include <string>

#include "agecharge/common/errors.hpp"
#include "agecharge/common/seed.hpp"

namespace agecharge::sac {

namespace {

std::vector<int> layer_sizes(int in, const SacConfig& cfg, int out) {
    std::vector<int> s{in};
    for (int l = 0; l < cfg.hidden_layers; ++l) s.push_back(cfg.hidden_width);
    s.push_back(out);
    return s;
}

void require_finite(double loss, const char* name) {
    if (!std::isfinite(loss)) throw NumericalError(std::string(name) + " loss is not finite: " + std::to_string(loss));
}

}  // namespace

Batch make_batch(const std::vector<Transition>& ts) {
    if (ts.empty()) throw std::invalid_argument("make_batch needs at least one transition");
    const int n = static_cast<int>(ts.size());
    const int d = static_cast<int>(ts.front().s.size());
    Batch b;
    b.s = nn::Matrix(n, d);
    b.s2 = nn::Matrix(n, d);
    b.a.resize(n);
    b.r.resize(n);
    b.done.resize(n);
    for (int i = 0; i < n; ++i) {
        const auto& t = ts[i];
        if (static_cast<int>(t.s.size()) != d || static_cast<int>(t.s2.size()) != d) {
            throw ShapeError("make_batch: transitions disagree on the state dimension");
        }
        std::copy(t.s.begin(), t.s.end(), b.s.row(i));
        std::copy(t.s2.begin(), t.s2.end(), b.s2.row(i));
        b.a[i] = t.a;
        b.r[i] = t.r;
        b.done[i] = t.done ? 1.0 : 0.0;
    }
    return b;
}

SacAgent::SacAgent(int obs_dim, const SacConfig& cfg, std::uint64_t seed)
    : policy(layer_sizes(obs_dim, cfg, 2)),
      q(layer_sizes(obs_dim + 1, cfg, 1)),
      v(layer_sizes(obs_dim, cfg, 1)),
      v_target(layer_sizes(obs_dim, cfg, 1)),
      obs_dim_(obs_dim),
      cfg_(cfg) {
    cfg_.validate();
    std::mt19937_64 rng(derive_seed(seed, "init"));
    policy.init_uniform(rng, 0.01);
    q.init_uniform(rng);
    v.init_uniform(rng);
    v_target.params() = v.params();
    opt_policy = nn::Adam(policy.n_params(), cfg_.learning_rate);
    opt_q = nn::Adam(q.n_params(), cfg_.learning_rate);
    opt_v = nn::Adam(v.n_params(), cfg_.learning_rate);
}

nn::Matrix SacAgent::q_input(const nn::Matrix& s, const std::vector<double>& a) const {
    nn::Matrix x(s.rows, obs_dim_ + 1);
    for (int i = 0; i < s.rows; ++i) {
        std::copy(s.row(i), s.row(i) + obs_dim_, x.row(i));
        x(i, obs_dim_) = 2.0 * a[i] - 1.0;
    }
    return x;
}

std::vector<double> SacAgent::draw_noise(int n, std::mt19937_64& rng) const {
    std::normal_distribution<double> N(0.0, 1.0);
    std::vector<double> eps(n);
    for (auto& e : eps) e = N(rng);
    return eps;
}

nn::GaussianPolicyHead SacAgent::head(const std::vector<double>& features) const {
    const auto out = policy.predict(features);
    return {out[0], out[1], cfg_.log_std_min, cfg_.log_std_max};
}

double SacAgent::act(const std::vector<double>& features, bool stochastic, std::mt19937_64& rng) const {
    const auto h = head(features);
    if (!stochastic) return h.mean_action();
    std::normal_distribution<double> N(0.0, 1.0);
    return h.sample(N(rng)).action;
}

double SacAgent::q_value(const std::vector<double>& features, double action) const {
    nn::Matrix s(1, obs_dim_);
    s.v = features;
    return q.predict(q_input(s, {action})).v[0];
}

double SacAgent::value_loss(const Batch& b, const std::vector<double>& eps) {
    const int n = b.size();
    const auto P = policy.predict(b.s);
    std::vector<double> a(n), logp(n);
    for (int i = 0; i < n; ++i) {
        const nn::GaussianPolicyHead h{P(i, 0), P(i, 1), cfg_.log_std_min, cfg_.log_std_max};
        const auto smp = h.sample(eps[i]);
        a[i] = smp.action;
        logp[i] = smp.log_prob;
    }
    const auto Q = q.predict(q_input(b.s, a));
    const auto V = v.forward(b.s);
    nn::Matrix dy(n, 1);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double res = V.v[i] - (Q.v[i] - cfg_.entropy_scale * logp[i]);
        loss += 0.5 * res * res;
        dy.v[i] = res / n;
    }
    v.zero_grad();
    v.backward(dy);
    return loss / n;
}

double SacAgent::q_loss(const Batch& b) {
    const int n = b.size();
    const auto V2 = v_target.predict(b.s2);
    const auto Q = q.forward(q_input(b.s, b.a));
    nn::Matrix dy(n, 1);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double target = b.r[i] + cfg_.gamma * (1.0 - b.done[i]) * V2.v[i];
        const double res = Q.v[i] - target;
        loss += 0.5 * res * res;
        dy.v[i] = res / n;
    }
    q.zero_grad();
    q.backward(dy);
    return loss / n;
}

double SacAgent::policy_loss(const Batch& b, const std::vector<double>& eps) {
    const int n = b.size();
    const double alpha = cfg_.entropy_scale;
    const auto P = policy.forward(b.s);
    std::vector<double> a(n), logp(n), u(n), sig(n);
    std::vector<char> clamped(n);
    for (int i = 0; i < n; ++i) {
        const nn::GaussianPolicyHead h{P(i, 0), P(i, 1), cfg_.log_std_min, cfg_.log_std_max};
        const auto smp = h.sample(eps[i]);
        a[i] = smp.action;
        logp[i] = smp.log_prob;
        u[i] = smp.u;
        sig[i] = h.sigma();
        clamped[i] = h.clamped();
    }

    // dQ/da through the Q network's input gradient
    const auto Q = q.forward(q_input(b.s, a));
    const auto dx = q.backward(nn::Matrix(n, 1, 1.0));
    q.zero_grad();

    nn::Matrix dP(n, 2);
    double loss = 0.0;
    for (int i = 0; i < n; ++i) {
        loss += alpha * logp[i] - Q.v[i];
        const double th = std::tanh(u[i]);
        const double dq_du = 2.0 * dx(i, obs_dim_) * 0.5 * (1.0 - th * th);
        const double se = sig[i] * eps[i];
        // log pi = -eps^2/2 - log_std - log(2 pi)/2 - log(0.5 (1 - tanh(u)^2)), u = mu + sigma eps
        dP(i, 0) = (alpha * 2.0 * th - dq_du) / n;
        dP(i, 1) = clamped[i] ? 0.0 : (alpha * (-1.0 + 2.0 * th * se) - dq_du * se) / n;
    }
    policy.zero_grad();
    policy.backward(dP);
    return loss / n;
}

double SacAgent::update_value(const Batch& b, std::mt19937_64& rng) {
    const double loss = value_loss(b, draw_noise(b.size(), rng));
    require_finite(loss, "value");
    opt_v.step(v.params(), v.grads());
    return loss;
}

double SacAgent::update_q(const Batch& b) {
    const double loss = q_loss(b);
    require_finite(loss, "Q");
    opt_q.step(q.params(), q.grads());
    return loss;
}

double SacAgent::update_policy(const Batch& b, std::mt19937_64& rng) {
    const double loss = policy_loss(b, draw_noise(b.size(), rng));
    require_finite(loss, "policy");
    opt_policy.step(policy.params(), policy.grads());
    return loss;
}

void SacAgent::soft_update_target() { soft_update_target(cfg_.tau); }

void SacAgent::soft_update_target(double tau) {
    auto& t = v_target.params();
    const auto& p = v.params();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = (1.0 - tau) * t[i] + tau * p[i];
}

Losses SacAgent::update(const Batch& b, std::mt19937_64& rng) {
    Losses l;
    l.J_V = update_value(b, rng);
    l.J_Q = update_q(b);
    l.J_pi = update_policy(b, rng);
    soft_update_target();
    return l;
}

void SacAgent::save(nn::Checkpoint& c) const {
    c.meta["obs_dim"] = obs_dim_;
    c.add_net("policy", policy);
    c.add_net("q", q);
    c.add_net("v", v);
    c.add_net("v_target", v_target);
    c.add_adam("opt_policy", opt_policy);
    c.add_adam("opt_q", opt_q);
    c.add_adam("opt_v", opt_v);
}

void SacAgent::load(const nn::Checkpoint& c) {
    if (c.meta.value("obs_dim", -1) != obs_dim_) {
        throw ShapeError("checkpoint observation size " + std::to_string(c.meta.value("obs_dim", -1)) +
                         " does not match " + std::to_string(obs_dim_));
    }
    c.load_net("policy", policy);
    c.load_net("q", q);
    c.load_net("v", v);
    c.load_net("v_target", v_target);
    if (c.has("opt_policy.m")) {
        c.load_adam("opt_policy", opt_policy);
        c.load_adam("opt_q", opt_q);
        c.load_adam("opt_v", opt_v);
    }
}

double train_bandit(SacAgent& agent, const QuadraticBandit& bandit, int steps, std::uint64_t seed) {
    ReplayBuffer buf(static_cast<std::size_t>(std::max(steps, agent.config().batch_size)));
    std::mt19937_64 rng(derive_seed(seed, "bandit"));
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto s = bandit.state();
    const auto warmup = std::max(agent.config().warmup_transitions, static_cast<std::size_t>(agent.config().batch_size));
    for (int k = 0; k < steps; ++k) {
        Transition t;
        t.s = s;
        t.s2 = s;
        t.a = buf.total_pushed() < warmup ? U(rng) : agent.act(s, true, rng);
        t.r = bandit.reward(t.a);
        t.done = true;
        t.step = k;
        buf.push(std::move(t));
        if (buf.total_pushed() >= warmup) {
            agent.update(make_batch(buf.sample(agent.config().batch_size, rng)), rng);
        }
    }
    return agent.head(s).mean_action();
}

}  // namespace agecharge::sac
