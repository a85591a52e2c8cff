#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "agecharge/nn/adam.hpp"
#include "agecharge/nn/checkpoint.hpp"
#include "agecharge/nn/gaussian.hpp"
#include "agecharge/nn/matrix.hpp"
#include "agecharge/nn/mlp.hpp"
#include "agecharge/sac/config.hpp"
#include "agecharge/sac/replay_buffer.hpp"

namespace agecharge::sac {

struct Batch {
    nn::Matrix s;
    nn::Matrix s2;
    std::vector<double> a;
    std::vector<double> r;
    std::vector<double> done;
    int size() const { return s.rows; }
};

Batch make_batch(const std::vector<Transition>& ts);

struct Losses {
    double J_V = 0.0;
    double J_Q = 0.0;
    double J_pi = 0.0;
};

/// Policy pi_phi, soft Q_theta, soft V_psi and its moving-average target V_psibar.
/// The Q network sees the state features followed by 2a - 1.
class SacAgent {
public:
    SacAgent(int obs_dim, const SacConfig& cfg, std::uint64_t seed);

    /// Losses and gradients for a fixed minibatch and fixed noise draws (one standard
    /// normal per element). Gradients land in the matching network's grads().
    double value_loss(const Batch& b, const std::vector<double>& eps);
    double q_loss(const Batch& b);
    double policy_loss(const Batch& b, const std::vector<double>& eps);

    /// One optimizer step each; the noise is drawn from rng.
    double update_value(const Batch& b, std::mt19937_64& rng);
    double update_q(const Batch& b);
    double update_policy(const Batch& b, std::mt19937_64& rng);
    void soft_update_target();
    void soft_update_target(double tau);
    /// V, Q and policy updates followed by the target update.
    Losses update(const Batch& b, std::mt19937_64& rng);

    nn::GaussianPolicyHead head(const std::vector<double>& features) const;
    /// Sampled action when stochastic, squash(mu) otherwise.
    double act(const std::vector<double>& features, bool stochastic, std::mt19937_64& rng) const;
    double q_value(const std::vector<double>& features, double action) const;

    void save(nn::Checkpoint& c) const;
    void load(const nn::Checkpoint& c);

    int obs_dim() const { return obs_dim_; }
    const SacConfig& config() const { return cfg_; }

    nn::MlpNet policy, q, v, v_target;
    nn::Adam opt_policy, opt_q, opt_v;

private:
    nn::Matrix q_input(const nn::Matrix& s, const std::vector<double>& a) const;
    std::vector<double> draw_noise(int n, std::mt19937_64& rng) const;

    int obs_dim_ = 0;
    SacConfig cfg_;
};

/// One-state bandit with reward -curvature * (a - optimum)^2; every step is terminal.
struct QuadraticBandit {
    double optimum = 0.7;
    double curvature = 1000.0;
    int obs_dim = 2;

    std::vector<double> state() const { return std::vector<double>(static_cast<std::size_t>(obs_dim), 0.5); }
    double reward(double a) const { return -curvature * (a - optimum) * (a - optimum); }
};

/// Uniform random pulls until warmup_transitions are stored, then one stochastic pull per
/// SAC update. Returns the final mean action.
double train_bandit(SacAgent& agent, const QuadraticBandit& bandit, int steps, std::uint64_t seed);

}  // namespace agecharge::sac
