#pragma once

namespace agecharge::nn {

struct SquashedSample {
    double u = 0.0;       // pre-squash value mu + sigma * eps
    double action = 0.0;  // (tanh(u) + 1) / 2
    double log_prob = 0.0;
};

double squash(double u);
/// log(d squash / du) = log(0.5 * (1 - tanh(u)^2)), evaluated without cancellation.
double log_squash_jacobian(double u);

/// Diagonal Gaussian on u pushed through squash(). One action dimension.
struct GaussianPolicyHead {
    double mu = 0.0;
    double log_std_raw = 0.0;
    double log_std_min = -20.0;
    double log_std_max = 2.0;

    double log_std() const;
    double sigma() const;
    bool clamped() const { return log_std_raw < log_std_min || log_std_raw > log_std_max; }

    /// Reparameterised draw from a standard-normal eps.
    SquashedSample sample(double eps) const;
    /// Density of u, corrected to a density over the action.
    double log_prob_u(double u) const;
    /// Log density of an action in (0, 1); -inf on the boundary.
    double log_prob(double action) const;
    double mean_action() const { return squash(mu); }
};

}  // namespace agecharge::nn
