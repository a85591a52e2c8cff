#include "agecharge/nn/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace agecharge::nn {

namespace {
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }
}  // namespace

double squash(double u) { return 0.5 * (std::tanh(u) + 1.0); }

double log_squash_jacobian(double u) {
    // 1 - tanh(u)^2 = 4 exp(-2u) / (1 + exp(-2u))^2
    return std::log(0.5) + 2.0 * (std::numbers::ln2 - u - softplus(-2.0 * u));
}

double GaussianPolicyHead::log_std() const { return std::clamp(log_std_raw, log_std_min, log_std_max); }

double GaussianPolicyHead::sigma() const { return std::exp(log_std()); }

double GaussianPolicyHead::log_prob_u(double u) const {
    const double ls = log_std();
    const double z = (u - mu) / std::exp(ls);
    const double normal = -0.5 * z * z - ls - 0.5 * std::log(2.0 * std::numbers::pi);
    return normal - log_squash_jacobian(u);
}

SquashedSample GaussianPolicyHead::sample(double eps) const {
    SquashedSample s;
    s.u = mu + sigma() * eps;
    s.action = squash(s.u);
    s.log_prob = log_prob_u(s.u);
    return s;
}

double GaussianPolicyHead::log_prob(double action) const {
    const double u = std::atanh(2.0 * action - 1.0);
    if (!(action > 0.0 && action < 1.0) || !std::isfinite(u)) return -std::numeric_limits<double>::infinity();
    return log_prob_u(u);
}

}  // namespace agecharge::nn
