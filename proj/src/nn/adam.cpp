#include "agecharge/nn/adam.hpp"

#include <cmath>
#include <string>

#include "agecharge/common/errors.hpp"

namespace agecharge::nn {

Adam::Adam(std::size_t n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(n, 0.0), v_(n, 0.0) {}

void Adam::step(std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("Adam: expected " + std::to_string(m_.size()) + " parameters, got " +
                         std::to_string(params.size()) + " params and " + std::to_string(grads.size()) + " grads");
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericalError("Adam: non-finite gradient " + std::to_string(grads[i]) + " at index " +
                                 std::to_string(i) + " of " + std::to_string(grads.size()));
        }
    }
    ++t_;
    const double c1 = 1.0 - std::pow(b1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2_, static_cast<double>(t_));
    for (std::size_t i = 0; i < grads.size(); ++i) {
        const double g = grads[i];
        m_[i] = b1_ * m_[i] + (1.0 - b1_) * g;
        v_[i] = b2_ * v_[i] + (1.0 - b2_) * g * g;
        params[i] -= lr_ * (m_[i] / c1) / (std::sqrt(v_[i] / c2) + eps_);
    }
}

}  // namespace agecharge::nn
