#pragma once

#include <cstddef>
#include <vector>

namespace agecharge::nn {

/// Adam optimizer state for one flat parameter vector.
class Adam {
public:
    Adam() = default;
    Adam(std::size_t n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

    /// params -= lr * mhat / (sqrt(vhat) + eps). Throws NumericalError naming the first
    /// non-finite gradient entry; params and moments are untouched in that case.
    void step(std::vector<double>& params, const std::vector<double>& grads);

    double learning_rate() const { return lr_; }
    void set_learning_rate(double lr) { lr_ = lr; }
    long long steps() const { return t_; }
    std::vector<double>& m() { return m_; }
    std::vector<double>& v() { return v_; }
    const std::vector<double>& m() const { return m_; }
    const std::vector<double>& v() const { return v_; }
    void set_steps(long long t) { t_ = t; }

private:
    double lr_ = 1e-4, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
    long long t_ = 0;
    std::vector<double> m_, v_;
};

}  // namespace agecharge::nn
