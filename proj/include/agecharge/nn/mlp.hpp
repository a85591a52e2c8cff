#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "agecharge/nn/matrix.hpp"

namespace agecharge::nn {

/// Fully connected network, ReLU on hidden layers, linear output. Parameters live in one
/// flat vector: for each layer the weight matrix (out x in, row-major) then the bias.
class MlpNet {
public:
    MlpNet() = default;
    /// sizes = {input, hidden..., output}; parameters start at zero.
    explicit MlpNet(std::vector<int> sizes);

    /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) on every layer; the last layer is then
    /// multiplied by last_scale.
    void init_uniform(std::mt19937_64& rng, double last_scale = 1.0);

    /// Forward pass that keeps the activations for backward().
    Matrix forward(const Matrix& x);
    /// Forward pass without touching the cache.
    Matrix predict(const Matrix& x) const;
    std::vector<double> predict(const std::vector<double>& x) const;

    /// Accumulates d loss / d params into grads() from d loss / d output of the last
    /// forward() and returns d loss / d input. Throws std::logic_error without a cache.
    Matrix backward(const Matrix& dy);

    void zero_grad();
    std::vector<double>& params() { return params_; }
    const std::vector<double>& params() const { return params_; }
    std::vector<double>& grads() { return grads_; }
    const std::vector<double>& grads() const { return grads_; }

    const std::vector<int>& sizes() const { return sizes_; }
    int n_in() const { return sizes_.front(); }
    int n_out() const { return sizes_.back(); }
    int n_layers() const { return static_cast<int>(sizes_.size()) - 1; }
    std::size_t n_params() const { return params_.size(); }
    std::size_t weight_offset(int layer) const { return offsets_[layer]; }
    std::size_t bias_offset(int layer) const {
        return offsets_[layer] + static_cast<std::size_t>(sizes_[layer]) * sizes_[layer + 1];
    }

    /// Use the single-threaded reference kernels instead of the OpenMP ones.
    void set_serial(bool serial) { serial_ = serial; }

    /// Smallest |pre-activation| seen by any hidden unit in the last forward(); used to
    /// skip finite-difference checks that straddle a ReLU kink.
    double min_abs_preactivation() const;
    /// Sign of every hidden pre-activation in the last forward(), in cache order.
    std::vector<bool> relu_pattern() const;

private:
    Matrix run(const Matrix& x, std::vector<Matrix>* acts) const;

    std::vector<int> sizes_;
    std::vector<std::size_t> offsets_;
    std::vector<double> params_;
    std::vector<double> grads_;
    std::vector<Matrix> acts_;  // layer inputs interleaved with hidden pre-activations
    bool serial_ = false;
};

}  // namespace agecharge::nn
