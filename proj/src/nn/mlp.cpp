#include "agecharge/nn/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "agecharge/common/errors.hpp"
#include "agecharge/nn/kernels.hpp"

namespace agecharge::nn {

MlpNet::MlpNet(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    if (sizes_.size() < 2) throw ShapeError("MlpNet needs at least an input and an output size");
    std::size_t off = 0;
    for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
        if (sizes_[l] < 1 || sizes_[l + 1] < 1) throw ShapeError("MlpNet layer sizes must be positive");
        offsets_.push_back(off);
        off += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1] + sizes_[l + 1];
    }
    params_.assign(off, 0.0);
    grads_.assign(off, 0.0);
}

void MlpNet::init_uniform(std::mt19937_64& rng, double last_scale) {
    for (int l = 0; l < n_layers(); ++l) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(sizes_[l]));
        std::uniform_real_distribution<double> U(-bound, bound);
        const double scale = l + 1 == n_layers() ? last_scale : 1.0;
        const std::size_t end = bias_offset(l) + sizes_[l + 1];
        for (std::size_t i = offsets_[l]; i < end; ++i) params_[i] = scale * U(rng);
    }
}

Matrix MlpNet::run(const Matrix& x, std::vector<Matrix>* acts) const {
    if (x.cols != n_in()) {
        throw ShapeError("MlpNet input has " + std::to_string(x.cols) + " columns, expected " + std::to_string(n_in()));
    }
    auto fwd = serial_ ? kernels::dense_forward_serial : kernels::dense_forward;
    if (acts) acts->clear();
    Matrix a = x;
    for (int l = 0; l < n_layers(); ++l) {
        const int in = sizes_[l], out = sizes_[l + 1];
        Matrix z(a.rows, out);
        fwd(a.data(), params_.data() + offsets_[l], params_.data() + bias_offset(l), z.data(), a.rows, in, out);
        if (acts) acts->push_back(std::move(a));
        if (l + 1 < n_layers()) {
            if (acts) acts->push_back(z);  // pre-activation, for the ReLU mask
            for (double& v : z.v) v = std::max(v, 0.0);
        }
        a = std::move(z);
    }
    return a;
}

Matrix MlpNet::forward(const Matrix& x) { return run(x, &acts_); }

Matrix MlpNet::predict(const Matrix& x) const { return run(x, nullptr); }

std::vector<double> MlpNet::predict(const std::vector<double>& x) const {
    Matrix m(1, static_cast<int>(x.size()));
    m.v = x;
    return run(m, nullptr).v;
}

Matrix MlpNet::backward(const Matrix& dy) {
    if (acts_.empty()) throw std::logic_error("MlpNet::backward called without a cached forward pass");
    const int n = acts_.front().rows;
    if (dy.rows != n || dy.cols != n_out()) throw ShapeError("MlpNet::backward gradient shape mismatch");
    auto gw = serial_ ? kernels::dense_grad_weights_serial : kernels::dense_grad_weights;
    auto gx = serial_ ? kernels::dense_grad_input_serial : kernels::dense_grad_input;

    Matrix g = dy;
    for (int l = n_layers() - 1; l >= 0; --l) {
        // acts_ = [a0, z0, a1, z1, ..., a_{L-1}]
        const Matrix& input = acts_[2 * l];
        const int in = sizes_[l], out = sizes_[l + 1];
        gw(input.data(), g.data(), grads_.data() + offsets_[l], grads_.data() + bias_offset(l), n, in, out);
        Matrix dx(n, in);
        gx(g.data(), params_.data() + offsets_[l], dx.data(), n, in, out);
        if (l > 0) {
            const Matrix& z = acts_[2 * l - 1];
            for (std::size_t i = 0; i < dx.v.size(); ++i) {
                if (z.v[i] <= 0.0) dx.v[i] = 0.0;
            }
        }
        g = std::move(dx);
    }
    return g;
}

void MlpNet::zero_grad() { std::fill(grads_.begin(), grads_.end(), 0.0); }

double MlpNet::min_abs_preactivation() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < acts_.size(); i += 2) {
        for (double v : acts_[i].v) m = std::min(m, std::abs(v));
    }
    return m;
}

std::vector<bool> MlpNet::relu_pattern() const {
    std::vector<bool> p;
    for (std::size_t i = 1; i < acts_.size(); i += 2) {
        for (double v : acts_[i].v) p.push_back(v > 0.0);
    }
    return p;
}

}  // namespace agecharge::nn
