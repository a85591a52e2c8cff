#include "agecharge/nn/kernels.hpp"

#include <algorithm>
#include <cstddef>

namespace agecharge::nn::kernels {

namespace {
// multiply-adds below which the kernels stay on one thread
constexpr long kParallelWork = 1L << 15;

inline void forward_row(const double* x, const double* W, const double* b, double* y, int in, int out) {
    for (int o = 0; o < out; ++o) {
        const double* w = W + static_cast<std::size_t>(o) * in;
        double s = b[o];
        for (int k = 0; k < in; ++k) s += x[k] * w[k];
        y[o] = s;
    }
}

inline void grad_weight_row(const double* X, const double* dY, double* dW, double* db, int n, int in, int out,
                            int o) {
    double* w = dW + static_cast<std::size_t>(o) * in;
    double sb = 0.0;
    for (int i = 0; i < n; ++i) {
        const double g = dY[static_cast<std::size_t>(i) * out + o];
        if (g == 0.0) continue;
        sb += g;
        const double* x = X + static_cast<std::size_t>(i) * in;
        for (int k = 0; k < in; ++k) w[k] += g * x[k];
    }
    db[o] += sb;
}

inline void grad_input_row(const double* dy, const double* W, double* dx, int in, int out) {
    std::fill(dx, dx + in, 0.0);
    for (int o = 0; o < out; ++o) {
        const double g = dy[o];
        if (g == 0.0) continue;
        const double* w = W + static_cast<std::size_t>(o) * in;
        for (int k = 0; k < in; ++k) dx[k] += g * w[k];
    }
}
}  // namespace

void dense_forward_serial(const double* X, const double* W, const double* b, double* Y, int n, int in, int out) {
    for (int i = 0; i < n; ++i) {
        forward_row(X + static_cast<std::size_t>(i) * in, W, b, Y + static_cast<std::size_t>(i) * out, in, out);
    }
}

void dense_forward(const double* X, const double* W, const double* b, double* Y, int n, int in, int out) {
    const long work = static_cast<long>(n) * in * out;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int i = 0; i < n; ++i) {
        forward_row(X + static_cast<std::size_t>(i) * in, W, b, Y + static_cast<std::size_t>(i) * out, in, out);
    }
}

void dense_grad_weights_serial(const double* X, const double* dY, double* dW, double* db, int n, int in, int out) {
    for (int o = 0; o < out; ++o) grad_weight_row(X, dY, dW, db, n, in, out, o);
}

void dense_grad_weights(const double* X, const double* dY, double* dW, double* db, int n, int in, int out) {
    const long work = static_cast<long>(n) * in * out;
    // threads own disjoint rows of dW
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int o = 0; o < out; ++o) grad_weight_row(X, dY, dW, db, n, in, out, o);
}

void dense_grad_input_serial(const double* dY, const double* W, double* dX, int n, int in, int out) {
    for (int i = 0; i < n; ++i) {
        grad_input_row(dY + static_cast<std::size_t>(i) * out, W, dX + static_cast<std::size_t>(i) * in, in, out);
    }
}

void dense_grad_input(const double* dY, const double* W, double* dX, int n, int in, int out) {
    const long work = static_cast<long>(n) * in * out;
#pragma omp parallel for schedule(static) if (work > kParallelWork)
    for (int i = 0; i < n; ++i) {
        grad_input_row(dY + static_cast<std::size_t>(i) * out, W, dX + static_cast<std::size_t>(i) * in, in, out);
    }
}

}  // namespace agecharge::nn::kernels
