#pragma once

namespace agecharge::nn::kernels {

// Dense layer kernels on row-major buffers. X is n x in, W is out x in, Y and dY are n x out.
// The *_serial variants are the single-threaded reference; the others split work with OpenMP.

/// Y = X W^T + b
void dense_forward_serial(const double* X, const double* W, const double* b, double* Y, int n, int in, int out);
void dense_forward(const double* X, const double* W, const double* b, double* Y, int n, int in, int out);

/// dW += dY^T X, db += column sums of dY
void dense_grad_weights_serial(const double* X, const double* dY, double* dW, double* db, int n, int in, int out);
void dense_grad_weights(const double* X, const double* dY, double* dW, double* db, int n, int in, int out);

/// dX = dY W
void dense_grad_input_serial(const double* dY, const double* W, double* dX, int n, int in, int out);
void dense_grad_input(const double* dY, const double* W, double* dX, int n, int in, int out);

}  // namespace agecharge::nn::kernels
