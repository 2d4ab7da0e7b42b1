#pragma once

#include <cstddef>
#include <string>

// Arithmetic inner loops behind the network layers. Two implementations
// exist for every kernel: a scalar reference and an AVX2+FMA variant,
// selected once at startup from CPUID (override with SIMENH_BACKEND=scalar
// or =avx2, or set_backend()).
//
// The two variants are bit-identical, not merely close: both perform the
// same per-element operation sequence (explicit fma, fixed four-lane
// reduction splits), so backend choice never changes a result. The
// equivalence tests assert exact equality, and seeded runs reproduce
// bit-for-bit regardless of dispatch.

namespace simenh::kernels {

enum class Backend { scalar, avx2 };

// True when the CPU (and this build) can run the AVX2+FMA variants.
bool avx2_available();

Backend active_backend();

// Throws ValidationError when the requested backend is unavailable.
void set_backend(Backend backend);

std::string backend_name(Backend backend);

// C[m x n] = A[m x k] * B[k x n], all row-major.
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n);

// C[m x n] = A[m x k] * B[n x k]^T  (dot products of A rows with B rows).
// Reduction order: four-lane split over k, lanes combined as
// (l0 + l2) + (l1 + l3), then the tail accumulated sequentially.
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);

// C[k x n] = A[m x k]^T * B[m x n].
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);

// 1-D valid convolution over a single-channel series, position-major output:
//   y[b, p*filters + f] = bias[f] + sum_w x[b, p*stride + w] * k[w*filters + f]
// for p in [0, (length - window) / stride]. Weights are row-major
// (window x filters).
void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters);

// In-place Adam update over n elements. bc1/bc2 are the bias corrections
// 1 - beta1^t and 1 - beta2^t, computed once by the caller.
void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2);

// Per-backend entry points, exposed for the equivalence tests.
namespace scalar {
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters);
void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2);
}  // namespace scalar

namespace avx2 {
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n);
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n);
void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters);
void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2);
}  // namespace avx2

}  // namespace simenh::kernels
