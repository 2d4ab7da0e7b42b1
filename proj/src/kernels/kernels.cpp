#include "simenh/kernels/kernels.hpp"

#include <cmath>
#include <cstdlib>

#include "simenh/common/error.hpp"

namespace simenh::kernels {

namespace scalar {

void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    // k-outer so B streams through once while the C block stays cached.
    for (int i = 0; i < m; ++i) {
        const double ai0 = a[static_cast<std::size_t>(i) * k];
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) ci[j] = ai0 * b[j];
    }
    for (int kk = 1; kk < k; ++kk) {
        const double* bk = b + static_cast<std::size_t>(kk) * n;
        for (int i = 0; i < m; ++i) {
            const double aik = a[static_cast<std::size_t>(i) * k + kk];
            double* ci = c + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) ci[j] = std::fma(aik, bk[j], ci[j]);
        }
    }
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    const int k4 = k & ~3;
    for (int j = 0; j < n; ++j) {
        const double* bj = b + static_cast<std::size_t>(j) * k;
        for (int i = 0; i < m; ++i) {
            const double* ai = a + static_cast<std::size_t>(i) * k;
            // Four-lane split; combine order mirrors the AVX2 horizontal sum.
            double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0;
            for (int kk = 0; kk < k4; kk += 4) {
                l0 = std::fma(ai[kk + 0], bj[kk + 0], l0);
                l1 = std::fma(ai[kk + 1], bj[kk + 1], l1);
                l2 = std::fma(ai[kk + 2], bj[kk + 2], l2);
                l3 = std::fma(ai[kk + 3], bj[kk + 3], l3);
            }
            double sum = (l0 + l2) + (l1 + l3);
            for (int kk = k4; kk < k; ++kk) sum = std::fma(ai[kk], bj[kk], sum);
            c[static_cast<std::size_t>(i) * n + j] = sum;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < k; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        const double a0i = a[i];
        for (int j = 0; j < n; ++j) ci[j] = a0i * b[j];
        for (int bb = 1; bb < m; ++bb) {
            const double abi = a[static_cast<std::size_t>(bb) * k + i];
            const double* brow = b + static_cast<std::size_t>(bb) * n;
            for (int j = 0; j < n; ++j) ci[j] = std::fma(abi, brow[j], ci[j]);
        }
    }
}

void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters) {
    const int positions = (length - window) / stride + 1;
    const std::size_t out_width = static_cast<std::size_t>(positions) * filters;
    for (int b = 0; b < batch; ++b) {
        const double* xb = x + static_cast<std::size_t>(b) * length;
        double* yb = y + static_cast<std::size_t>(b) * out_width;
        for (int p = 0; p < positions; ++p) {
            const double* base = xb + static_cast<std::size_t>(p) * stride;
            double* out = yb + static_cast<std::size_t>(p) * filters;
            for (int f = 0; f < filters; ++f) {
                double acc = bias[f];
                for (int w = 0; w < window; ++w)
                    acc = std::fma(base[w], weights[static_cast<std::size_t>(w) * filters + f], acc);
                out[f] = acc;
            }
        }
    }
}

void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    const double one_minus_b1 = 1.0 - beta1;
    const double one_minus_b2 = 1.0 - beta2;
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = std::fma(beta1, m[i], one_minus_b1 * g);
        v[i] = std::fma(beta2, v[i], one_minus_b2 * (g * g));
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] = param[i] - lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace scalar

#ifndef SIMENH_HAVE_AVX2_BUILD
namespace avx2 {
// Build had no AVX2 support; these stubs are never dispatched to.
void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    scalar::matmul_nn(a, b, c, m, k, n);
}
void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    scalar::matmul_nt(a, b, c, m, k, n);
}
void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    scalar::matmul_tn(a, b, c, m, k, n);
}
void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters) {
    scalar::conv1d_forward(x, weights, bias, y, batch, length, window, stride, filters);
}
void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    scalar::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}
}  // namespace avx2
#endif

bool avx2_available() {
#ifdef SIMENH_HAVE_AVX2_BUILD
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Backend initial_backend() {
    if (const char* env = std::getenv("SIMENH_BACKEND")) {
        std::string v(env);
        if (v == "scalar") return Backend::scalar;
        if (v == "avx2") {
            if (!avx2_available())
                throw ValidationError("SIMENH_BACKEND=avx2 requested but AVX2+FMA is unavailable");
            return Backend::avx2;
        }
        if (!v.empty() && v != "auto")
            throw ValidationError("unknown SIMENH_BACKEND value '" + v + "' (use scalar|avx2|auto)");
    }
    return avx2_available() ? Backend::avx2 : Backend::scalar;
}

Backend& backend_slot() {
    static Backend backend = initial_backend();
    return backend;
}

}  // namespace

Backend active_backend() { return backend_slot(); }

void set_backend(Backend backend) {
    if (backend == Backend::avx2 && !avx2_available())
        throw ValidationError("AVX2 backend requested but AVX2+FMA is unavailable on this CPU");
    backend_slot() = backend;
}

std::string backend_name(Backend backend) {
    return backend == Backend::avx2 ? "avx2" : "scalar";
}

void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    if (active_backend() == Backend::avx2)
        avx2::matmul_nn(a, b, c, m, k, n);
    else
        scalar::matmul_nn(a, b, c, m, k, n);
}

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    if (active_backend() == Backend::avx2)
        avx2::matmul_nt(a, b, c, m, k, n);
    else
        scalar::matmul_nt(a, b, c, m, k, n);
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    if (active_backend() == Backend::avx2)
        avx2::matmul_tn(a, b, c, m, k, n);
    else
        scalar::matmul_tn(a, b, c, m, k, n);
}

void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters) {
    if (active_backend() == Backend::avx2)
        avx2::conv1d_forward(x, weights, bias, y, batch, length, window, stride, filters);
    else
        scalar::conv1d_forward(x, weights, bias, y, batch, length, window, stride, filters);
}

void adam_update(double* param, const double* grad, double* m, double* v, std::size_t n,
                 double lr, double beta1, double beta2, double eps, double bc1, double bc2) {
    if (active_backend() == Backend::avx2)
        avx2::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
    else
        scalar::adam_update(param, grad, m, v, n, lr, beta1, beta2, eps, bc1, bc2);
}

}  // namespace simenh::kernels
