// AVX2+FMA kernel variants. Compiled with -mavx2 -mfma; only reached when
// the dispatcher has verified CPU support. Every loop performs the same
// per-element operation sequence as the scalar reference so results match
// bit for bit.

#ifdef SIMENH_HAVE_AVX2_BUILD

#include <immintrin.h>

#include <cmath>
#include <cstddef>

#include "simenh/kernels/kernels.hpp"

namespace simenh::kernels::avx2 {

void matmul_nn(const double* a, const double* b, double* c, int m, int k, int n) {
    const int n4 = n & ~3;
    // k = 0 initializes C, later k accumulate.
    for (int i = 0; i < m; ++i) {
        const __m256d ai0 = _mm256_set1_pd(a[static_cast<std::size_t>(i) * k]);
        double* ci = c + static_cast<std::size_t>(i) * n;
        int j = 0;
        for (; j < n4; j += 4) _mm256_storeu_pd(ci + j, _mm256_mul_pd(ai0, _mm256_loadu_pd(b + j)));
        const double a0 = a[static_cast<std::size_t>(i) * k];
        for (; j < n; ++j) ci[j] = a0 * b[j];
    }
    for (int kk = 1; kk < k; ++kk) {
        const double* bk = b + static_cast<std::size_t>(kk) * n;
        for (int i = 0; i < m; ++i) {
            const double aik = a[static_cast<std::size_t>(i) * k + kk];
            const __m256d av = _mm256_set1_pd(aik);
            double* ci = c + static_cast<std::size_t>(i) * n;
            int j = 0;
            for (; j < n4; j += 4) {
                __m256d cv = _mm256_loadu_pd(ci + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(bk + j), cv);
                _mm256_storeu_pd(ci + j, cv);
            }
            for (; j < n; ++j) ci[j] = std::fma(aik, bk[j], ci[j]);
        }
    }
}

namespace {

inline double hsum_lanes(__m256d acc) {
    // (l0 + l2) + (l1 + l3); the scalar reference combines in the same order.
    const __m128d lo = _mm256_castpd256_pd128(acc);
    const __m128d hi = _mm256_extractf128_pd(acc, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    const __m128d swapped = _mm_unpackhi_pd(pair, pair);
    return _mm_cvtsd_f64(_mm_add_sd(pair, swapped));
}

}  // namespace

void matmul_nt(const double* a, const double* b, double* c, int m, int k, int n) {
    const int k4 = k & ~3;
    for (int j = 0; j < n; ++j) {
        const double* bj = b + static_cast<std::size_t>(j) * k;
        for (int i = 0; i < m; ++i) {
            const double* ai = a + static_cast<std::size_t>(i) * k;
            __m256d acc = _mm256_setzero_pd();
            for (int kk = 0; kk < k4; kk += 4)
                acc = _mm256_fmadd_pd(_mm256_loadu_pd(ai + kk), _mm256_loadu_pd(bj + kk), acc);
            double sum = hsum_lanes(acc);
            for (int kk = k4; kk < k; ++kk) sum = std::fma(ai[kk], bj[kk], sum);
            c[static_cast<std::size_t>(i) * n + j] = sum;
        }
    }
}

void matmul_tn(const double* a, const double* b, double* c, int m, int k, int n) {
    const int n4 = n & ~3;
    for (int i = 0; i < k; ++i) {
        double* ci = c + static_cast<std::size_t>(i) * n;
        const double a0i = a[i];
        const __m256d a0v = _mm256_set1_pd(a0i);
        int j = 0;
        for (; j < n4; j += 4) _mm256_storeu_pd(ci + j, _mm256_mul_pd(a0v, _mm256_loadu_pd(b + j)));
        for (; j < n; ++j) ci[j] = a0i * b[j];
        for (int bb = 1; bb < m; ++bb) {
            const double abi = a[static_cast<std::size_t>(bb) * k + i];
            const __m256d av = _mm256_set1_pd(abi);
            const double* brow = b + static_cast<std::size_t>(bb) * n;
            j = 0;
            for (; j < n4; j += 4) {
                __m256d cv = _mm256_loadu_pd(ci + j);
                cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
                _mm256_storeu_pd(ci + j, cv);
            }
            for (; j < n; ++j) ci[j] = std::fma(abi, brow[j], ci[j]);
        }
    }
}

void conv1d_forward(const double* x, const double* weights, const double* bias, double* y,
                    int batch, int length, int window, int stride, int filters) {
    const int positions = (length - window) / stride + 1;
    const int f4 = filters & ~3;
    const std::size_t out_width = static_cast<std::size_t>(positions) * filters;
    for (int b = 0; b < batch; ++b) {
        const double* xb = x + static_cast<std::size_t>(b) * length;
        double* yb = y + static_cast<std::size_t>(b) * out_width;
        for (int p = 0; p < positions; ++p) {
            const double* base = xb + static_cast<std::size_t>(p) * stride;
            double* out = yb + static_cast<std::size_t>(p) * filters;
            int f = 0;
            for (; f < f4; f += 4) {
                __m256d acc = _mm256_loadu_pd(bias + f);
                for (int w = 0; w < window; ++w) {
                    const __m256d xv = _mm256_set1_pd(base[w]);
                    const __m256d kv = _mm256_loadu_pd(weights + static_cast<std::size_t>(w) * filters + f);
                    acc = _mm256_fmadd_pd(xv, kv, acc);
                }
                _mm256_storeu_pd(out + f, acc);
            }
            for (; f < filters; ++f) {
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
    const std::size_t n4 = n & ~static_cast<std::size_t>(3);
    const __m256d b1 = _mm256_set1_pd(beta1);
    const __m256d b2 = _mm256_set1_pd(beta2);
    const __m256d omb1 = _mm256_set1_pd(1.0 - beta1);
    const __m256d omb2 = _mm256_set1_pd(1.0 - beta2);
    const __m256d bc1v = _mm256_set1_pd(bc1);
    const __m256d bc2v = _mm256_set1_pd(bc2);
    const __m256d epsv = _mm256_set1_pd(eps);
    const __m256d lrv = _mm256_set1_pd(lr);
    std::size_t i = 0;
    for (; i < n4; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        __m256d mv = _mm256_loadu_pd(m + i);
        __m256d vv = _mm256_loadu_pd(v + i);
        mv = _mm256_fmadd_pd(b1, mv, _mm256_mul_pd(omb1, g));
        vv = _mm256_fmadd_pd(b2, vv, _mm256_mul_pd(omb2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mv);
        _mm256_storeu_pd(v + i, vv);
        const __m256d mhat = _mm256_div_pd(mv, bc1v);
        const __m256d vhat = _mm256_div_pd(vv, bc2v);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), epsv);
        const __m256d step = _mm256_mul_pd(lrv, _mm256_div_pd(mhat, denom));
        _mm256_storeu_pd(param + i, _mm256_sub_pd(_mm256_loadu_pd(param + i), step));
    }
    const double omb1s = 1.0 - beta1;
    const double omb2s = 1.0 - beta2;
    for (; i < n; ++i) {
        const double g = grad[i];
        m[i] = std::fma(beta1, m[i], omb1s * g);
        v[i] = std::fma(beta2, v[i], omb2s * (g * g));
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        param[i] = param[i] - lr * (mhat / (std::sqrt(vhat) + eps));
    }
}

}  // namespace simenh::kernels::avx2

#endif  // SIMENH_HAVE_AVX2_BUILD
