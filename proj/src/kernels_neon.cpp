// NEON backend for aarch64. Mirrors the AVX2 file: plain mul+add, no fused
// multiply-add, scalar tail handling.

#include "symnet/kernels.hpp"

#if defined(__aarch64__) || defined(_M_ARM64)

#include <arm_neon.h>

namespace symnet::kernels {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    double res = vaddvq_f64(acc);
    for (; i < n; ++i) res += a[i] * b[i];
    return res;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t vy = vld1q_f64(y + i);
        vy = vaddq_f64(vy, vmulq_f64(va, vld1q_f64(x + i)));
        vst1q_f64(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu_neon(const double* in, double* out, std::size_t n) {
    float64x2_t zero = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        vst1q_f64(out + i, vmaxq_f64(vld1q_f64(in + i), zero));
    for (; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

double sum_sq_neon(const double* a, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(a + i);
        acc = vaddq_f64(acc, vmulq_f64(v, v));
    }
    double res = vaddvq_f64(acc);
    for (; i < n; ++i) res += a[i] * a[i];
    return res;
}

double dist_sq_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
        acc = vaddq_f64(acc, vmulq_f64(d, d));
    }
    double res = vaddvq_f64(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        res += d * d;
    }
    return res;
}

void dense_relu_neon(const double* w, const double* bias, const double* x,
                     std::size_t rows, std::size_t cols, double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double pre = dot_neon(w + r * cols, x, cols) + bias[r];
        v[r] = pre > 0.0 ? pre : 0.0;
    }
}

void dense_pre_neon(const double* w, const double* bias, const double* x,
                    std::size_t rows, std::size_t cols, double* pre) {
    for (std::size_t r = 0; r < rows; ++r)
        pre[r] = dot_neon(w + r * cols, x, cols) + bias[r];
}

}  // namespace

namespace detail {

const Ops& neon_table() {
    static const Ops ops{
        "neon",      dot_neon,     axpy_neon,       relu_neon,
        sum_sq_neon, dist_sq_neon, dense_relu_neon, dense_pre_neon,
    };
    return ops;
}

}  // namespace detail
}  // namespace symnet::kernels

#else
#error "kernels_neon.cpp is aarch64-only"
#endif
