// AVX2 backend. Compiled with -mavx2 only on x86_64; runtime CPU detection
// lives in kernels_dispatch.cpp. No FMA is used so results stay close to the
// scalar path (they still differ by summation order on general data).

#include "symnet/kernels.hpp"

#ifdef __AVX2__

#include <immintrin.h>

namespace symnet::kernels {
namespace {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swap = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swap));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                 _mm256_loadu_pd(b + i)));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4),
                                                 _mm256_loadu_pd(b + i + 4)));
    }
    for (; i + 4 <= n; i += 4)
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + i),
                                                 _mm256_loadu_pd(b + i)));
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_add_pd(vy, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void relu_avx2(const double* in, double* out, std::size_t n) {
    __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(out + i, _mm256_max_pd(_mm256_loadu_pd(in + i), zero));
    for (; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

double sum_sq_avx2(const double* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d v0 = _mm256_loadu_pd(a + i);
        __m256d v1 = _mm256_loadu_pd(a + i + 4);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(v0, v0));
        acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(v1, v1));
    }
    for (; i + 4 <= n; i += 4) {
        __m256d v0 = _mm256_loadu_pd(a + i);
        acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(v0, v0));
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double dist_sq_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
        acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
    }
    double res = hsum(acc);
    for (; i < n; ++i) {
        double d = a[i] - b[i];
        res += d * d;
    }
    return res;
}

void dense_relu_avx2(const double* w, const double* bias, const double* x,
                     std::size_t rows, std::size_t cols, double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double pre = dot_avx2(w + r * cols, x, cols) + bias[r];
        v[r] = pre > 0.0 ? pre : 0.0;
    }
}

void dense_pre_avx2(const double* w, const double* bias, const double* x,
                    std::size_t rows, std::size_t cols, double* pre) {
    for (std::size_t r = 0; r < rows; ++r)
        pre[r] = dot_avx2(w + r * cols, x, cols) + bias[r];
}

}  // namespace

namespace detail {

const Ops& avx2_table() {
    static const Ops ops{
        "avx2",      dot_avx2,      axpy_avx2,       relu_avx2,
        sum_sq_avx2, dist_sq_avx2,  dense_relu_avx2, dense_pre_avx2,
    };
    return ops;
}

}  // namespace detail
}  // namespace symnet::kernels

#else
#error "kernels_avx2.cpp requires -mavx2"
#endif
