#include "symnet/kernels.hpp"

namespace symnet::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void relu_scalar(const double* in, double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = in[i] > 0.0 ? in[i] : 0.0;
}

double sum_sq_scalar(const double* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += a[i] * a[i];
    return acc;
}

double dist_sq_scalar(const double* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return acc;
}

void dense_relu_scalar(const double* w, const double* bias, const double* x,
                       std::size_t rows, std::size_t cols, double* v) {
    for (std::size_t r = 0; r < rows; ++r) {
        double pre = dot_scalar(w + r * cols, x, cols) + bias[r];
        v[r] = pre > 0.0 ? pre : 0.0;
    }
}

void dense_pre_scalar(const double* w, const double* bias, const double* x,
                      std::size_t rows, std::size_t cols, double* pre) {
    for (std::size_t r = 0; r < rows; ++r)
        pre[r] = dot_scalar(w + r * cols, x, cols) + bias[r];
}

}  // namespace

const Ops& scalar() {
    static const Ops ops{
        "scalar",     dot_scalar,      axpy_scalar,       relu_scalar,
        sum_sq_scalar, dist_sq_scalar, dense_relu_scalar, dense_pre_scalar,
    };
    return ops;
}

}  // namespace symnet::kernels
