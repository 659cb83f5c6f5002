#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace symnet::kernels {

// Vector primitives behind the training and perceptron inner loops. Each
// backend fills one table; entries agree up to floating-point summation
// order. The scalar table accumulates strictly left to right and is the
// reference the SIMD tables are tested against.
struct Ops {
    const char* name;

    double (*dot)(const double* a, const double* b, std::size_t n);

    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    // out[i] = max(in[i], 0)
    void (*relu)(const double* in, double* out, std::size_t n);

    double (*sum_sq)(const double* a, std::size_t n);

    double (*dist_sq)(const double* a, const double* b, std::size_t n);

    // v = relu(W x + bias); W is rows x cols, row-major
    void (*dense_relu)(const double* w, const double* bias, const double* x,
                       std::size_t rows, std::size_t cols, double* v);

    // pre = W x + bias, no activation
    void (*dense_pre)(const double* w, const double* bias, const double* x,
                      std::size_t rows, std::size_t cols, double* pre);
};

const Ops& scalar();

// Null when the backend was not compiled in or the CPU lacks the feature.
const Ops* avx2();
const Ops* neon();

// Backend used by the library. Defaults to the best available one; the
// SYMNET_KERNELS environment variable (scalar/avx2/neon) overrides that.
const Ops& active();

// Force a backend by name ("auto" restores the default). Returns false and
// leaves the selection alone if the name is unknown or unavailable.
bool select(std::string_view name);

std::vector<std::string> available();

}  // namespace symnet::kernels
