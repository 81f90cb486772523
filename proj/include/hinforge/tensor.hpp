#pragma once

#include "hinforge/rng.hpp"

#include <string>
#include <vector>

namespace hinforge {

// Dense 2-D matrix of 64-bit reals, row-major. Every kernel checks shapes and
// verifies the result is finite; kernels are pure and bit-deterministic
// regardless of the worker-thread count.
struct Tensor {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Tensor() = default;
    Tensor(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}
    Tensor(int r, int c, std::vector<double> d);

    static Tensor zeros(int r, int c) { return Tensor(r, c); }
    static Tensor ones(int r, int c);
    static Tensor full(int r, int c, double v);
    static Tensor identity(int n);
    static Tensor gaussian(int r, int c, Rng& rng);
    static Tensor gaussian(int r, int c, Rng& rng, double stddev);

    double& at(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double at(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
    const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
    double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }

    long size() const { return static_cast<long>(rows) * cols; }
    bool same_shape(const Tensor& o) const { return rows == o.rows && cols == o.cols; }
    bool operator==(const Tensor& o) const { return rows == o.rows && cols == o.cols && data == o.data; }
};

// Worker cap: min(omp_get_max_threads(), HINFORGE_THREADS). Read once.
int max_threads();

void ensure_finite(const Tensor& t, const char* op);

// ---- kernels ----
// matmul dispatches to the OpenMP path above a size threshold; matmul_serial
// is the reference implementation and produces bit-identical output.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor matmul_serial(const Tensor& a, const Tensor& b);
Tensor matmul_parallel(const Tensor& a, const Tensor& b);

Tensor transpose(const Tensor& a);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor scale(const Tensor& a, double s);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor log(const Tensor& a);
Tensor exp(const Tensor& a);
Tensor clamp(const Tensor& a, double lo, double hi);
Tensor softmax_rows(const Tensor& a);
Tensor concat_rows(const std::vector<Tensor>& parts);
Tensor concat_cols(const std::vector<Tensor>& parts);
Tensor gather_rows(const Tensor& a, const std::vector<int>& idx);
Tensor row_sum(const Tensor& a);  // n x m -> n x 1
double sum(const Tensor& a);
double mean(const Tensor& a);

}  // namespace hinforge
