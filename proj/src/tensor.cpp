#include "hinforge/tensor.hpp"

#include "hinforge/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hinforge {

Tensor::Tensor(int r, int c, std::vector<double> d) : rows(r), cols(c), data(std::move(d)) {
    if (static_cast<long>(data.size()) != static_cast<long>(r) * c)
        throw ShapeError("Tensor: data size does not match shape");
}

Tensor Tensor::ones(int r, int c) { return full(r, c, 1.0); }

Tensor Tensor::full(int r, int c, double v) {
    Tensor t(r, c);
    std::fill(t.data.begin(), t.data.end(), v);
    return t;
}

Tensor Tensor::identity(int n) {
    Tensor t(n, n);
    for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
    return t;
}

Tensor Tensor::gaussian(int r, int c, Rng& rng) { return gaussian(r, c, rng, 1.0); }

Tensor Tensor::gaussian(int r, int c, Rng& rng, double stddev) {
    Tensor t(r, c);
    for (auto& v : t.data) v = rng.gaussian() * stddev;
    return t;
}

int max_threads() {
    static int cached = [] {
        int n = 1;
#ifdef _OPENMP
        n = omp_get_max_threads();
#endif
        if (const char* env = std::getenv("HINFORGE_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < n) n = cap;
        }
        return n;
    }();
    return cached;
}

void ensure_finite(const Tensor& t, const char* op) {
    for (double v : t.data) {
        if (!std::isfinite(v)) throw NumericError(std::string(op) + ": non-finite output");
    }
}

static void check_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) throw ShapeError(std::string(op) + ": shape mismatch");
}

// Per output element the accumulation order over k is fixed, so the parallel
// and serial paths are bit-identical for any thread count.
static void matmul_row_range(const Tensor& a, const Tensor& b, Tensor& out, int i0, int i1) {
    const int n = a.cols, m = b.cols;
    for (int i = i0; i < i1; ++i) {
        double* orow = out.row(i);
        const double* arow = a.row(i);
        for (int k = 0; k < n; ++k) {
            const double av = arow[k];
            const double* brow = b.row(k);
            for (int j = 0; j < m; ++j) orow[j] += av * brow[j];
        }
    }
}

static void matmul_check(const Tensor& a, const Tensor& b) {
    if (a.cols != b.rows) throw ShapeError("matmul: inner dimensions disagree");
}

Tensor matmul_serial(const Tensor& a, const Tensor& b) {
    matmul_check(a, b);
    Tensor out(a.rows, b.cols);
    matmul_row_range(a, b, out, 0, a.rows);
    ensure_finite(out, "matmul");
    return out;
}

Tensor matmul_parallel(const Tensor& a, const Tensor& b) {
    matmul_check(a, b);
    Tensor out(a.rows, b.cols);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(max_threads())
    for (int i = 0; i < a.rows; ++i) matmul_row_range(a, b, out, i, i + 1);
#else
    matmul_row_range(a, b, out, 0, a.rows);
#endif
    ensure_finite(out, "matmul");
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    const long work = static_cast<long>(a.rows) * a.cols * b.cols;
    if (work >= 65536 && max_threads() > 1) return matmul_parallel(a, b);
    return matmul_serial(a, b);
}

Tensor transpose(const Tensor& a) {
    Tensor out(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) out.at(j, i) = a.at(i, j);
    return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "add");
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = a.data[i] + b.data[i];
    ensure_finite(out, "add");
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "sub");
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = a.data[i] - b.data[i];
    ensure_finite(out, "sub");
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    check_same_shape(a, b, "mul");
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = a.data[i] * b.data[i];
    ensure_finite(out, "mul");
    return out;
}

Tensor scale(const Tensor& a, double s) {
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = a.data[i] * s;
    ensure_finite(out, "scale");
    return out;
}

Tensor sigmoid(const Tensor& a) {
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = 1.0 / (1.0 + std::exp(-a.data[i]));
    ensure_finite(out, "sigmoid");
    return out;
}

Tensor relu(const Tensor& a) {
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = a.data[i] > 0.0 ? a.data[i] : 0.0;
    return out;
}

Tensor log(const Tensor& a) {
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = std::log(a.data[i]);
    ensure_finite(out, "log");
    return out;
}

Tensor exp(const Tensor& a) {
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = std::exp(a.data[i]);
    ensure_finite(out, "exp");
    return out;
}

Tensor clamp(const Tensor& a, double lo, double hi) {
    if (lo > hi) throw ArgumentError("clamp: lo > hi");
    Tensor out(a.rows, a.cols);
    for (long i = 0; i < a.size(); ++i) out.data[i] = std::min(std::max(a.data[i], lo), hi);
    return out;
}

Tensor softmax_rows(const Tensor& a) {
    if (a.cols < 1) throw ShapeError("softmax_rows: empty rows");
    Tensor out(a.rows, a.cols);
    for (int i = 0; i < a.rows; ++i) {
        const double* in = a.row(i);
        double* o = out.row(i);
        double mx = in[0];
        for (int j = 1; j < a.cols; ++j) mx = std::max(mx, in[j]);
        double denom = 0.0;
        for (int j = 0; j < a.cols; ++j) {
            o[j] = std::exp(in[j] - mx);
            denom += o[j];
        }
        for (int j = 0; j < a.cols; ++j) o[j] /= denom;
    }
    ensure_finite(out, "softmax_rows");
    return out;
}

Tensor concat_rows(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ArgumentError("concat_rows: no inputs");
    int cols = parts[0].cols, rows = 0;
    for (const auto& p : parts) {
        if (p.cols != cols) throw ShapeError("concat_rows: column counts differ");
        rows += p.rows;
    }
    Tensor out(rows, cols);
    long off = 0;
    for (const auto& p : parts) {
        std::copy(p.data.begin(), p.data.end(), out.data.begin() + off);
        off += p.size();
    }
    return out;
}

Tensor concat_cols(const std::vector<Tensor>& parts) {
    if (parts.empty()) throw ArgumentError("concat_cols: no inputs");
    int rows = parts[0].rows, cols = 0;
    for (const auto& p : parts) {
        if (p.rows != rows) throw ShapeError("concat_cols: row counts differ");
        cols += p.cols;
    }
    Tensor out(rows, cols);
    for (int i = 0; i < rows; ++i) {
        int off = 0;
        for (const auto& p : parts) {
            std::copy(p.row(i), p.row(i) + p.cols, out.row(i) + off);
            off += p.cols;
        }
    }
    return out;
}

Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
    Tensor out(static_cast<int>(idx.size()), a.cols);
    for (size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] < 0 || idx[i] >= a.rows) throw IndexError("gather_rows: row index out of range");
        std::copy(a.row(idx[i]), a.row(idx[i]) + a.cols, out.row(static_cast<int>(i)));
    }
    return out;
}

Tensor row_sum(const Tensor& a) {
    Tensor out(a.rows, 1);
    for (int i = 0; i < a.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < a.cols; ++j) s += a.at(i, j);
        out.at(i, 0) = s;
    }
    ensure_finite(out, "row_sum");
    return out;
}

double sum(const Tensor& a) {
    double s = 0.0;
    for (double v : a.data) s += v;
    if (!std::isfinite(s)) throw NumericError("sum: non-finite output");
    return s;
}

double mean(const Tensor& a) {
    if (a.size() == 0) throw ArgumentError("mean: empty tensor");
    return sum(a) / static_cast<double>(a.size());
}

}  // namespace hinforge
