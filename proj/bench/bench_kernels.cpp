// Times the serial matmul reference against the OpenMP kernel and checks
// that both produce bit-identical output (the parallel kernel keeps the
// per-element accumulation order, so this must hold exactly).
#include "hinforge/rng.hpp"
#include "hinforge/tensor.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>

using namespace hinforge;

namespace {

double best_seconds(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = std::chrono::steady_clock::now();
        fn();
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (s < best) best = s;
    }
    return best;
}

}  // namespace

int main(int argc, char** argv) {
    int n = 384, reps = 5;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--n")
            n = std::atoi(argv[i + 1]);
        else if (flag == "--reps")
            reps = std::atoi(argv[i + 1]);
        else {
            std::fprintf(stderr, "usage: bench_kernels [--n N] [--reps R]\n");
            return 2;
        }
    }
    if (n < 1 || reps < 1) {
        std::fprintf(stderr, "bench_kernels: --n and --reps must be positive\n");
        return 2;
    }

    Rng rng(123);
    Tensor a = Tensor::gaussian(n, n, rng);
    Tensor b = Tensor::gaussian(n, n, rng);

    Tensor serial = matmul_serial(a, b);   // warm-up doubles as the reference
    Tensor parallel = matmul_parallel(a, b);
    bool identical = serial.data.size() == parallel.data.size() &&
                     std::memcmp(serial.data.data(), parallel.data.data(),
                                 serial.data.size() * sizeof(double)) == 0;

    double ts = best_seconds(reps, [&] { serial = matmul_serial(a, b); });
    double tp = best_seconds(reps, [&] { parallel = matmul_parallel(a, b); });
    double flops = 2.0 * n * n * n;

    std::printf("matmul %dx%d, best of %d reps, %d thread(s)\n", n, n, reps, max_threads());
    std::printf("  serial   %10.6f s  %8.2f GFLOP/s\n", ts, flops / ts * 1e-9);
    std::printf("  openmp   %10.6f s  %8.2f GFLOP/s  speedup %.2fx\n", tp, flops / tp * 1e-9,
                ts / tp);
    std::printf("  outputs bit-identical: %s\n", identical ? "yes" : "NO");
    return identical ? 0 : 1;
}
