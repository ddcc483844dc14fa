// Compares the OpenMP kernels against their serial references. Run with
// OMP_NUM_THREADS set to the core count of interest.
#include <chrono>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "citesim/models.hpp"
#include "citesim/power_series.hpp"
#include "citesim/sampler.hpp"

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        fn();
        const double s =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        best = std::min(best, s);
    }
    return best;
}

void report(const std::string& name, double serial_s, double parallel_s) {
    fmt::print("{:<28} {:>12.1f} {:>12.1f} {:>9.2f}x\n", name, serial_s * 1e3, parallel_s * 1e3,
               serial_s / parallel_s);
}

}  // namespace

int main() {
    fmt::print("{:<28} {:>12} {:>12} {:>10}\n", "benchmark", "serial (ms)", "openmp (ms)",
               "speedup");

    constexpr int kOrder = 4096;
    std::mt19937_64 gen(12345);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<double> a(kOrder + 1), b(kOrder + 1), out(kOrder + 1);
    for (auto& v : a) v = unif(gen);
    for (auto& v : b) v = unif(gen);

    const double conv_serial = time_best_of(3, [&] {
        citesim::series::kernel::convolve_serial(a, b, out);
    });
    const double conv_parallel = time_best_of(3, [&] {
        citesim::series::kernel::convolve(a, b, out);
    });
    report(fmt::format("convolve n={}", kOrder + 1), conv_serial, conv_parallel);

    const citesim::models::ModelSpec author{citesim::models::AuthorModelParams{0.3, 0.6, 0.4}};
    constexpr std::int64_t kDraws = 200000;
    citesim::sampling::BatchOptions serial_opt;
    serial_opt.parallel = false;
    citesim::sampling::BatchOptions parallel_opt;

    const double batch_serial = time_best_of(3, [&] {
        citesim::sampling::sample_batch(author, kDraws, 42, serial_opt);
    });
    const double batch_parallel = time_best_of(3, [&] {
        citesim::sampling::sample_batch(author, kDraws, 42, parallel_opt);
    });
    report(fmt::format("author batch n={}", kDraws), batch_serial, batch_parallel);
    return 0;
}
