// Wall-clock comparison of the OpenMP kernels against their serial reference
// implementations.  Both variants are chunked so they produce bit-identical
// results regardless of thread count; this target reports the timing side of
// that bargain.  Not registered with ctest.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "lpising/effective.hpp"
#include "lpising/polymer.hpp"
#include "lpising/rng.hpp"

namespace {

double time_of(const std::function<double()>& fn, int reps, double& value) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        value = fn();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best = std::min(best, dt.count());
    }
    return best;
}

void report(const char* name, double t_par, double t_ser, double v_par, double v_ser) {
    std::printf("%-28s parallel %10.4f ms   serial %10.4f ms   speedup %5.2fx   %s\n",
                name, 1e3 * t_par, 1e3 * t_ser, t_ser / t_par,
                v_par == v_ser ? "results identical" : "RESULTS DIFFER");
}

} // namespace

int main(int argc, char** argv) {
    const int reps = argc > 1 ? std::atoi(argv[1]) : 3;
    std::printf("threads: %d, reps per measurement: %d (best-of reported)\n",
                omp_get_max_threads(), reps);

    {
        double vp = 0.0, vs = 0.0;
        const double tp = time_of([] { return lpising::theta_grid_max(2001, 0.999); }, reps, vp);
        const double ts =
            time_of([] { return lpising::theta_grid_max_serial(2001, 0.999); }, reps, vs);
        report("theta grid 2001x2001", tp, ts, vp, vs);
    }

    {
        lpising::SplitMix64 rng(12345);
        std::vector<double> u(14);
        for (double& x : u) x = rng.next_uniform(-0.4, 0.4);
        const int inner = 50;
        double vp = 0.0, vs = 0.0;
        const double tp = time_of(
            [&] {
                double acc = 0.0;
                for (int r = 0; r < inner; ++r) acc = lpising::z_star_enumerate(0.08, u);
                return acc;
            },
            reps, vp);
        const double ts = time_of(
            [&] {
                double acc = 0.0;
                for (int r = 0; r < inner; ++r) acc = lpising::z_star_enumerate_serial(0.08, u);
                return acc;
            },
            reps, vs);
        report("ring average ell=14 x50", tp, ts, vp, vs);
    }

    return 0;
}
