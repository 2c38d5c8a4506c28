#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lpising/rng.hpp"

namespace lpising {

// Metropolis sampling of the full two-dimensional model: a long-range Kac
// interaction of inverse range gamma within each layer, nearest-neighbor
// vertical coupling lambda between layers, external field h_ext, both lattice
// directions periodic, temperature 1.

struct ModelParams {
    double lambda = 0.0;
    double h_ext = 0.0;
    double gamma = 0.25;
};

enum class KernelShape {
    raised_cosine,  // (1 + cos(pi s))/2 on |s| < 1: smooth reference shape
    triangle,       // 1 - |s| on |s| < 1: non-smooth alternative
};

// Discretized Kac weights J(d) = c_gamma * gamma * shape(gamma d) for site
// distance d within one layer.  The self-weight is excluded (the energy sums
// over x != y), and the 2*range neighbor weights are normalized so the row
// sum is exactly 1 after a compensated correction.
struct KacKernel {
    double gamma = 0.0;
    int range = 0;                // floor(1/gamma); J(d) = 0 for gamma d >= 1
    std::vector<double> weights;  // index d in [0, range], weights[0] = 0
    double c_gamma = 0.0;         // normalizer, -> 1 as gamma -> 0
    KernelShape shape = KernelShape::raised_cosine;
};

// Requires 0 < gamma <= 1/2; throws domain_error otherwise.
KacKernel build_kernel(double gamma, KernelShape shape = KernelShape::raised_cosine);

// Decoupled reference without horizontal interaction (range 0); spins
// interact only vertically and with the field.
KacKernel zero_kernel();

struct SpinLattice {
    int L = 0;
    std::vector<std::int8_t> spins;  // layer-major: spins[i*L + x]

    SpinLattice() = default;
    SpinLattice(int side, std::int8_t fill)
        : L(side), spins(static_cast<std::size_t>(side) * side, fill) {}

    std::int8_t get(int x, int i) const {
        return spins[static_cast<std::size_t>(wrap(i)) * L + wrap(x)];
    }
    void set(int x, int i, std::int8_t s) {
        spins[static_cast<std::size_t>(wrap(i)) * L + wrap(x)] = s;
    }
    int wrap(int c) const {
        const int r = c % L;
        return r < 0 ? r + L : r;
    }
};

SpinLattice random_lattice(int side, std::uint64_t seed);

// Field at one site: sum_y J(x-y) sigma(y,i) + lambda [sigma(x,i+1) +
// sigma(x,i-1)] + h_ext, with periodic wrap; direct O(range) evaluation.
double local_field(const SpinLattice& lat, const KacKernel& kernel, double lambda,
                   double h_ext, int x, int i);

// Total energy: -(1/2) sum_i sum_{x != y} J(x-y) sigma(x,i) sigma(y,i)
// - lambda sum vertical bonds - h_ext sum spins.
double total_energy(const SpinLattice& lat, const KacKernel& kernel, double lambda,
                    double h_ext);

struct McResult {
    double mean_magnetization = 0.0;
    double std_error = 0.0;  // batch means over 32 batches
    std::vector<double> magnetization_trace;  // one entry per recorded sweep
    std::vector<double> energy_trace;
    long long sweeps = 0;
    long long warmup = 0;
    std::uint64_t seed = 0;
    std::string rng = kRngAlgorithm;
    SpinLattice final_state;
};

// Single-spin-flip Metropolis: one sweep is L*L random-site proposals with
// acceptance min(1, exp(-dH)), dH = 2 sigma(x,i) * local field.  Per-site
// Kac sums are cached and updated in O(range) per accepted flip; energy is
// accumulated incrementally.  Magnetization and energy are recorded once per
// sweep after warmup.  Bit-exact reproducible for a fixed seed.
McResult run_metropolis(const ModelParams& params, int L, long long sweeps,
                        long long warmup, std::uint64_t seed);

// Same sampler with an explicit kernel and starting configuration.
McResult run_metropolis(const ModelParams& params, const KacKernel& kernel,
                        SpinLattice initial, long long sweeps, long long warmup,
                        std::uint64_t seed);

struct GammaRow {
    double gamma = 0.0;
    int lattice = 0;
    double mean = 0.0;
    double std_error = 0.0;
    double m_pred = 0.0;    // variational minimizer magnetization
    double deviation = 0.0; // |mean - m_pred|
};

// Runs one chain per gamma with the lattice scaled to keep L*gamma fixed (the
// given L belongs to the smallest gamma); warmup is sweeps/4.  Chains use
// independent derived seeds and run in parallel; rows come back in input
// order regardless of thread count.
std::vector<GammaRow> gamma_sweep(const ModelParams& params, const std::vector<double>& gammas,
                                  int L, long long sweeps, std::uint64_t seed);

} // namespace lpising
