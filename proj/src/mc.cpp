#include "lpising/mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lpising/phase.hpp"

namespace lpising {

namespace {

// Neumaier compensated sum.
double comp_sum(const std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        const double t = s + x;
        c += std::fabs(s) >= std::fabs(x) ? (s - t) + x : (x - t) + s;
        s = t;
    }
    return s + c;
}

double shape_value(KernelShape shape, double s) {
    if (s >= 1.0) return 0.0;
    switch (shape) {
        case KernelShape::raised_cosine: return 0.5 * (1.0 + std::cos(M_PI * s));
        case KernelShape::triangle: return 1.0 - s;
    }
    return 0.0;
}

void check_lattice(const SpinLattice& lat, const KacKernel& kernel) {
    if (lat.L < 2) throw std::invalid_argument("mc: lattice side must be at least 2");
    if (lat.spins.size() != static_cast<std::size_t>(lat.L) * lat.L)
        throw std::invalid_argument("mc: spin array does not match the lattice side");
    for (std::int8_t s : lat.spins)
        if (s != 1 && s != -1) throw std::invalid_argument("mc: spins must be +1 or -1");
    if (kernel.range > 0 && lat.L < 2 * kernel.range + 1)
        throw std::invalid_argument("mc: lattice side smaller than the kernel support");
}

void check_params(const ModelParams& p) {
    if (!(p.lambda >= 0.0) || !std::isfinite(p.lambda))
        throw std::invalid_argument("mc: lambda must be finite and >= 0");
    if (!std::isfinite(p.h_ext)) throw std::invalid_argument("mc: h_ext must be finite");
}

} // namespace

KacKernel build_kernel(double gamma, KernelShape shape) {
    if (!(gamma > 0.0) || !(gamma <= 0.5))
        throw std::domain_error("build_kernel: gamma must lie in (0, 1/2]");
    KacKernel k;
    k.gamma = gamma;
    k.shape = shape;
    k.range = static_cast<int>(std::floor(1.0 / gamma));
    std::vector<double> raw(k.range + 1, 0.0);
    for (int d = 1; d <= k.range; ++d) raw[d] = gamma * shape_value(shape, gamma * d);
    std::vector<double> both(raw.begin() + 1, raw.end());
    both.insert(both.end(), raw.begin() + 1, raw.end());
    const double total = comp_sum(both);
    k.c_gamma = 1.0 / total;
    k.weights.assign(k.range + 1, 0.0);
    for (int d = 1; d <= k.range; ++d) k.weights[d] = raw[d] / total;
    // one compensated correction so the row sums to 1 within an ulp
    std::vector<double> row;
    for (int d = 1; d <= k.range; ++d) {
        row.push_back(k.weights[d]);
        row.push_back(k.weights[d]);
    }
    const int dmax = static_cast<int>(
        std::max_element(k.weights.begin() + 1, k.weights.end()) - k.weights.begin());
    k.weights[dmax] += 0.5 * (1.0 - comp_sum(row));
    return k;
}

KacKernel zero_kernel() {
    KacKernel k;
    k.gamma = 0.0;
    k.range = 0;
    k.weights.assign(1, 0.0);
    k.c_gamma = 0.0;
    return k;
}

SpinLattice random_lattice(int side, std::uint64_t seed) {
    if (side < 2) throw std::invalid_argument("random_lattice: side must be at least 2");
    SpinLattice lat(side, 1);
    SplitMix64 rng(seed);
    for (std::int8_t& s : lat.spins) s = (rng.next_u64() & 1) ? 1 : -1;
    return lat;
}

double local_field(const SpinLattice& lat, const KacKernel& kernel, double lambda,
                   double h_ext, int x, int i) {
    double f = 0.0;
    for (int d = 1; d <= kernel.range; ++d)
        f += kernel.weights[d] * (lat.get(x + d, i) + lat.get(x - d, i));
    f += lambda * (lat.get(x, i + 1) + lat.get(x, i - 1));
    return f + h_ext;
}

double total_energy(const SpinLattice& lat, const KacKernel& kernel, double lambda,
                    double h_ext) {
    check_lattice(lat, kernel);
    const int L = lat.L;
    double e = 0.0;
    for (int i = 0; i < L; ++i)
        for (int x = 0; x < L; ++x) {
            const double s = lat.get(x, i);
            // each unordered horizontal pair appears once with d > 0
            for (int d = 1; d <= kernel.range; ++d)
                e -= kernel.weights[d] * s * lat.get(x + d, i);
            e -= lambda * s * lat.get(x, i + 1);
            e -= h_ext * s;
        }
    return e;
}

McResult run_metropolis(const ModelParams& params, const KacKernel& kernel,
                        SpinLattice initial, long long sweeps, long long warmup,
                        std::uint64_t seed) {
    check_params(params);
    check_lattice(initial, kernel);
    if (warmup < 0 || sweeps <= warmup)
        throw std::invalid_argument("mc: need sweeps > warmup >= 0");

    const int L = initial.L;
    const std::size_t n_sites = static_cast<std::size_t>(L) * L;
    std::vector<std::int8_t>& spins = initial.spins;

    // cached per-site horizontal Kac sums
    std::vector<double> kac(n_sites, 0.0);
    for (int i = 0; i < L; ++i)
        for (int x = 0; x < L; ++x) {
            double f = 0.0;
            for (int d = 1; d <= kernel.range; ++d)
                f += kernel.weights[d] * (initial.get(x + d, i) + initial.get(x - d, i));
            kac[static_cast<std::size_t>(i) * L + x] = f;
        }

    double energy = total_energy(initial, kernel, params.lambda, params.h_ext);
    long long msum = 0;
    for (std::int8_t s : spins) msum += s;

    McResult out;
    out.sweeps = sweeps;
    out.warmup = warmup;
    out.seed = seed;
    out.magnetization_trace.reserve(sweeps - warmup);
    out.energy_trace.reserve(sweeps - warmup);

    SplitMix64 rng(seed);
    for (long long sweep = 0; sweep < sweeps; ++sweep) {
        for (std::size_t t = 0; t < n_sites; ++t) {
            const int x = static_cast<int>(rng.next_below(L));
            const int i = static_cast<int>(rng.next_below(L));
            const std::size_t idx = static_cast<std::size_t>(i) * L + x;
            const double s = spins[idx];
            const double up = spins[static_cast<std::size_t>(i + 1 == L ? 0 : i + 1) * L + x];
            const double dn = spins[static_cast<std::size_t>(i == 0 ? L - 1 : i - 1) * L + x];
            const double d_h =
                2.0 * s * (kac[idx] + params.lambda * (up + dn) + params.h_ext);
            if (d_h > 0.0 && !(rng.next_u01() < std::exp(-d_h))) continue;
            const std::int8_t ns = static_cast<std::int8_t>(-spins[idx]);
            spins[idx] = ns;
            energy += d_h;
            msum += 2 * ns;
            const std::size_t rowbase = static_cast<std::size_t>(i) * L;
            for (int d = 1; d <= kernel.range; ++d) {
                const double dw = 2.0 * ns * kernel.weights[d];
                const int xp = x + d >= L ? x + d - L : x + d;
                const int xm = x - d < 0 ? x - d + L : x - d;
                kac[rowbase + xp] += dw;
                kac[rowbase + xm] += dw;
            }
        }
        if (sweep >= warmup) {
            out.magnetization_trace.push_back(static_cast<double>(msum) / n_sites);
            out.energy_trace.push_back(energy);
        }
    }

    // batch means over (up to) 32 equal batches; any remainder is dropped
    // from both the mean and the error estimate
    const std::size_t n = out.magnetization_trace.size();
    const std::size_t nb = std::min<std::size_t>(32, n);
    const std::size_t bs = n / nb;
    std::vector<double> batch(nb, 0.0);
    double grand = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < bs; ++j) acc += out.magnetization_trace[b * bs + j];
        batch[b] = acc / bs;
        grand += batch[b];
    }
    grand /= nb;
    out.mean_magnetization = grand;
    if (nb >= 2) {
        double var = 0.0;
        for (double b : batch) var += (b - grand) * (b - grand);
        out.std_error = std::sqrt(var / (nb * (nb - 1.0)));
    }
    out.final_state = std::move(initial);
    return out;
}

McResult run_metropolis(const ModelParams& params, int L, long long sweeps,
                        long long warmup, std::uint64_t seed) {
    return run_metropolis(params, build_kernel(params.gamma), SpinLattice(L, 1), sweeps,
                          warmup, seed);
}

std::vector<GammaRow> gamma_sweep(const ModelParams& params, const std::vector<double>& gammas,
                                  int L, long long sweeps, std::uint64_t seed) {
    check_params(params);
    if (gammas.empty()) throw std::invalid_argument("gamma_sweep: no gamma values");
    for (double g : gammas)
        if (!(g > 0.0) || !(g <= 0.5))
            throw std::domain_error("gamma_sweep: gamma must lie in (0, 1/2]");
    if (sweeps < 8) throw std::invalid_argument("gamma_sweep: need at least 8 sweeps");

    const double g_min = *std::min_element(gammas.begin(), gammas.end());
    const double m_pred = lp_pressure(params.lambda, params.h_ext).minimizer_m;
    const int n = static_cast<int>(gammas.size());
    std::vector<GammaRow> rows(n);
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < n; ++k) {
        ModelParams p = params;
        p.gamma = gammas[k];
        const int side = static_cast<int>(std::llround(L * g_min / gammas[k]));
        SplitMix64 stream = SplitMix64::stream(seed, static_cast<std::uint64_t>(k));
        const McResult res = run_metropolis(p, side, sweeps, sweeps / 4, stream.next_u64());
        rows[k] = {gammas[k],       side,  res.mean_magnetization, res.std_error,
                   m_pred, std::fabs(res.mean_magnetization - m_pred)};
    }
    return rows;
}

} // namespace lpising
