#include "lpising/effective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <utility>

#include "lpising/errors.hpp"
#include "lpising/ising1d.hpp"
#include "lpising/phase.hpp"
#include "lpising/polymer.hpp"
#include "lpising/rng.hpp"

namespace lpising {

namespace {

constexpr double kNewtonTol = 1e-12;    // sup-norm residual target of u_from_m
constexpr double kGradTol = 1e-12;      // projected-gradient target of minimize_eff
constexpr double kClusterTol = 1e-5;    // sup distance separating distinct minima
constexpr std::uint64_t kRestartSeed = 0x8f3c9d2b17ull;

void check_coupling(double lambda) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("effective: coupling must be finite and >= 0");
}

void check_field(double h_ext) {
    if (!std::isfinite(h_ext))
        throw std::invalid_argument("effective: h_ext must be finite");
}

// log(e^h + e^{-h}) without overflow.
double log_two_cosh(double h) {
    const double a = std::fabs(h);
    return a + std::log1p(std::exp(-2.0 * a));
}

std::vector<double> fields_of(const std::vector<double>& u) {
    std::vector<double> h(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) h[i] = std::atanh(u[i]);
    return h;
}

// Constant term of the decorated ring sum: log Z at zero field minus the
// free normalizer l log 2.  Taken from the series coefficients where the
// series is defined, from the ring directly for other lengths; the two
// agree to rounding.
double eff_a0(double lambda, int ell) {
    if (ell >= 3 && ell <= 10) return cluster_coefficients(lambda, ell, 0).a0;
    return ring_log_z(lambda, std::vector<double>(ell, 0.0)) -
           static_cast<double>(ell) * std::log(2.0);
}

// Value and gradient without the additive constant.
void eff_core(double lambda, double h_ext, const std::vector<double>& u, EffEnergy& out) {
    const int l = static_cast<int>(u.size());
    const std::vector<double> h = fields_of(u);
    const RingObservables obs = ring_observables(lambda, h);
    const std::vector<double>& m = obs.magnetization;

    double body = 0.0, norm = 0.0;
    for (int i = 0; i < l; ++i) {
        body += 0.5 * m[i] * m[i] - h[i] * m[i] + h_ext * m[i];
        norm += log_two_cosh(h[i]);
    }
    const double log_zstar = obs.log_z - norm;
    out.value = -body - norm - log_zstar;

    const std::vector<double> chi = ring_susceptibility(lambda, h);
    out.gradient.assign(l, 0.0);
    for (int j = 0; j < l; ++j) {
        double s = 0.0;
        for (int i = 0; i < l; ++i) s += (m[i] + h_ext - h[i]) * chi[i * l + j];
        out.gradient[j] = -s / (1.0 - u[j] * u[j]);
    }
}

// Dense solve by Gaussian elimination with partial pivoting; A row-major.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int c = 0; c < n; ++c) {
        int p = c;
        for (int r = c + 1; r < n; ++r)
            if (std::fabs(a[r * n + c]) > std::fabs(a[p * n + c])) p = r;
        if (a[p * n + c] == 0.0)
            throw convergence_error("u_from_m: singular Newton system");
        if (p != c) {
            for (int k = c; k < n; ++k) std::swap(a[p * n + k], a[c * n + k]);
            std::swap(b[p], b[c]);
        }
        for (int r = c + 1; r < n; ++r) {
            const double f = a[r * n + c] / a[c * n + c];
            if (f == 0.0) continue;
            for (int k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
            b[r] -= f * b[c];
        }
    }
    std::vector<double> x(n);
    for (int r = n - 1; r >= 0; --r) {
        double s = b[r];
        for (int k = r + 1; k < n; ++k) s -= a[r * n + k] * x[k];
        x[r] = s / a[r * n + r];
    }
    return x;
}

// Row-sum norm of the Jacobian of the correction m(u) - u.
double contraction_norm(double lambda, const std::vector<double>& u) {
    const int l = static_cast<int>(u.size());
    const std::vector<double> chi = ring_susceptibility(lambda, fields_of(u));
    double r = 0.0;
    for (int i = 0; i < l; ++i) {
        double row = 0.0;
        for (int j = 0; j < l; ++j) {
            const double jac = chi[i * l + j] / (1.0 - u[j] * u[j]);
            row += std::fabs(jac - (i == j ? 1.0 : 0.0));
        }
        r = std::max(r, row);
    }
    return r;
}

struct BbResult {
    std::vector<double> u;
    double value = 0.0;
};

// Monotone projected gradient descent with Barzilai-Borwein step sizes.
BbResult bb_minimize(double lambda, double h_ext, std::vector<double> x, double box) {
    const int l = static_cast<int>(x.size());
    auto clip = [&](std::vector<double>& v) {
        for (double& c : v) c = std::clamp(c, -box, box);
    };
    clip(x);
    EffEnergy e;
    eff_core(lambda, h_ext, x, e);
    double f = e.value;
    std::vector<double> g = e.gradient;
    double step = 0.05;
    for (int it = 0; it < 4000; ++it) {
        double pg = 0.0;
        for (int i = 0; i < l; ++i)
            pg = std::max(pg, std::fabs(x[i] - std::clamp(x[i] - g[i], -box, box)));
        if (pg <= kGradTol) break;

        double t = step;
        bool accepted = false;
        std::vector<double> xn, gn;
        double fn = f;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            xn = x;
            for (int i = 0; i < l; ++i) xn[i] = x[i] - t * g[i];
            clip(xn);
            double decrease = 0.0, moved = 0.0;
            for (int i = 0; i < l; ++i) {
                decrease += g[i] * (x[i] - xn[i]);
                moved = std::max(moved, std::fabs(x[i] - xn[i]));
            }
            if (moved == 0.0) break;
            eff_core(lambda, h_ext, xn, e);
            fn = e.value;
            gn = e.gradient;
            if (fn <= f - 1e-4 * decrease) accepted = true;
            else t *= 0.5;
        }
        if (!accepted) break;

        double ss = 0.0, sy = 0.0;
        for (int i = 0; i < l; ++i) {
            const double si = xn[i] - x[i];
            ss += si * si;
            sy += si * (gn[i] - g[i]);
        }
        step = sy > 1e-300 ? std::clamp(ss / sy, 1e-8, 1e4) : step * 2.0;
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
    }
    return {std::move(x), f};
}

} // namespace

double u_box_edge(double lambda) {
    check_coupling(lambda);
    const double m_plus = magnetization_cap(threshold_h_star()).m_plus;
    return std::tanh(std::atanh(m_plus) + 1.0 + 2.0 * lambda);
}

UVector u_from_m(double lambda, const std::vector<double>& m) {
    check_coupling(lambda);
    if (m.size() < 2) throw std::invalid_argument("u_from_m: need at least two layers");
    for (double v : m)
        if (!std::isfinite(v)) throw std::invalid_argument("u_from_m: m must be finite");
    const double m_plus = magnetization_cap(threshold_h_star()).m_plus;
    for (double v : m)
        if (std::fabs(v) > m_plus)
            throw std::domain_error("u_from_m: |m_i| exceeds the magnetization cap");

    UVector out;
    out.u_plus = u_box_edge(lambda);
    if (lambda == 0.0) {
        out.u = m;
        out.contraction = 0.0;
        return out;
    }

    const int l = static_cast<int>(m.size());
    std::vector<double> u = m;  // the correction vanishes at zero coupling
    auto residual = [&](const std::vector<double>& v, std::vector<double>& f) {
        const std::vector<double> mm = ring_magnetizations(lambda, fields_of(v));
        f.resize(l);
        double r = 0.0;
        for (int i = 0; i < l; ++i) {
            f[i] = mm[i] - m[i];
            r = std::max(r, std::fabs(f[i]));
        }
        return r;
    };

    std::vector<double> f;
    double res = residual(u, f);
    for (int iter = 0; iter < 200 && res > kNewtonTol; ++iter) {
        const std::vector<double> chi = ring_susceptibility(lambda, fields_of(u));
        std::vector<double> jac(static_cast<std::size_t>(l) * l);
        std::vector<double> rhs(l);
        for (int i = 0; i < l; ++i) {
            for (int j = 0; j < l; ++j)
                jac[i * l + j] = chi[i * l + j] / (1.0 - u[j] * u[j]);
            rhs[i] = -f[i];
        }
        const std::vector<double> d = solve_dense(std::move(jac), std::move(rhs));

        double t = 1.0;
        bool moved = false;
        std::vector<double> ft;
        for (int halve = 0; halve < 50 && !moved; ++halve) {
            std::vector<double> ut(l);
            for (int i = 0; i < l; ++i)
                ut[i] = std::clamp(u[i] + t * d[i], -out.u_plus, out.u_plus);
            const double rt = residual(ut, ft);
            if (rt < res) {
                u = std::move(ut);
                f = ft;
                res = rt;
                moved = true;
            } else {
                t *= 0.5;
            }
        }
        if (!moved) break;
    }
    if (res > kNewtonTol)
        throw convergence_error("u_from_m: no convergence in 200 damped Newton steps");

    const double r = contraction_norm(lambda, u);
    if (!(r < 1.0))
        throw convergence_error("u_from_m: contraction certificate >= 1, coupling too large");
    out.u = std::move(u);
    out.contraction = r;
    return out;
}

EffEnergy eff_energy(double lambda, double h_ext, const std::vector<double>& u) {
    check_coupling(lambda);
    check_field(h_ext);
    if (u.size() < 2) throw std::invalid_argument("eff_energy: need at least two layers");
    for (double v : u)
        if (!(std::fabs(v) < 1.0))
            throw std::domain_error("eff_energy: |u_i| must be below 1");
    EffEnergy out;
    eff_core(lambda, h_ext, u, out);
    out.value += eff_a0(lambda, static_cast<int>(u.size()));
    return out;
}

double entropy_remainder(double u) {
    if (!(std::fabs(u) < 1.0))
        throw std::domain_error("entropy_remainder: |u| must be below 1");
    return u * std::atanh(u) + 0.5 * std::log1p(-u * u) - std::log(2.0) - 0.5 * u * u;
}

MinimizeReport minimize_eff(double lambda, double h_ext, int ell, int restarts,
                            bool drop_constant) {
    check_coupling(lambda);
    check_field(h_ext);
    if (ell < 3) throw std::invalid_argument("minimize_eff: ell must be at least 3");
    if (restarts < 1) throw std::invalid_argument("minimize_eff: restarts must be positive");

    const double box = u_box_edge(lambda);
    const double shift = drop_constant ? 0.0 : eff_a0(lambda, ell);
    const double grid_edge = std::min(0.98, box);
    const int n_hom = (restarts + 1) / 2;

    std::vector<BbResult> found(restarts);
#pragma omp parallel for schedule(dynamic)
    for (int r = 0; r < restarts; ++r) {
        const int k = r % n_hom;
        const double v =
            n_hom == 1 ? 0.0 : -grid_edge + 2.0 * grid_edge * k / (n_hom - 1);
        std::vector<double> seed(ell, v);
        if (r >= n_hom) {
            SplitMix64 rng = SplitMix64::stream(kRestartSeed, static_cast<std::uint64_t>(r));
            for (double& s : seed) s += rng.next_uniform(-0.3, 0.3);
        }
        found[r] = bb_minimize(lambda, h_ext, std::move(seed), box);
    }

    // Deterministic merge: order by value (ties by components), then keep one
    // representative per cluster of sup-distance below kClusterTol.
    std::sort(found.begin(), found.end(), [](const BbResult& a, const BbResult& b) {
        if (a.value != b.value) return a.value < b.value;
        return a.u < b.u;
    });
    MinimizeReport rep;
    for (const BbResult& cand : found) {
        bool fresh = true;
        for (const LocalMinimum& seen : rep.minima) {
            double dist = 0.0;
            for (int i = 0; i < ell; ++i)
                dist = std::max(dist, std::fabs(cand.u[i] - seen.u[i]));
            if (dist <= kClusterTol) {
                fresh = false;
                break;
            }
        }
        if (!fresh) continue;
        LocalMinimum lm;
        lm.u = cand.u;
        lm.value = cand.value + shift;
        const auto [lo, hi] = std::minmax_element(cand.u.begin(), cand.u.end());
        lm.spread = *hi - *lo;
        rep.minima.push_back(std::move(lm));
    }
    rep.argmin = rep.minima.front().u;
    rep.value = rep.minima.front().value;
    rep.spread = rep.minima.front().spread;
    return rep;
}

double xi(double u) {
    if (!(std::fabs(u) < 1.0)) throw std::domain_error("xi: |u| must be below 1");
    return (std::atanh(u) - u) * (1.0 - u * u);
}

double theta(double a, double b) {
    if (!(std::fabs(a) < 1.0) || !(std::fabs(b) < 1.0))
        throw std::domain_error("theta: arguments must lie in (-1, 1)");
    if (a == b) return 3.0 * a * a - 2.0 * a * std::atanh(a);
    return (xi(a) - xi(b)) / (a - b);
}

namespace {

double theta_grid_kernel(int points, double cap, bool parallel) {
    if (points < 2) throw std::invalid_argument("theta_grid_max: need at least 2 points");
    if (!(cap > 0.0) || !(cap < 1.0))
        throw std::invalid_argument("theta_grid_max: cap must lie in (0, 1)");
    std::vector<double> x(points), v(points), diag(points);
    for (int i = 0; i < points; ++i) {
        x[i] = -cap + 2.0 * cap * i / (points - 1);
        v[i] = xi(x[i]);
        diag[i] = 3.0 * x[i] * x[i] - 2.0 * x[i] * std::atanh(x[i]);
    }
    double best = diag[0];
#pragma omp parallel for schedule(static) reduction(max : best) if (parallel)
    for (int i = 0; i < points; ++i) {
        best = std::max(best, diag[i]);
        for (int j = i + 1; j < points; ++j)
            best = std::max(best, (v[i] - v[j]) / (x[i] - x[j]));
    }
    return best;
}

} // namespace

double theta_grid_max(int points, double cap) { return theta_grid_kernel(points, cap, true); }

double theta_grid_max_serial(int points, double cap) {
    return theta_grid_kernel(points, cap, false);
}

EnsembleGap ensemble_gap(double lambda, int ell, const std::vector<double>& m) {
    check_coupling(lambda);
    if (ell < 2) throw std::invalid_argument("ensemble_gap: ell must be at least 2");
    if (ell > 5)
        throw std::length_error("ensemble_gap: exact layer enumeration capped at ell = 5");
    if (static_cast<int>(m.size()) != ell)
        throw std::invalid_argument("ensemble_gap: m must have ell entries");

    std::vector<int> plus_count(ell);  // number of +1 spins per layer
    for (int i = 0; i < ell; ++i) {
        const double t = ell * m[i];
        const long long s = std::llround(t);
        if (std::fabs(t - s) > 1e-9 || std::llabs(s) > ell || ((s + ell) & 1))
            throw std::domain_error(
                "ensemble_gap: ell*m_i must be an integer with the parity of ell");
        plus_count[i] = static_cast<int>((s + ell) / 2);
    }

    const UVector uv = u_from_m(lambda, m);
    const std::vector<double> h = fields_of(uv.u);
    double hm = 0.0;
    for (int i = 0; i < ell; ++i) hm += h[i] * m[i];
    const double grand = (ring_log_z(lambda, h) - hm) / ell;

    // Column weights: vertical ring bonds within one column, the two-layer
    // ring counting its single bond twice like the transfer-matrix trace.
    const int words = 1 << ell;
    std::vector<double> wcol(words);
    for (int w = 0; w < words; ++w) {
        int bonds = 0;
        for (int i = 0; i < ell; ++i) {
            const int si = (w >> i) & 1 ? 1 : -1;
            const int sj = (w >> ((i + 1) % ell)) & 1 ? 1 : -1;
            bonds += si * sj;
        }
        wcol[w] = std::exp(lambda * bonds);
    }

    // Dynamic program over columns; state = per-layer count of +1 spins so
    // far, mixed-radix encoded with base x+1 after x columns.
    std::vector<double> cur{1.0};
    for (int x = 0; x < ell; ++x) {
        const int oldbase = x + 1, newbase = x + 2;
        std::size_t nsize = 1;
        for (int i = 0; i < ell; ++i) nsize *= newbase;
        std::vector<double> nxt(nsize, 0.0);
        std::vector<int> digit(ell);
        for (std::size_t idx = 0; idx < cur.size(); ++idx) {
            if (cur[idx] == 0.0) continue;
            std::size_t rem = idx;
            for (int i = 0; i < ell; ++i) {
                digit[i] = static_cast<int>(rem % oldbase);
                rem /= oldbase;
            }
            for (int w = 0; w < words; ++w) {
                std::size_t nidx = 0, stride = 1;
                for (int i = 0; i < ell; ++i) {
                    nidx += static_cast<std::size_t>(digit[i] + ((w >> i) & 1)) * stride;
                    stride *= newbase;
                }
                nxt[nidx] += cur[idx] * wcol[w];
            }
        }
        cur.swap(nxt);
    }
    std::size_t tidx = 0, stride = 1;
    for (int i = 0; i < ell; ++i) {
        tidx += static_cast<std::size_t>(plus_count[i]) * stride;
        stride *= static_cast<std::size_t>(ell) + 1;
    }

    EnsembleGap out;
    out.ell = ell;
    out.grand_term = grand;
    out.phi = -std::log(cur[tidx]) / (static_cast<double>(ell) * ell);
    out.gap = out.grand_term + out.phi;
    return out;
}

} // namespace lpising
