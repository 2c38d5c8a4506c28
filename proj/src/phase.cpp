#include "lpising/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lpising/errors.hpp"
#include "lpising/ising1d.hpp"

namespace lpising {

namespace {

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("phase: lambda must be finite and >= 0");
}

// g(m) = -h_ext m - m^2/2 + f_lambda(m)
double g_of_m(double lambda, double h_ext, double m) {
    return -h_ext * m - 0.5 * m * m + free_energy_canonical(lambda, m);
}

double g_prime(double lambda, double h_ext, double m) {
    return -h_ext - m + free_energy_derivative(lambda, m);
}

double g_second(double lambda, double m) {
    const double h = free_energy_derivative(lambda, m);
    return -1.0 + 1.0 / susceptibility_of_field(lambda, h);
}

// Polishes a bracketed stationary point of g by safeguarded Newton on g'.
double polish_minimum(double lambda, double h_ext, double lo, double hi) {
    double x = 0.5 * (lo + hi);
    double flo = g_prime(lambda, h_ext, lo);
    for (int it = 0; it < 200; ++it) {
        const double fp = g_prime(lambda, h_ext, x);
        if (std::abs(fp) < 1e-14) return x;
        if ((fp > 0.0) == (flo > 0.0)) {
            lo = x;
            flo = fp;
        } else {
            hi = x;
        }
        const double fpp = g_second(lambda, x);
        double next = fpp > 0.0 ? x - fp / fpp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-16) return next;
        x = next;
    }
    return x;
}

} // namespace

LpPressure lp_pressure(double lambda, double h_ext, double grid_step) {
    check_lambda(lambda);
    if (!std::isfinite(h_ext))
        throw std::invalid_argument("phase: h_ext must be finite");
    if (!(grid_step > 0.0) || grid_step > 1e-2)
        throw std::invalid_argument("phase: grid_step must lie in (0, 1e-2]");

    const int n = static_cast<int>(std::floor((1.0 - grid_step / 2) / grid_step));
    const int total = 2 * n + 1;
    std::vector<double> grid(total), val(total);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < total; ++k) {
        grid[k] = (k - n) * grid_step;
        val[k] = g_of_m(lambda, h_ext, grid[k]);
    }

    // polish every interior grid-local minimum, then pick the best;
    // ties within 1e-9 mark a degenerate (coexistence) point.
    std::vector<double> cand_m, cand_v;
    for (int k = 0; k < total; ++k) {
        const bool left_ok = (k == 0) || val[k] <= val[k - 1];
        const bool right_ok = (k == total - 1) || val[k] <= val[k + 1];
        if (!(left_ok && right_ok)) continue;
        const double lo = (k == 0) ? grid[0] - 0.5 * grid_step : grid[k - 1];
        const double hi = (k == total - 1) ? grid[total - 1] + 0.5 * grid_step : grid[k + 1];
        const double m = polish_minimum(lambda, h_ext, std::max(lo, -1.0 + 1e-12),
                                        std::min(hi, 1.0 - 1e-12));
        cand_m.push_back(m);
        cand_v.push_back(g_of_m(lambda, h_ext, m));
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < cand_v.size(); ++i)
        if (cand_v[i] < cand_v[best]) best = i;

    LpPressure out{-cand_v[best], cand_m[best], false};
    for (std::size_t i = 0; i < cand_v.size(); ++i) {
        if (std::abs(cand_v[i] - cand_v[best]) > 1e-9) continue;
        if (std::abs(cand_m[i] - cand_m[best]) > 10.0 * grid_step) out.degenerate = true;
        if (cand_m[i] < out.minimizer_m) out.minimizer_m = cand_m[i];
    }
    if (!out.degenerate) out.minimizer_m = cand_m[best];
    return out;
}

EnvelopeCurve convex_envelope(double lambda, double grid_step) {
    check_lambda(lambda);
    if (!(grid_step > 0.0) || grid_step > 1e-2)
        throw std::invalid_argument("phase: grid_step must lie in (0, 1e-2]");

    EnvelopeCurve out;
    const int n = static_cast<int>(std::floor((1.0 - grid_step / 2) / grid_step));
    const int total = 2 * n + 1;
    out.m.resize(total);
    out.g.resize(total);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < total; ++k) {
        out.m[k] = (k - n) * grid_step;
        out.g[k] = -0.5 * out.m[k] * out.m[k] + free_energy_canonical(lambda, out.m[k]);
    }

    // lower convex hull, monotone chain over the already-sorted abscissae
    std::vector<int> hull;
    for (int k = 0; k < total; ++k) {
        while (hull.size() >= 2) {
            const int a = hull[hull.size() - 2], b = hull[hull.size() - 1];
            const double cross = (out.m[b] - out.m[a]) * (out.g[k] - out.g[a]) -
                                 (out.m[k] - out.m[a]) * (out.g[b] - out.g[a]);
            if (cross <= 0.0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(k);
    }

    out.envelope.resize(total);
    for (std::size_t e = 0; e + 1 < hull.size(); ++e) {
        const int a = hull[e], b = hull[e + 1];
        const double slope = (out.g[b] - out.g[a]) / (out.m[b] - out.m[a]);
        for (int k = a; k <= b; ++k) out.envelope[k] = out.g[a] + slope * (out.m[k] - out.m[a]);
        if (out.m[a] < 0.0 && out.m[b] > 0.0 && b - a > 1 && std::abs(slope) < 1e-10) {
            out.has_flat = true;
            out.flat_lo = out.m[a];
            out.flat_hi = out.m[b];
        }
    }
    return out;
}

double spontaneous_magnetization(double lambda) {
    check_lambda(lambda);
    // positive stationary point of -m^2/2 + f_lambda(m): root of f'(m) = m.
    // In the uniqueness regime f'(m) - m > 0 on (0, 1) and the result is 0.
    const double step = 1e-3;
    auto q_of = [&](double m) { return free_energy_derivative(lambda, m) - m; };

    std::vector<double> xs;
    for (int k = 1; k < 1000; ++k) xs.push_back(k * step);
    xs.push_back(1.0 - 1e-12);

    double lo = 0.0, hi = 0.0;
    bool found = false;
    double prev_m = xs[0], prev_q = q_of(prev_m);
    if (prev_q > 0.0) return 0.0;  // convex already at the first grid point
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double q = q_of(xs[i]);
        if (prev_q < 0.0 && q >= 0.0) {
            lo = prev_m;
            hi = xs[i];
            found = true;
            break;
        }
        prev_m = xs[i];
        prev_q = q;
    }
    if (!found) return 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double q = q_of(mid);
        if (std::abs(q) < 1e-14 || hi - lo < 1e-15) return mid;
        if (q < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> mean_field_solve(double lambda, double h_ext) {
    check_lambda(lambda);
    if (!std::isfinite(h_ext))
        throw std::invalid_argument("phase: h_ext must be finite");

    // F(m) = h_ext + m - f'(m); F(-1+) = +inf, F(1-) = -inf.
    const double step = 1e-4;
    auto F = [&](double m) { return h_ext + m - free_energy_derivative(lambda, m); };

    std::vector<double> roots;
    auto bisect = [&](double lo, double hi, double flo) {
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            const double f = F(mid);
            if (std::abs(f) < 1e-13 || hi - lo < 1e-15) return mid;
            if ((f > 0.0) == (flo > 0.0)) {
                lo = mid;
                flo = f;
            } else {
                hi = mid;
            }
        }
        return 0.5 * (lo + hi);
    };

    const int n = static_cast<int>(std::round(1.0 / step)) - 1;
    std::vector<double> xs;
    xs.push_back(-1.0 + 1e-13);
    for (int k = -n; k <= n; ++k) xs.push_back(k * step);
    xs.push_back(1.0 - 1e-13);

    double prev_x = xs[0], prev_f = F(prev_x);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        const double f = F(xs[i]);
        if (f == 0.0) {
            roots.push_back(xs[i]);
        } else if ((prev_f > 0.0) != (f > 0.0)) {
            roots.push_back(bisect(prev_x, xs[i], prev_f));
        }
        prev_x = xs[i];
        prev_f = f;
    }
    std::sort(roots.begin(), roots.end());
    // exact zeros on grid points can be rediscovered by the adjacent cell
    std::vector<double> unique;
    for (double r : roots)
        if (unique.empty() || r - unique.back() > 1e-9) unique.push_back(r);
    return unique;
}

double dobrushin_ratio(double lambda, double h_ext) {
    check_lambda(lambda);
    if (!std::isfinite(h_ext))
        throw std::invalid_argument("phase: h_ext must be finite");
    const double c = std::cosh(h_ext - 1.0 - 2.0 * lambda);
    return (1.0 + 2.0 * lambda) / (c * c);
}

double threshold_h_star() { return 3.0 + std::acosh(std::sqrt(12.0)); }

double threshold_h_star_small_root() { return 3.0 - std::acosh(std::sqrt(12.0)); }

double threshold_h0() { return 0.25 * (0.5 - 0.375); }

MagnetizationCap magnetization_cap(double h) {
    if (!std::isfinite(h) || h <= 0.0 || h > 15.0)
        throw std::domain_error("phase: cap field must lie in (0, 15]");
    // atanh(m) - m is strictly increasing from 0; bracket and bisect
    double lo = std::tanh(h), hi = 1.0 - 1e-16;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double q = std::atanh(mid) - mid - h;
        if (std::abs(q) < 1e-13 || hi - lo < 1e-16) {
            lo = hi = mid;
            break;
        }
        if (q < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    MagnetizationCap out;
    out.m_star = 0.5 * (lo + hi);
    out.m_plus = std::min(out.m_star + 0.01, 0.5 * (1.0 + out.m_star));
    return out;
}

} // namespace lpising
