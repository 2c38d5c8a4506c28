#include "lpising/ising1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "lpising/errors.hpp"

namespace lpising {

namespace {

struct Mat2 {
    double a, b, c, d;  // [[a, b], [c, d]]
};

inline Mat2 mul(const Mat2& x, const Mat2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

inline double trace(const Mat2& m) { return m.a + m.d; }

// diag(+1, -1) * m: flips the sign of the spin-down row.
inline Mat2 spin_insert(const Mat2& m) { return {m.a, m.b, -m.c, -m.d}; }

// Pulls the largest entry magnitude out of m into *logscale.
inline void rescale(Mat2& m, double* logscale) {
    const double s = std::max(std::max(std::abs(m.a), std::abs(m.b)),
                              std::max(std::abs(m.c), std::abs(m.d)));
    if (s > 0.0 && (s > 1e150 || s < 1e-150)) {
        m.a /= s;
        m.b /= s;
        m.c /= s;
        m.d /= s;
        *logscale += std::log(s);
    }
}

// Transfer matrix exp(lambda s s' + h s) row s, column s', normalized by its
// largest entry exp(lambda + |h|); the pulled-out exponent goes to *shift.
inline Mat2 site_matrix(double lambda, double h, double* shift) {
    const double c = lambda + std::abs(h);
    *shift = c;
    return {std::exp(lambda + h - c), std::exp(-lambda + h - c),
            std::exp(-lambda - h - c), std::exp(lambda - h - c)};
}

void check_ring_args(double lambda, const std::vector<double>& h) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("ising1d: lambda must be finite and >= 0");
    if (h.size() < 2)
        throw std::length_error("ising1d: ring length must be >= 2");
    for (double v : h)
        if (!std::isfinite(v))
            throw std::invalid_argument("ising1d: field entries must be finite");
}

void check_scalar_args(double lambda, double h) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("ising1d: lambda must be finite and >= 0");
    if (!std::isfinite(h))
        throw std::invalid_argument("ising1d: field must be finite");
}

// Scaled partial products of the normalized site matrices.
struct RingProducts {
    std::vector<Mat2> t;        // normalized site matrices
    std::vector<double> shift;  // per-site normalization exponents
    std::vector<Mat2> pre;      // pre[i] = t_0 ... t_{i-1}, pre[0] = I
    std::vector<double> pre_ls;
    std::vector<Mat2> suf;      // suf[i] = t_i ... t_{l-1}, suf[l] = I
    std::vector<double> suf_ls;
    double shift_sum = 0.0;
    double log_z = 0.0;

    explicit RingProducts(double lambda, const std::vector<double>& h) {
        const std::size_t l = h.size();
        t.resize(l);
        shift.resize(l);
        for (std::size_t i = 0; i < l; ++i) {
            t[i] = site_matrix(lambda, h[i], &shift[i]);
            shift_sum += shift[i];
        }
        pre.assign(l + 1, Mat2{1, 0, 0, 1});
        pre_ls.assign(l + 1, 0.0);
        for (std::size_t i = 0; i < l; ++i) {
            pre[i + 1] = mul(pre[i], t[i]);
            pre_ls[i + 1] = pre_ls[i];
            rescale(pre[i + 1], &pre_ls[i + 1]);
        }
        suf.assign(l + 1, Mat2{1, 0, 0, 1});
        suf_ls.assign(l + 1, 0.0);
        for (std::size_t i = l; i-- > 0;) {
            suf[i] = mul(t[i], suf[i + 1]);
            suf_ls[i] = suf_ls[i + 1];
            rescale(suf[i], &suf_ls[i]);
        }
        log_z = std::log(trace(pre[l])) + pre_ls[l] + shift_sum;
    }

    // tr(num) e^{num_ls} / (tr(pre[l]) e^{pre_ls[l]}), evaluated in log space
    // so mismatched lazy rescales cannot overflow.
    double ratio(const Mat2& num, double num_ls) const {
        const std::size_t l = t.size();
        const double tn = trace(num);
        if (tn == 0.0) return 0.0;
        const double log_den = std::log(trace(pre[l])) + pre_ls[l];
        return std::copysign(std::exp(std::log(std::abs(tn)) + num_ls - log_den), tn);
    }
};

} // namespace

double ring_log_z(double lambda, const std::vector<double>& h) {
    check_ring_args(lambda, h);
    const std::size_t l = h.size();
    Mat2 p{1, 0, 0, 1};
    double ls = 0.0, shift_sum = 0.0, c = 0.0;
    for (std::size_t i = 0; i < l; ++i) {
        p = mul(p, site_matrix(lambda, h[i], &c));
        shift_sum += c;
        rescale(p, &ls);
    }
    return std::log(trace(p)) + ls + shift_sum;
}

RingObservables ring_observables(double lambda, const std::vector<double>& h) {
    check_ring_args(lambda, h);
    const std::size_t l = h.size();
    RingProducts rp(lambda, h);
    RingObservables out;
    out.log_z = rp.log_z;
    out.magnetization.resize(l);
    out.nn_correlation.resize(l);
    for (std::size_t i = 0; i < l; ++i) {
        const Mat2 zt = spin_insert(rp.t[i]);
        const Mat2 num = mul(rp.pre[i], mul(zt, rp.suf[i + 1]));
        out.magnetization[i] = rp.ratio(num, rp.pre_ls[i] + rp.suf_ls[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < l; ++i) {
        const Mat2 num = mul(rp.pre[i],
                             mul(spin_insert(rp.t[i]),
                                 mul(spin_insert(rp.t[i + 1]), rp.suf[i + 2])));
        out.nn_correlation[i] = rp.ratio(num, rp.pre_ls[i] + rp.suf_ls[i + 2]);
    }
    {
        // wrap bond (l-1, 0): insert spin factors before t_0 and t_{l-1}
        const Mat2 num = mul(spin_insert(rp.pre[l - 1]), spin_insert(rp.t[l - 1]));
        out.nn_correlation[l - 1] = rp.ratio(num, rp.pre_ls[l - 1]);
    }
    return out;
}

std::vector<double> ring_magnetizations(double lambda, const std::vector<double>& h) {
    return ring_observables(lambda, h).magnetization;
}

std::vector<double> ring_susceptibility(double lambda, const std::vector<double>& h) {
    check_ring_args(lambda, h);
    const std::size_t l = h.size();
    RingProducts rp(lambda, h);
    std::vector<double> m(l);
    for (std::size_t i = 0; i < l; ++i) {
        const Mat2 num = mul(rp.pre[i], mul(spin_insert(rp.t[i]), rp.suf[i + 1]));
        m[i] = rp.ratio(num, rp.pre_ls[i] + rp.suf_ls[i + 1]);
    }
    std::vector<double> chi(l * l, 0.0);
    for (std::size_t i = 0; i < l; ++i) {
        chi[i * l + i] = 1.0 - m[i] * m[i];
        // running product pre[i] . Z t_i . t_{i+1} ... t_{j-1}
        Mat2 a = mul(rp.pre[i], spin_insert(rp.t[i]));
        double a_ls = rp.pre_ls[i];
        for (std::size_t j = i + 1; j < l; ++j) {
            const Mat2 num = mul(a, mul(spin_insert(rp.t[j]), rp.suf[j + 1]));
            const double corr = rp.ratio(num, a_ls + rp.suf_ls[j + 1]);
            const double c = corr - m[i] * m[j];
            chi[i * l + j] = c;
            chi[j * l + i] = c;
            a = mul(a, rp.t[j]);
            rescale(a, &a_ls);
        }
    }
    return chi;
}

double pressure(double lambda, double h) {
    check_scalar_args(lambda, h);
    // p = lambda + |h| + log( (1+q)/2 + sqrt((1-q)^2/4 + e^{-4 lambda - 2|h|}) ),
    // q = e^{-2|h|}; every exponent is <= 0, stable for all finite arguments.
    const double ah = std::abs(h);
    const double q = std::exp(-2.0 * ah);
    const double root = std::sqrt(0.25 * (1.0 - q) * (1.0 - q) + std::exp(-4.0 * lambda - 2.0 * ah));
    return lambda + ah + std::log(0.5 * (1.0 + q) + root);
}

double magnetization_of_field(double lambda, double h) {
    check_scalar_args(lambda, h);
    if (h == 0.0) return 0.0;
    const double ah = std::abs(h);
    const double q = std::exp(-2.0 * ah);
    const double s = 0.5 * (1.0 - q);
    const double root = std::sqrt(s * s + std::exp(-4.0 * lambda - 2.0 * ah));
    return std::copysign(s / root, h);
}

double susceptibility_of_field(double lambda, double h) {
    check_scalar_args(lambda, h);
    const double ah = std::abs(h);
    const double q = std::exp(-2.0 * ah);
    const double s = 0.5 * (1.0 - q);
    const double rho2 = s * s + std::exp(-4.0 * lambda - 2.0 * ah);
    return 0.5 * (1.0 + q) * std::exp(-4.0 * lambda - 2.0 * ah) / (rho2 * std::sqrt(rho2));
}

double free_energy_derivative(double lambda, double m) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("ising1d: lambda must be finite and >= 0");
    if (!std::isfinite(m) || std::abs(m) >= 1.0)
        throw std::domain_error("ising1d: magnetization must lie in (-1, 1)");
    if (m == 0.0) return 0.0;

    double lo = std::atanh(m) - 2.0 * lambda - 1.0;
    double hi = std::atanh(m) + 2.0 * lambda + 1.0;
    // m(.) is strictly increasing; widen defensively if the bracket misses.
    for (int k = 0; k < 64 && magnetization_of_field(lambda, lo) > m; ++k) lo -= 1.0;
    for (int k = 0; k < 64 && magnetization_of_field(lambda, hi) < m; ++k) hi += 1.0;

    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        const double r = magnetization_of_field(lambda, x) - m;
        if (std::abs(r) <= 1e-12) return x;
        if (r > 0.0)
            hi = x;
        else
            lo = x;
        const double chi = susceptibility_of_field(lambda, x);
        double step = chi > 0.0 ? x - r / chi : 0.5 * (lo + hi);
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        x = step;
    }
    throw convergence_error("ising1d: field inversion did not reach residual 1e-12");
}

double free_energy_canonical(double lambda, double m) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("ising1d: lambda must be finite and >= 0");
    if (!std::isfinite(m) || std::abs(m) >= 1.0)
        throw std::domain_error("ising1d: magnetization must lie in (-1, 1)");
    const double h = free_energy_derivative(lambda, m);
    return h * m - pressure(lambda, h);
}

} // namespace lpising
