#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpising/effective.hpp"
#include "lpising/errors.hpp"
#include "lpising/ising1d.hpp"
#include "lpising/phase.hpp"
#include "lpising/polymer.hpp"
#include "lpising/rng.hpp"

using namespace lpising;

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

std::vector<double> atanh_all(const std::vector<double>& u) {
    std::vector<double> h(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) h[i] = std::atanh(u[i]);
    return h;
}

// Scalar restriction of the variational objective to homogeneous fields:
// psi(h) = m^2/2 + (h_ext - h) m + (1/l) log Z with the exact finite-ring
// magnetization m(h).  Maximized by scan plus golden section.
double scalar_obj(double lambda, double h_ext, int ell, double h) {
    const std::vector<double> hv(ell, h);
    const double m = ring_magnetizations(lambda, hv)[0];
    return 0.5 * m * m + (h_ext - h) * m + ring_log_z(lambda, hv) / ell;
}

double scalar_max(double lambda, double h_ext, int ell) {
    double best_h = 0.0, best = scalar_obj(lambda, h_ext, ell, 0.0);
    for (double h = -4.0; h <= 4.0; h += 0.005) {
        const double v = scalar_obj(lambda, h_ext, ell, h);
        if (v > best) {
            best = v;
            best_h = h;
        }
    }
    double a = best_h - 0.01, b = best_h + 0.01;
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = scalar_obj(lambda, h_ext, ell, x1), f2 = scalar_obj(lambda, h_ext, ell, x2);
    for (int it = 0; it < 120; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = scalar_obj(lambda, h_ext, ell, x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = scalar_obj(lambda, h_ext, ell, x2);
        }
    }
    return scalar_obj(lambda, h_ext, ell, 0.5 * (a + b));
}

double a0_ring(double lambda, int ell) {
    return ring_log_z(lambda, std::vector<double>(ell, 0.0)) - ell * std::log(2.0);
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace

TEST_CASE("zero coupling inverts trivially: u equals m") {
    const std::vector<double> m{0.3, -0.55, 0.0, 0.9, -0.12};
    const UVector uv = u_from_m(0.0, m);
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(uv.u[i] == m[i]);
    CHECK(uv.contraction == 0.0);
    CHECK(uv.u_plus < 1.0);
    CHECK(uv.u_plus > 0.999);
}

TEST_CASE("inversion round trip reproduces the layer magnetizations") {
    SplitMix64 rng(123);
    for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> m(6);
        for (double& v : m) v = rng.next_uniform(-0.5, 0.5);
        const UVector uv = u_from_m(0.05, m);
        const std::vector<double> mm = ring_magnetizations(0.05, atanh_all(uv.u));
        CHECK(sup_diff(mm, m) <= 1e-12);
        CHECK(uv.contraction < 1.0);
        for (double v : uv.u) CHECK(std::fabs(v) <= uv.u_plus);
    }
}

TEST_CASE("round trip across couplings; certificate grows with the coupling") {
    const std::vector<double> m{0.4, -0.2, 0.0, 0.25, -0.45};
    double prev_r = -1.0;
    for (double lambda : {0.02, 0.1, 0.2}) {
        const UVector uv = u_from_m(lambda, m);
        const std::vector<double> mm = ring_magnetizations(lambda, atanh_all(uv.u));
        CHECK(sup_diff(mm, m) <= 1e-12);
        CHECK(uv.contraction < 1.0);
        CHECK(uv.contraction > prev_r);
        prev_r = uv.contraction;
    }
}

TEST_CASE("homogeneous m gives a homogeneous u and the scalar inverse field") {
    const UVector uv = u_from_m(0.1, std::vector<double>(10, 0.3));
    const auto [lo, hi] = std::minmax_element(uv.u.begin(), uv.u.end());
    CHECK(*hi - *lo <= 1e-12);
    // The infinite-ring inverse field; the finite-ring correction decays
    // like the eigenvalue ratio to the power ell.
    CHECK(std::atanh(uv.u[0]) ==
          doctest::Approx(free_energy_derivative(0.1, 0.3)).epsilon(1e-8));
}

TEST_CASE("inversion refuses magnetizations beyond the cap and large couplings") {
    CHECK_THROWS_AS(u_from_m(0.05, {0.99999995, 0.0}), std::domain_error);
    CHECK_THROWS_AS(u_from_m(2.0, {0.2, -0.1, 0.3, 0.0, 0.1, -0.2}), convergence_error);
    CHECK_THROWS_AS(u_from_m(-0.1, {0.2, 0.1}), std::invalid_argument);
    CHECK_THROWS_AS(u_from_m(0.1, {0.2}), std::invalid_argument);
}

TEST_CASE("decoupled layers: energy per site is the entropy remainder minus the drive") {
    const double u = 0.37, h_ext = 0.7;
    const EffEnergy e = eff_energy(0.0, h_ext, std::vector<double>(6, u));
    CHECK(e.value / 6 == doctest::Approx(entropy_remainder(u) - h_ext * u).epsilon(1e-13));

    const std::vector<double> v{0.1, -0.6, 0.33, 0.0, -0.05};
    const EffEnergy e2 = eff_energy(0.0, 0.25, v);
    double expect = 0.0;
    for (double c : v) expect += entropy_remainder(c) - 0.25 * c;
    CHECK(e2.value == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("entropy remainder matches its series and is convex") {
    CHECK(entropy_remainder(0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
    // -log 2 + u^4/12 + u^6/30 + u^8/56 + ...; at u = 0.1 the first omitted
    // term u^12/132 is below 1e-14.
    const double u = 0.1;
    const double series = -std::log(2.0) + std::pow(u, 4) / 12 + std::pow(u, 6) / 30 +
                          std::pow(u, 8) / 56 + std::pow(u, 10) / 90;
    CHECK(entropy_remainder(u) == doctest::Approx(series).epsilon(1e-12));
    // log(2 cosh h) = h u - u^2/2 - T(u) at u = tanh h.
    const double h = 1.3, uu = std::tanh(1.3);
    CHECK(std::log(2.0 * std::cosh(h)) ==
          doctest::Approx(h * uu - 0.5 * uu * uu - entropy_remainder(uu)).epsilon(1e-14));
    CHECK_THROWS_AS(entropy_remainder(1.0), std::domain_error);
}

TEST_CASE("effective energy agrees with the decorated-ring enumeration") {
    SplitMix64 rng(77);
    std::vector<double> u(8);
    for (double& v : u) v = rng.next_uniform(-0.6, 0.6);
    const double lambda = 0.12, h_ext = 0.4;

    const std::vector<double> h = atanh_all(u);
    const std::vector<double> m = ring_magnetizations(lambda, h);
    double body = 0.0, norm = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        body += 0.5 * m[i] * m[i] - h[i] * m[i] + h_ext * m[i];
        norm += std::log(2.0 * std::cosh(h[i]));
    }
    const double oracle =
        -body - norm - std::log(z_star_enumerate(lambda, u)) + a0_ring(lambda, 8);

    const EffEnergy e = eff_energy(lambda, h_ext, u);
    CHECK(e.value == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("effective energy gradient matches central differences") {
    SplitMix64 rng(991);
    for (int rep = 0; rep < 3; ++rep) {
        std::vector<double> u(6);
        for (double& v : u) v = rng.next_uniform(-0.4, 0.4);
        const double lambda = 0.08, h_ext = 0.3, step = 1e-5;
        const EffEnergy e = eff_energy(lambda, h_ext, u);
        for (std::size_t j = 0; j < u.size(); ++j) {
            std::vector<double> up = u, dn = u;
            up[j] += step;
            dn[j] -= step;
            const double fd = (eff_energy(lambda, h_ext, up).value -
                               eff_energy(lambda, h_ext, dn).value) /
                              (2.0 * step);
            CHECK(e.gradient[j] == doctest::Approx(fd).epsilon(1e-6));
        }
    }
}

TEST_CASE("effective energy is rotation invariant") {
    const std::vector<double> u{0.2, -0.4, 0.1, 0.55, -0.3, 0.05};
    const EffEnergy e = eff_energy(0.1, 0.2, u);
    std::vector<double> r(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) r[i] = u[(i + 1) % u.size()];
    const EffEnergy er = eff_energy(0.1, 0.2, r);
    CHECK(er.value == doctest::Approx(e.value).epsilon(1e-12));
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(er.gradient[i] == doctest::Approx(e.gradient[(i + 1) % u.size()]).epsilon(1e-9));
}

TEST_CASE("effective energy rejects tilts at or beyond one") {
    CHECK_THROWS_AS(eff_energy(0.1, 0.0, {0.2, 1.0}), std::domain_error);
    CHECK_THROWS_AS(eff_energy(0.1, 0.0, {0.2, -1.5}), std::domain_error);
}

TEST_CASE("magnetization correction matches the truncated coefficient series") {
    // m_i - u_i against (1 - u_i^2) sum_N N(i) A_N u^{N - e_i}; the omitted
    // tail starts at total degree ten and is far below the tolerance at
    // |u_i| <= 0.05.
    const double lambda = 0.05;
    const int ell = 8;
    const CoeffMap cm = cluster_coefficients(lambda, ell, 8);
    const auto entries = cm.all_entries();

    SplitMix64 rng(4242);
    std::vector<double> u(ell);
    for (double& v : u) v = rng.next_uniform(-0.05, 0.05);
    const std::vector<double> m = ring_magnetizations(lambda, atanh_all(u));

    for (int i = 0; i < ell; ++i) {
        double series = 0.0;
        for (const auto& [powers, value] : entries) {
            if (powers[i] == 0) continue;
            double term = powers[i] * value;
            for (int k = 0; k < ell; ++k) {
                const int p = powers[k] - (k == i ? 1 : 0);
                for (int q = 0; q < p; ++q) term *= u[k];
            }
            series += term;
        }
        series *= 1.0 - u[i] * u[i];
        CHECK(std::fabs((m[i] - u[i]) - series) <= 1e-12);
    }
}

TEST_CASE("free minimization finds the two symmetric homogeneous wells") {
    const MinimizeReport rep = minimize_eff(0.05, 0.0, 6);
    REQUIRE(rep.minima.size() >= 2);
    CHECK(rep.minima[0].spread <= 1e-6);
    CHECK(rep.minima[1].spread <= 1e-6);
    CHECK(rep.minima[0].value == doctest::Approx(rep.minima[1].value).epsilon(1e-9));
    for (int i = 0; i < 6; ++i)
        CHECK(rep.minima[0].u[i] == doctest::Approx(-rep.minima[1].u[i]).epsilon(1e-6));
    CHECK(std::fabs(rep.argmin[0]) > 0.3);
    CHECK(std::fabs(rep.argmin[0]) < 0.8);
    const EffEnergy e = eff_energy(0.05, 0.0, rep.argmin);
    for (double g : e.gradient) CHECK(std::fabs(g) <= 1e-8);
}

TEST_CASE("driven minimization has a unique homogeneous minimizer") {
    const MinimizeReport rep = minimize_eff(0.05, 0.2, 6);
    CHECK(rep.minima.size() == 1);
    CHECK(rep.spread <= 1e-6);
    CHECK(rep.argmin[0] > 0.5);
    const EffEnergy e = eff_energy(0.05, 0.2, rep.argmin);
    for (double g : e.gradient) CHECK(std::fabs(g) <= 1e-8);
}

TEST_CASE("per-site minimum matches the scalar reduction and decreases in ell") {
    const double lambda = 0.05, h_ext = 0.2;
    double prev = 1e30;
    for (int ell : {4, 6, 8}) {
        const MinimizeReport rep = minimize_eff(lambda, h_ext, ell);
        const double oracle = -scalar_max(lambda, h_ext, ell) + a0_ring(lambda, ell) / ell;
        CHECK(rep.value / ell == doctest::Approx(oracle).epsilon(1e-6));
        CHECK(rep.value / ell <= prev + 1e-10);
        prev = rep.value / ell;
    }
}

TEST_CASE("per-site minimum approaches the variational pressure") {
    const double lambda = 0.05, h_ext = 0.2;
    const MinimizeReport rep = minimize_eff(lambda, h_ext, 12);
    const double limit = -lp_pressure(lambda, h_ext).pressure + a0_ring(lambda, 12) / 12;
    CHECK(rep.value / 12 == doctest::Approx(limit).epsilon(1e-6));
}

TEST_CASE("the additive constant cannot move minimizers") {
    const MinimizeReport with = minimize_eff(0.05, 0.2, 6);
    const MinimizeReport without = minimize_eff(0.05, 0.2, 6, 32, true);
    for (int i = 0; i < 6; ++i) CHECK(with.argmin[i] == without.argmin[i]);
    const double a0 = cluster_coefficients(0.05, 6, 0).a0;
    CHECK(with.value - without.value == doctest::Approx(a0).epsilon(1e-13));
}

TEST_CASE("minimization inputs are validated") {
    CHECK_THROWS_AS(minimize_eff(0.05, 0.0, 2), std::invalid_argument);
    CHECK_THROWS_AS(minimize_eff(0.05, 0.0, 6, 0), std::invalid_argument);
}

TEST_CASE("theta values, symmetry and continuity") {
    CHECK(theta(0.0, 0.0) == 0.0);
    CHECK(theta(0.665, 0.665) == doctest::Approx(0.2604).epsilon(5e-4));
    SplitMix64 rng(5);
    for (int rep = 0; rep < 50; ++rep) {
        const double a = rng.next_uniform(-0.99, 0.99);
        const double b = rng.next_uniform(-0.99, 0.99);
        CHECK(theta(a, b) == theta(b, a));
    }
    for (double u : {-0.9, -0.5, 0.0, 0.3, 0.665, 0.9}) {
        CHECK(std::fabs(theta(u, u + 1e-6) - theta(u, u)) <= 1e-5);
        // diagonal formula against a symmetric difference of xi
        const double d = 1e-5;
        const double fd = (xi(u + d) - xi(u - d)) / (2.0 * d);
        CHECK(theta(u, u) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("theta grid maximum stays below 3/8; parallel equals serial") {
    const double mx = theta_grid_max(2001, 0.999);
    CHECK(mx == theta_grid_max_serial(2001, 0.999));
    CHECK(mx <= 0.375);
    CHECK(mx >= 0.26);
    // the maximum sits on the diagonal, whose peak is about 0.260381
    CHECK(mx <= 0.26039);
    CHECK_THROWS_AS(theta_grid_max(1, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(theta_grid_max(100, 1.0), std::invalid_argument);
}

TEST_CASE("ensemble gap at zero coupling matches the binomial closed form") {
    for (int ell : {2, 4}) {
        const EnsembleGap g = ensemble_gap(0.0, ell, std::vector<double>(ell, 0.0));
        const double phi = -std::log(binom(ell, ell / 2)) / ell;
        CHECK(g.phi == doctest::Approx(phi).epsilon(1e-12));
        CHECK(g.gap == doctest::Approx(std::log(2.0) + phi).epsilon(1e-12));
    }
}

TEST_CASE("constrained block sum matches brute-force enumeration") {
    // ell = 3, lambda = 0.13, layer sums (1, -1, 1)
    {
        const double lambda = 0.13;
        double sum = 0.0;
        for (int w = 0; w < 512; ++w) {
            int spin[3][3], layer[3] = {0, 0, 0};
            for (int x = 0; x < 3; ++x)
                for (int i = 0; i < 3; ++i) {
                    spin[x][i] = (w >> (3 * x + i)) & 1 ? 1 : -1;
                    layer[i] += spin[x][i];
                }
            if (layer[0] != 1 || layer[1] != -1 || layer[2] != 1) continue;
            int bonds = 0;
            for (int x = 0; x < 3; ++x)
                for (int i = 0; i < 3; ++i) bonds += spin[x][i] * spin[x][(i + 1) % 3];
            sum += std::exp(lambda * bonds);
        }
        const EnsembleGap g = ensemble_gap(lambda, 3, {1.0 / 3, -1.0 / 3, 1.0 / 3});
        CHECK(g.phi == doctest::Approx(-std::log(sum) / 9).epsilon(1e-12));
        CHECK(g.gap == doctest::Approx(g.grand_term + g.phi).epsilon(1e-15));
    }
    // ell = 2 with the doubled vertical bond
    {
        const double lambda = 0.2;
        double sum = 0.0;
        for (int w = 0; w < 16; ++w) {
            int spin[2][2], layer[2] = {0, 0};
            for (int x = 0; x < 2; ++x)
                for (int i = 0; i < 2; ++i) {
                    spin[x][i] = (w >> (2 * x + i)) & 1 ? 1 : -1;
                    layer[i] += spin[x][i];
                }
            if (layer[0] != 0 || layer[1] != 0) continue;
            int bonds = 0;
            for (int x = 0; x < 2; ++x)
                for (int i = 0; i < 2; ++i) bonds += spin[x][i] * spin[x][(i + 1) % 2];
            sum += std::exp(lambda * bonds);
        }
        const EnsembleGap g = ensemble_gap(lambda, 2, {0.0, 0.0});
        CHECK(g.phi == doctest::Approx(-std::log(sum) / 4).epsilon(1e-12));
    }
}

TEST_CASE("ensemble gap shrinks from ell 2 to ell 4") {
    const EnsembleGap g2 = ensemble_gap(0.1, 2, {0.0, 0.0});
    const EnsembleGap g4 = ensemble_gap(0.1, 4, {0.0, 0.0, 0.0, 0.0});
    CHECK(std::fabs(g4.gap) < std::fabs(g2.gap));
}

TEST_CASE("ensemble gap fields reproduce the layer magnetizations") {
    const std::vector<double> m{0.5, 0.0, -0.5, 0.0};
    const UVector uv = u_from_m(0.1, m);
    const std::vector<double> mm = ring_magnetizations(0.1, atanh_all(uv.u));
    CHECK(sup_diff(mm, m) <= 1e-12);
    const EnsembleGap g = ensemble_gap(0.1, 4, m);
    CHECK(std::isfinite(g.gap));
    CHECK(std::fabs(g.gap) < 1.0);
}

TEST_CASE("largest admissible block runs and stays bounded") {
    const EnsembleGap g = ensemble_gap(0.1, 5, std::vector<double>(5, 0.2));
    CHECK(std::isfinite(g.gap));
    CHECK(std::fabs(g.gap) < 1.0);
}

TEST_CASE("ensemble gap validates size, parity and shape") {
    CHECK_THROWS_AS(ensemble_gap(0.1, 6, std::vector<double>(6, 0.0)), std::length_error);
    CHECK_THROWS_AS(ensemble_gap(0.1, 4, std::vector<double>(4, 0.3)), std::domain_error);
    CHECK_THROWS_AS(ensemble_gap(0.1, 4, std::vector<double>(4, 0.25)), std::domain_error);
    CHECK_THROWS_AS(ensemble_gap(0.1, 1, {0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ensemble_gap(0.1, 4, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("box edge sits strictly inside the open interval") {
    CHECK(u_box_edge(0.05) > 0.999);
    CHECK(u_box_edge(0.05) < 1.0);
    CHECK(u_box_edge(0.2) > u_box_edge(0.0));
}
