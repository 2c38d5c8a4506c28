#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lpising/errors.hpp"
#include "lpising/ising1d.hpp"
#include "lpising/rng.hpp"

using namespace lpising;

namespace {

// Independent oracle: direct enumeration of all 2^l spin words in extended
// precision.  Deliberately shares no code with the transfer-matrix path.
struct BruteRing {
    double log_z;
    std::vector<double> m;
    std::vector<double> corr;
};

BruteRing brute_ring(double lambda, const std::vector<double>& h) {
    const int l = static_cast<int>(h.size());
    long double z = 0.0L;
    std::vector<long double> sm(l, 0.0L), sc(l, 0.0L);
    for (std::uint32_t word = 0; word < (1u << l); ++word) {
        long double e = 0.0L;
        auto spin = [&](int i) { return (word >> i) & 1u ? 1 : -1; };
        for (int i = 0; i < l; ++i)
            e += lambda * spin(i) * spin((i + 1) % l) + h[i] * spin(i);
        const long double w = std::exp(e);
        z += w;
        for (int i = 0; i < l; ++i) {
            sm[i] += spin(i) * w;
            sc[i] += spin(i) * spin((i + 1) % l) * w;
        }
    }
    BruteRing out;
    out.log_z = static_cast<double>(std::log(z));
    for (int i = 0; i < l; ++i) {
        out.m.push_back(static_cast<double>(sm[i] / z));
        out.corr.push_back(static_cast<double>(sc[i] / z));
    }
    return out;
}

std::vector<double> random_fields(SplitMix64& rng, int l, double amp) {
    std::vector<double> h(l);
    for (double& v : h) v = rng.next_uniform(-amp, amp);
    return h;
}

} // namespace

TEST_CASE("ring partition function and observables match direct spin sums") {
    SplitMix64 rng(20240901u);
    for (int l = 2; l <= 12; ++l) {
        for (double lambda : {0.0, 0.05, 0.3, 1.0}) {
            const auto h = random_fields(rng, l, 2.0);
            const auto oracle = brute_ring(lambda, h);
            const auto obs = ring_observables(lambda, h);
            CHECK(obs.log_z == doctest::Approx(oracle.log_z).epsilon(1e-12));
            for (int i = 0; i < l; ++i) {
                CHECK(std::abs(obs.magnetization[i] - oracle.m[i]) < 1e-12);
                CHECK(std::abs(obs.nn_correlation[i] - oracle.corr[i]) < 1e-12);
            }
            CHECK(ring_log_z(lambda, h) == doctest::Approx(oracle.log_z).epsilon(1e-13));
        }
    }
}

TEST_CASE("zero coupling and zero field give log Z = l log 2") {
    const std::vector<double> h(3, 0.0);
    CHECK(ring_log_z(0.0, h) == doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-14));
    for (double m : ring_magnetizations(0.0, h)) CHECK(std::abs(m) < 1e-14);
}

TEST_CASE("decoupled ring magnetizations are tanh of the local field") {
    SplitMix64 rng(7u);
    const auto h = random_fields(rng, 8, 1.5);
    const auto m = ring_magnetizations(0.0, h);
    for (int i = 0; i < 8; ++i)
        CHECK(m[i] == doctest::Approx(std::tanh(h[i])).epsilon(1e-13));
}

TEST_CASE("susceptibility matrix matches finite differences of magnetizations") {
    SplitMix64 rng(99u);
    const double lambda = 0.25;
    auto h = random_fields(rng, 6, 1.0);
    const auto chi = ring_susceptibility(lambda, h);
    const double dh = 1e-6;
    for (int j = 0; j < 6; ++j) {
        auto hp = h, hm = h;
        hp[j] += dh;
        hm[j] -= dh;
        const auto mp = ring_magnetizations(lambda, hp);
        const auto mm = ring_magnetizations(lambda, hm);
        for (int i = 0; i < 6; ++i) {
            const double fd = (mp[i] - mm[i]) / (2.0 * dh);
            CHECK(chi[i * 6 + j] == doctest::Approx(fd).epsilon(5e-8));
        }
    }
    // symmetry
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j)
            CHECK(chi[i * 6 + j] == doctest::Approx(chi[j * 6 + i]).epsilon(1e-14));
}

TEST_CASE("long rings with large fields stay finite and match the pressure") {
    std::vector<double> h(2000, 0.1);
    const double per_site = ring_log_z(0.3, h) / 2000.0;
    CHECK(std::abs(per_site - pressure(0.3, 0.1)) < 1e-3);

    std::vector<double> big(100000);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = (i % 2 == 0) ? 3.0 : -3.0;
    big[0] = 50.0;
    const double lz = ring_log_z(0.2, big);
    CHECK(std::isfinite(lz));
    CHECK(lz > 0.0);
}

TEST_CASE("pressure reduces to log 2 cosh h at zero coupling") {
    CHECK(pressure(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(pressure(0.0, 0.7) == doctest::Approx(std::log(2.0 * std::cosh(0.7))).epsilon(1e-14));
    // huge fields: p ~ |h|, must not overflow
    CHECK(pressure(0.0, 400.0) == doctest::Approx(400.0).epsilon(1e-14));
    CHECK(pressure(1.0, -1000.0) == doctest::Approx(1001.0).epsilon(1e-14));
    // symmetry in h
    CHECK(pressure(0.4, 0.9) == doctest::Approx(pressure(0.4, -0.9)).epsilon(1e-15));
}

TEST_CASE("field magnetization is the pressure derivative, odd and increasing") {
    const double lambda = 0.2;
    double prev = -1.0;
    for (double h = -2.0; h <= 2.0; h += 0.25) {
        const double m = magnetization_of_field(lambda, h);
        const double fd = (pressure(lambda, h + 5e-7) - pressure(lambda, h - 5e-7)) / 1e-6;
        CHECK(std::abs(m - fd) < 1e-8);
        CHECK(m == doctest::Approx(-magnetization_of_field(lambda, -h)).epsilon(1e-14));
        CHECK(m > prev);
        prev = m;
    }
    CHECK(magnetization_of_field(0.0, 0.5) == doctest::Approx(std::tanh(0.5)).epsilon(1e-14));
    CHECK(magnetization_of_field(0.3, 0.0) == 0.0);
}

TEST_CASE("scalar susceptibility is positive and differentiates m(h)") {
    for (double h : {-1.3, -0.2, 0.0, 0.4, 2.5}) {
        const double chi = susceptibility_of_field(0.15, h);
        CHECK(chi > 0.0);
        const double fd =
            (magnetization_of_field(0.15, h + 5e-7) - magnetization_of_field(0.15, h - 5e-7)) / 1e-6;
        CHECK(chi == doctest::Approx(fd).epsilon(1e-6));
    }
}

TEST_CASE("canonical free energy at zero coupling is the binary entropy form") {
    // frozen: f_0(0.5) = 0.75 log 0.75 + 0.25 log 0.25
    CHECK(free_energy_canonical(0.0, 0.5) == doctest::Approx(-0.5623351446188084).epsilon(1e-12));
    CHECK(free_energy_canonical(0.0, 0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-13));
    for (double m = -0.9; m < 0.95; m += 0.1) {
        const double closed =
            0.5 * (1.0 + m) * std::log(0.5 * (1.0 + m)) + 0.5 * (1.0 - m) * std::log(0.5 * (1.0 - m));
        CHECK(free_energy_canonical(0.0, m) == doctest::Approx(closed).epsilon(1e-11));
        CHECK(std::abs(free_energy_derivative(0.0, m) - std::atanh(m)) < 1e-10);
    }
}

TEST_CASE("Legendre duality: the derivative field reproduces the magnetization") {
    for (double lambda : {0.0, 0.05, 0.4}) {
        for (double m = -0.95; m < 0.96; m += 0.05) {
            const double h = free_energy_derivative(lambda, m);
            CHECK(std::abs(magnetization_of_field(lambda, h) - m) <= 1e-12);
        }
    }
}

TEST_CASE("free energy is even, convex, and has finite-difference-consistent derivative") {
    const double lambda = 0.2;
    std::vector<double> grid, f;
    for (double m = -0.9; m <= 0.9001; m += 0.02) {
        grid.push_back(m);
        f.push_back(free_energy_canonical(lambda, m));
    }
    for (std::size_t i = 0; i < grid.size(); ++i)
        CHECK(f[i] == doctest::Approx(free_energy_canonical(lambda, -grid[i])).epsilon(1e-11));
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        CHECK(f[i + 1] - 2.0 * f[i] + f[i - 1] > -1e-10);
    for (double m : {-0.6, 0.1, 0.45}) {
        const double fd =
            (free_energy_canonical(lambda, m + 1e-6) - free_energy_canonical(lambda, m - 1e-6)) / 2e-6;
        CHECK(free_energy_derivative(lambda, m) == doctest::Approx(fd).epsilon(1e-7));
    }
}

TEST_CASE("small-coupling free energy shift is -lambda m^2 to first order") {
    const double lambda = 1e-3;
    for (double m : {0.1, 0.2, 0.3, 0.4, 0.5}) {
        const double shift =
            (free_energy_canonical(lambda, m) - free_energy_canonical(0.0, m)) / lambda;
        CHECK(std::abs(shift + m * m) < 5e-3);
    }
}

TEST_CASE("invalid inputs are rejected") {
    CHECK_THROWS_AS(ring_log_z(-0.1, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(ring_log_z(0.1, {0.0, std::nan("")}), std::invalid_argument);
    CHECK_THROWS_AS(ring_log_z(0.1, {0.0}), std::length_error);
    CHECK_THROWS_AS(free_energy_canonical(0.1, 1.0), std::domain_error);
    CHECK_THROWS_AS(free_energy_canonical(0.1, -1.5), std::domain_error);
    CHECK_THROWS_AS(pressure(0.1, std::nan("")), std::invalid_argument);
    CHECK_THROWS_AS(free_energy_derivative(std::nan(""), 0.5), std::invalid_argument);
}
