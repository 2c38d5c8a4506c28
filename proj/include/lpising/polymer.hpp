#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

namespace lpising {

// High-temperature polymer/cluster expansion of the decorated partition
// function on a ring of ell sites,
//
//   Z*(lambda, u) = 2^{-ell} sum_sigma exp(lambda sum_i sigma_i sigma_{i+1})
//                   prod_i (1 + sigma_i u_i),
//
// i.e. the uniform spin average of the Gibbs weight times single-site
// decorations u_i in (-1, 1).  Expanding each bond factor as
// e^{lambda ss'} = cosh(lambda) (1 + s s' tanh(lambda)) is not used here;
// instead each bond contributes e^{lambda ss'} - 1 split into an "X" part
// sinh(lambda) s s' and an "S" part cosh(lambda) - 1, which organizes Z*
// as a sum over collections of site-disjoint polymers.

// A polymer is a connected arc of consecutive bonds on the ring together
// with a labeling of each bond as S or X.  Sites covered by exactly one
// X bond carry a decoration factor u_x.  n_pairs == ring length means the
// support wraps the whole ring (only then; arcs otherwise have
// n_pairs < ring length).
struct Polymer {
    int start = 0;            // site index of the first bond (start, start+1)
    int n_pairs = 0;          // number of consecutive bonds in the support
    std::uint32_t s_mask = 0; // bit k set: bond start+k is an S bond
};

// All polymers on a ring of ell sites (3 <= ell <= 12).
std::vector<Polymer> enumerate_polymers(int ell);

// Activity of a single polymer: sinh(lambda)^{#X bonds} *
// (cosh(lambda)-1)^{#S bonds} * prod of u over singly-X-covered sites.
// The pure-X full ring has no singly covered site and weight sinh^ell.
double polymer_weight(const Polymer& p, int ell, double lambda,
                      const std::vector<double>& u);

// Sites covered by the X bonds of p exactly once, ascending.
std::vector<int> polymer_x_sites(const Polymer& p, int ell);

// Direct 2^ell spin sum (ell <= 14, |u_i| < 1).  The parallel version
// splits the spin words into fixed chunks so the reduction order, and
// hence the result, is independent of the thread count.
double z_star_enumerate(double lambda, const std::vector<double>& u);
double z_star_enumerate_serial(double lambda, const std::vector<double>& u);

// Same value as a sum over collections of pairwise site-disjoint polymers
// (3 <= ell <= 12).  Exponential in ell; kept as an independent oracle.
double z_star_polymer(double lambda, const std::vector<double>& u);

// Koteck\'y--Preiss style convergence check with weight e^{(1+b) |C|} per
// bond of a polymer's support.  lhs_max is the weighted sum of activities
// of all arc polymers touching a fixed bond's two sites (worst case, on
// the infinite line), each bond contributing at most
// q = (e^lambda - 1) e^{1+b}; the criterion requires the sum to stay
// below 2, the size of a single-bond polymer.  q >= 1 makes the sum
// diverge: holds = false with lhs_max = infinity.
struct KpReport {
    bool holds = false;
    double lhs_max = 0.0;
};
KpReport kp_check(double lambda, double b);

// Largest lambda (within 1e-6) for which kp_check(lambda, b(lambda))
// holds with the reference margin b(lambda) = (5/12) log(1/lambda).
double max_lambda_kp();

// Coefficients A_N of log Z*(lambda, u) = A_0 + sum_N A_N prod u_i^{N(i)}
// up to a total degree cutoff, computed from the multi-affine expansion of
// Z* itself.  Only even multi-indices appear (spin-flip symmetry kills odd
// total degree), and translation invariance is used to store one entry per
// rotation orbit.
struct CoeffEntry {
    std::vector<int> powers; // lexicographically smallest rotation
    double value = 0.0;
    int orbit_size = 1;      // number of distinct rotations
};

struct CoeffMap {
    int ring_length = 0;
    int max_total_degree = 0;
    double lambda = 0.0;
    double a0 = 0.0; // constant term of log Z*
    std::vector<CoeffEntry> canonical;

    // Every coefficient with its multi-index, orbits expanded.
    std::vector<std::pair<std::vector<int>, double>> all_entries() const;
    // Coefficient of prod u_i^{n_i}; zero if absent.
    double coefficient(const std::vector<int>& n) const;
};

// 3 <= ell <= 10, 0 <= max_degree <= 8.
CoeffMap cluster_coefficients(double lambda, int ell, int max_degree);

// Evaluate the truncated series a0 + sum_N A_N u^N at a decoration vector.
double cluster_log_z_star(const CoeffMap& coeffs, const std::vector<double>& u);

// max(total degree, number of sites in the smallest arc containing the
// support); the decay scale of the cluster coefficients.
int multi_index_norm(const std::vector<int>& n);

// Row M: total |A_N| over multi-indices with N(0) > 0 and norm >= M,
// against the reference envelope e^{-b M}.
struct DecayRow {
    int min_norm = 0;
    double coeff_sum = 0.0;
    double envelope = 0.0;
};
std::vector<DecayRow> coefficient_decay_report(const CoeffMap& coeffs, double b);

} // namespace lpising
