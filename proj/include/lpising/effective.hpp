#pragma once

#include <vector>

namespace lpising {

// Layer ensemble of the anisotropic model: inversion between layer
// magnetizations m and the tilt variables u_i = tanh(h_i), exact evaluation
// and minimization of the effective energy over u, the slope bound theta of
// the field correction xi, and the equivalence-of-ensembles gap between the
// layer-constrained and field-tilted block partition functions.

// Box edge for u: tanh(atanh(m_plus) + 1 + 2 lambda), with m_plus the padded
// magnetization cap at the uniqueness threshold field.  The margin covers the
// mean-field shift of the inverse fields so every admissible m inverts to a
// u inside the box.
double u_box_edge(double lambda);

struct UVector {
    std::vector<double> u;       // tanh of the layer fields
    double u_plus = 0.0;         // box edge, |u_i| <= u_plus < 1
    double contraction = 0.0;    // row-sum norm of the Jacobian of m(u) - u
};

// Solves m_i = <sigma_i> of the ring at fields h_j = atanh(u_j) for u, by
// damped Newton started at u = m, to residual 1e-12 in sup norm.  The
// correction map m(u) - u must be a contraction (certificate reported in the
// result and required < 1).  lambda = 0 returns u = m exactly.
// Throws domain_error when some |m_i| exceeds the magnetization cap and
// convergence_error when Newton stalls or the certificate fails.
UVector u_from_m(double lambda, const std::vector<double>& m);

struct EffEnergy {
    double value = 0.0;
    std::vector<double> gradient;  // d value / d u_i, exact chain rule
};

// Effective energy of a tilt vector u at external field h_ext,
//
//   H(u) = -sum_i { m_i^2/2 - h_i m_i + h_ext m_i } - sum_i log(2 cosh h_i)
//          - log Z* + A_0,
//
// with h_i = atanh(u_i), m_i the exact ring magnetizations, log Z* the
// decorated ring sum (ring log Z minus the field normalizer) and A_0 its
// value at u = 0.  The gradient is exact via the ring susceptibility:
// dH/du_j = -sum_i (m_i + h_ext - h_i) chi_ij / (1 - u_j^2).
// Throws domain_error when some |u_i| >= 1.
EffEnergy eff_energy(double lambda, double h_ext, const std::vector<double>& u);

// Entropy remainder T(u) in log(2 cosh h) = h u - u^2/2 - T(u), u = tanh h:
//   T(u) = -log 2 + sum_{k>=1} u^{2k+2} / ((2k+1)(2k+2)),
// evaluated in closed form; convex with T''(u) = u^2/(1-u^2).  At lambda = 0
// the effective energy per site of a homogeneous u is T(u) - h_ext u.
double entropy_remainder(double u);

struct LocalMinimum {
    std::vector<double> u;
    double value = 0.0;
    double spread = 0.0;  // max_i u_i - min_i u_i
};

struct MinimizeReport {
    std::vector<double> argmin;
    double value = 0.0;
    double spread = 0.0;
    std::vector<LocalMinimum> minima;  // distinct local minima, best first
};

// Multistart projected gradient minimization of eff_energy over the box
// |u_i| <= u_box_edge(lambda).  Half the restarts start from a homogeneous
// grid of tilts, half from the same grid perturbed componentwise by at most
// 0.3; the run is deterministic and independent of the thread count.
// drop_constant removes the additive constant A_0 from the objective; it is
// exposed so tests can assert that the constant cannot move minimizers.
// Throws invalid_argument when ell < 3 or restarts < 1.
MinimizeReport minimize_eff(double lambda, double h_ext, int ell, int restarts = 32,
                            bool drop_constant = false);

// xi(u) = (atanh(u) - u) (1 - u^2), the field correction entering the slope
// bound.  Throws domain_error when |u| >= 1.
double xi(double u);

// Divided difference (xi(a) - xi(b)) / (a - b); on the diagonal the
// derivative xi'(a) = 3 a^2 - 2 a atanh(a).  Exactly symmetric in (a, b).
double theta(double a, double b);

// Maximum of theta over an n x n grid of (u, u') in [-cap, cap]^2 including
// endpoints.  The serial and parallel evaluations return identical bits.
double theta_grid_max(int points = 2001, double cap = 0.999);
double theta_grid_max_serial(int points = 2001, double cap = 0.999);

struct EnsembleGap {
    int ell = 0;
    double gap = 0.0;         // grand_term + phi, the signed equivalence gap
    double phi = 0.0;         // layer-constrained free energy phi_ell
    double grand_term = 0.0;  // (1/ell^2) log{ e^{-ell sum h_i m_i} Z_block }
};

// Equivalence-of-ensembles gap of the ell x ell block: phi_ell is computed
// by an exact dynamic program over columns with the per-layer sum constraint
// sum_x sigma(x,i) = ell m_i, and the tilted term uses the fields h from
// u_from_m, with log Z_block = ell * ring log Z.  The gap is signed and
// shrinks as ell grows.  Throws length_error when ell > 5 and domain_error
// when some ell*m_i is not an integer of parity ell.
EnsembleGap ensemble_gap(double lambda, int ell, const std::vector<double>& m);

} // namespace lpising
