#pragma once

#include <vector>

namespace lpising {

// One-dimensional Ising ring at unit temperature,
//
//   Z_{l,h} = sum_sigma exp( lambda * sum_i sigma_i sigma_{i+1} + sum_i h_i sigma_i ),
//
// with periodic index arithmetic (site l wraps to site 1) and site-dependent
// fields h_i.  For l = 2 the trace convention counts the bond twice, i.e.
// the coupling between the two sites is 2*lambda; this matches the column
// rings used by the block ensembles.  All routines are log-scaled so fields
// of any magnitude and rings up to l ~ 1e5 neither overflow nor underflow.

// Exact observables of one ring.
struct RingObservables {
    double log_z = 0.0;
    std::vector<double> magnetization;   // <sigma_i>
    std::vector<double> nn_correlation;  // entry i is <sigma_i sigma_{i+1 mod l}>
};

// log Z_{l,h}.  Requires lambda >= 0 finite, h.size() >= 2, finite fields.
double ring_log_z(double lambda, const std::vector<double>& h);

// Site magnetizations <sigma_i> of the ring, exact via partial transfer
// products (no finite differences).
std::vector<double> ring_magnetizations(double lambda, const std::vector<double>& h);

// log Z plus magnetizations and nearest-neighbour correlations in one pass.
RingObservables ring_observables(double lambda, const std::vector<double>& h);

// Connected pair correlations chi_ij = <sigma_i sigma_j> - m_i m_j, the
// Jacobian d m_i / d h_j.  Row-major l x l, symmetric.  O(l^2).
std::vector<double> ring_susceptibility(double lambda, const std::vector<double>& h);

// Thermodynamic pressure p_lambda(h) = log of the largest transfer-matrix
// eigenvalue,  e^lambda cosh h + sqrt(e^{2 lambda} sinh^2 h + e^{-2 lambda}).
double pressure(double lambda, double h);

// m(h) = dp/dh = e^lambda sinh h / sqrt(e^{2 lambda} sinh^2 h + e^{-2 lambda}).
double magnetization_of_field(double lambda, double h);

// dm/dh = e^{-lambda} cosh h / (e^{2 lambda} sinh^2 h + e^{-2 lambda})^{3/2} > 0.
double susceptibility_of_field(double lambda, double h);

// Legendre transform f_lambda(m) = sup_h { h m - p_lambda(h) }, evaluated by
// inverting the strictly increasing m(h).  Requires |m| < 1.
double free_energy_canonical(double lambda, double m);

// f_lambda'(m): the unique field h with m(h) = m.  Requires |m| < 1.
// The inversion brackets h in [atanh(m) - 2 lambda - 1, atanh(m) + 2 lambda + 1]
// and polishes with Newton to residual 1e-12 in m.
double free_energy_derivative(double lambda, double m);

} // namespace lpising
