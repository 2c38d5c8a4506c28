#pragma once

#include <vector>

namespace lpising {

// Phase-diagram quantities of the layered model after the scaling limit: the
// horizontal interaction contributes the exact mean-field term -m^2/2 per
// site, the vertical coupling stays in the canonical free energy f_lambda of
// the one-dimensional ring.  Everything here works on the variational
// functional
//
//   g(m) = -h_ext m - m^2/2 + f_lambda(m),   m in (-1, 1).

struct LpPressure {
    double pressure;     // -inf_m g(m)
    double minimizer_m;  // argmin; first occurrence (ascending m) when tied
    bool degenerate;     // another local minimum ties within 1e-9
};

struct EnvelopeCurve {
    std::vector<double> m;         // evaluation grid
    std::vector<double> g;        // -m^2/2 + f_lambda(m)
    std::vector<double> envelope;  // lower convex envelope of g
    bool has_flat = false;         // coexistence plateau straddling m = 0
    double flat_lo = 0.0;
    double flat_hi = 0.0;
};

struct MagnetizationCap {
    double m_star;  // root of atanh(m) - m = h
    double m_plus;  // m_star + 0.01, capped strictly below 1
};

// Variational pressure.  Grid scan with the given step plus Newton polish;
// local minima tying within 1e-9 set the degenerate flag.  grid_step must
// lie in (0, 1e-2].
LpPressure lp_pressure(double lambda, double h_ext, double grid_step = 1e-3);

// g and its lower convex envelope on a symmetric grid; detects the flat
// coexistence segment (hull edge straddling 0 with slope below 1e-10).
EnvelopeCurve convex_envelope(double lambda, double grid_step = 1e-3);

// Positive minimizer of -m^2/2 + f_lambda(m); 0 in the uniqueness regime.
// Leading order sqrt(6 lambda) for small lambda.
double spontaneous_magnetization(double lambda);

// All roots of h_ext + m = f_lambda'(m) in (-1, 1), ascending.  Sign scan at
// step 1e-4 with bisection plus Newton polish.
std::vector<double> mean_field_solve(double lambda, double h_ext);

// Uniqueness ratio (1 + 2 lambda) / cosh^2(h_ext - 1 - 2 lambda); below 1/4
// the fixed point of the mean-field map is unique.
double dobrushin_ratio(double lambda, double h_ext);

// Larger root of 3 / cosh^2(h - 3) = 1/4: the field threshold above which
// the ratio is below 1/4 for every lambda <= 1.
double threshold_h_star();
// Smaller root of the same equation (diagnostic only).
double threshold_h_star_small_root();

// (1/4) (1/2 - 3/8) = 1/32, the lower edge of the forced-field window.
double threshold_h0();

// Root of atanh(m) - m = h and its padded cap.  Requires 0 < h <= 15.
MagnetizationCap magnetization_cap(double h);

} // namespace lpising
