#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

namespace lpising {

// Exact decomposition of a monomial u_1^{n_1} ... u_k^{n_k} of degree
// N >= 2 into a convex combination of pure powers u_i^N minus
// negative-coefficient polynomials multiplying squared gradients:
//
//   M_n(u) = sum_i p_i u_i^N + sum_{i<j} d_{i,j}(u) (u_i - u_j)^2.
//
// The data comes from an absorbing random walk that merges the exponents
// pairwise; all probabilities and expected occupation counts are computed
// with exact rational arithmetic, so the identity holds coefficient by
// coefficient, not merely within a tolerance.

// Exponent vector (n_1, ..., n_k), all entries >= 1.
class MultiIndex {
public:
    explicit MultiIndex(std::vector<int> parts);

    int k() const { return static_cast<int>(parts_.size()); }
    int total() const { return total_; }          // N
    int partial(int j) const;                     // N_j = n_1 + ... + n_j, 1-based
    const std::vector<int>& parts() const { return parts_; }

private:
    std::vector<int> parts_;
    int total_ = 0;
};

// State (component, position) of the merging walk.  Components i < k-1
// hold positions 1..N_{i+1}-1; the last component k-1 holds 0..N_k with
// absorbing traps at both ends.
struct ChainState {
    int component = 0; // 1-based
    int position = 0;
};

struct AbsorbingChain {
    std::vector<int> n;
    std::vector<ChainState> states;
    // Sparse stochastic rows over state indices; exact rationals.
    std::vector<std::vector<std::pair<std::size_t, mpq_class>>> rows;
    std::size_t start = 0;       // state (1, n_1)
    std::size_t trap_bottom = 0; // (k-1, 0)
    std::size_t trap_top = 0;    // (k-1, N_k)

    std::size_t index_of(int component, int position) const;
};

// Requires k >= 2 (a single variable needs no walk) and N >= 2.
AbsorbingChain build_chain(const MultiIndex& n);

struct PolyTerm {
    std::vector<int> powers; // one exponent per variable
    mpq_class coeff;
};

// d_{i,j} attached to (u_i - u_j)^2, variable labels 1-based, i < j.
// c holds the walk coefficients c_{i,j;m} (m = 1..N_j-1) in the order the
// variables were processed; terms is the same polynomial expanded in the
// caller's variable order (these differ only under canonicalization).
struct GradPolynomial {
    int i = 0;
    int j = 0;
    std::vector<mpq_class> c;
    std::vector<PolyTerm> terms;
};

struct GradDecomposition {
    std::vector<int> n;
    std::vector<mpq_class> p; // absorption probabilities, sum exactly 1
    std::vector<GradPolynomial> d;
};

// Decompose by exact linear solves on the walk, component by component.
// k = 1 returns the trivial result p = (1), d empty.  N < 2 is a domain
// error.  With canonicalize set, variables are processed in ascending
// exponent order (original order otherwise fixes the representation); the
// output is relabeled back to the caller's variable order.
GradDecomposition decompose(const MultiIndex& n, bool canonicalize = false);

// Expand both sides as exact rational polynomials and compare coefficient
// maps; malformed decomposition data simply compares unequal.
bool verify_identity(const MultiIndex& n, const GradDecomposition& dec);

// Empirical constant of the sup bound: max over (i,j) of the exact sup of
// |d_{i,j}| on the box |u_r| <= U, divided by U^{N-2} N^3.  All
// coefficients of a d_{i,j} share their sign and every monomial has total
// degree N-2, so the sup is attained at a vertex of the box and the U
// dependence cancels.  Requires 0 < U <= 1.
double coefficient_bound_report(const MultiIndex& n, const GradDecomposition& dec,
                                double U);

// Diagnostics for the underlying symmetric walk on {0, ..., span} with
// absorption at both ends, solved exactly: expected number of visits to
// each transient position 1..span-1 when started from entry, and the
// probability of absorption at span from each transient start.
std::vector<mpq_class> expected_visits(int span, int entry);
std::vector<mpq_class> absorption_at_top(int span);

} // namespace lpising
