#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace lpising {

// Sparse multivariate polynomial truncated at a fixed total degree.
// Exponent vectors are dense per-variable power lists; terms beyond the
// truncation order are dropped on every operation.
struct TruncPoly {
    int nvars = 0;
    int max_degree = 0;
    std::map<std::vector<std::uint8_t>, double> terms;

    static TruncPoly zero(int nvars, int max_degree) { return {nvars, max_degree, {}}; }

    void add_term(const std::vector<std::uint8_t>& exps, double coeff);
    TruncPoly operator*(const TruncPoly& rhs) const;
    TruncPoly& operator+=(const TruncPoly& rhs);
    TruncPoly& scale(double s);
};

int total_degree(const std::vector<std::uint8_t>& exps);

// log(1 + x) = sum_{k>=1} (-1)^{k+1} x^k / k truncated at x.max_degree.
// Requires x to have no constant term; the minimal total degree of x keeps
// the number of powers finite.
TruncPoly log1p_series(const TruncPoly& x);

} // namespace lpising
