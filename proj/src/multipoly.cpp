#include "lpising/multipoly.hpp"

#include <stdexcept>

namespace lpising {

int total_degree(const std::vector<std::uint8_t>& exps) {
    int d = 0;
    for (auto e : exps) d += e;
    return d;
}

void TruncPoly::add_term(const std::vector<std::uint8_t>& exps, double coeff) {
    if (static_cast<int>(exps.size()) != nvars)
        throw std::invalid_argument("TruncPoly: exponent vector size mismatch");
    if (total_degree(exps) > max_degree) return;
    auto [it, inserted] = terms.emplace(exps, coeff);
    if (!inserted) it->second += coeff;
}

TruncPoly TruncPoly::operator*(const TruncPoly& rhs) const {
    if (nvars != rhs.nvars)
        throw std::invalid_argument("TruncPoly: variable count mismatch");
    TruncPoly out = zero(nvars, max_degree);
    std::vector<std::uint8_t> exps(nvars);
    for (const auto& [ea, ca] : terms) {
        const int da = total_degree(ea);
        for (const auto& [eb, cb] : rhs.terms) {
            if (da + total_degree(eb) > max_degree) continue;
            for (int i = 0; i < nvars; ++i)
                exps[i] = static_cast<std::uint8_t>(ea[i] + eb[i]);
            auto [it, inserted] = out.terms.emplace(exps, ca * cb);
            if (!inserted) it->second += ca * cb;
        }
    }
    return out;
}

TruncPoly& TruncPoly::operator+=(const TruncPoly& rhs) {
    if (nvars != rhs.nvars)
        throw std::invalid_argument("TruncPoly: variable count mismatch");
    for (const auto& [e, c] : rhs.terms) {
        if (total_degree(e) > max_degree) continue;
        auto [it, inserted] = terms.emplace(e, c);
        if (!inserted) it->second += c;
    }
    return *this;
}

TruncPoly& TruncPoly::scale(double s) {
    for (auto& [e, c] : terms) c *= s;
    return *this;
}

TruncPoly log1p_series(const TruncPoly& x) {
    std::vector<std::uint8_t> zero_exps(x.nvars, 0);
    if (x.terms.count(zero_exps))
        throw std::invalid_argument("log1p_series: argument has a constant term");
    int min_deg = x.max_degree + 1;
    for (const auto& [e, c] : x.terms) {
        (void)c;
        min_deg = std::min(min_deg, total_degree(e));
    }
    TruncPoly out = TruncPoly::zero(x.nvars, x.max_degree);
    if (x.terms.empty()) return out;
    TruncPoly power = x;
    int k = 1;
    while (k * min_deg <= x.max_degree) {
        TruncPoly scaled = power;
        scaled.scale((k % 2 == 1 ? 1.0 : -1.0) / k);
        out += scaled;
        ++k;
        if (k * min_deg <= x.max_degree) power = power * x;
    }
    return out;
}

} // namespace lpising
