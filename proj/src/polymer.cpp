#include "lpising/polymer.hpp"

#include "lpising/multipoly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <limits>
#include <set>
#include <stdexcept>

namespace lpising {

namespace {

void check_lambda(double lambda) {
    if (!std::isfinite(lambda) || lambda < 0.0)
        throw std::invalid_argument("lambda must be finite and >= 0");
}

void check_decorations(const std::vector<double>& u) {
    for (double v : u)
        if (!std::isfinite(v) || std::abs(v) >= 1.0)
            throw std::invalid_argument("decorations must satisfy |u_i| < 1");
}

// cosh(lambda) - 1 without cancellation at small lambda.
double cosh_minus_one(double lambda) {
    const double s = std::sinh(0.5 * lambda);
    return 2.0 * s * s;
}

} // namespace

std::vector<Polymer> enumerate_polymers(int ell) {
    if (ell < 3 || ell > 12)
        throw std::length_error("enumerate_polymers: ring length must be in [3, 12]");
    std::vector<Polymer> out;
    for (int n = 1; n < ell; ++n)
        for (int start = 0; start < ell; ++start)
            for (std::uint32_t s = 0; s < (1u << n); ++s)
                out.push_back({start, n, s});
    // Wrapping support: every bond present, one starting point only.
    for (std::uint32_t s = 0; s < (1u << ell); ++s)
        out.push_back({0, ell, s});
    return out;
}

std::vector<int> polymer_x_sites(const Polymer& p, int ell) {
    std::vector<int> cover(ell, 0);
    for (int k = 0; k < p.n_pairs; ++k) {
        if ((p.s_mask >> k) & 1u) continue;
        cover[(p.start + k) % ell] += 1;
        cover[(p.start + k + 1) % ell] += 1;
    }
    std::vector<int> sites;
    for (int i = 0; i < ell; ++i)
        if (cover[i] == 1) sites.push_back(i);
    return sites;
}

double polymer_weight(const Polymer& p, int ell, double lambda,
                      const std::vector<double>& u) {
    if (ell < 3 || static_cast<int>(u.size()) != ell)
        throw std::invalid_argument("polymer_weight: decoration size mismatch");
    if (p.n_pairs < 1 || p.n_pairs > ell || p.start < 0 || p.start >= ell)
        throw std::invalid_argument("polymer_weight: support out of range");
    if (p.n_pairs < 32 && (p.s_mask >> p.n_pairs) != 0)
        throw std::invalid_argument("polymer_weight: S labels outside support");
    check_lambda(lambda);
    const int ns = std::popcount(p.s_mask);
    double w = std::pow(std::sinh(lambda), p.n_pairs - ns) *
               std::pow(cosh_minus_one(lambda), ns);
    for (int x : polymer_x_sites(p, ell)) w *= u[x];
    return w;
}

namespace {

// Shared kernel for the direct spin sum: accumulate words [begin, end).
// Identical code path for the serial and parallel entry points so the
// chunk partials agree bit for bit.
double z_star_words(std::uint32_t begin, std::uint32_t end, int ell,
                    const std::vector<double>& plus_p,
                    const std::vector<double>& minus_p,
                    const std::vector<double>& bond_w) {
    const std::uint32_t mask = (ell == 32) ? ~0u : ((1u << ell) - 1u);
    long double acc = 0.0L;
    for (std::uint32_t w = begin; w < end; ++w) {
        const std::uint32_t rot = ((w << 1) | (w >> (ell - 1))) & mask;
        const int flips = std::popcount(w ^ rot);
        long double term = bond_w[static_cast<std::size_t>(flips)];
        for (int i = 0; i < ell; ++i)
            term *= ((w >> i) & 1u) ? plus_p[i] : minus_p[i];
        acc += term;
    }
    return static_cast<double>(acc);
}

double z_star_direct(double lambda, const std::vector<double>& u, bool parallel) {
    check_lambda(lambda);
    check_decorations(u);
    const int ell = static_cast<int>(u.size());
    if (ell < 2 || ell > 14)
        throw std::length_error("z_star_enumerate: ring length must be in [2, 14]");
    std::vector<double> plus_p(ell), minus_p(ell);
    for (int i = 0; i < ell; ++i) {
        plus_p[i] = 0.5 * (1.0 + u[i]);
        minus_p[i] = 0.5 * (1.0 - u[i]);
    }
    std::vector<double> bond_w(ell + 1);
    for (int k = 0; k <= ell; ++k) bond_w[k] = std::exp(lambda * (ell - 2 * k));

    const std::uint32_t total = 1u << ell;
    const std::uint32_t chunk = 1024;
    const int nchunks = static_cast<int>((total + chunk - 1) / chunk);
    std::vector<double> partial(nchunks);
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (int c = 0; c < nchunks; ++c) {
            const std::uint32_t b = static_cast<std::uint32_t>(c) * chunk;
            partial[c] = z_star_words(b, std::min(total, b + chunk), ell,
                                      plus_p, minus_p, bond_w);
        }
    } else {
        for (int c = 0; c < nchunks; ++c) {
            const std::uint32_t b = static_cast<std::uint32_t>(c) * chunk;
            partial[c] = z_star_words(b, std::min(total, b + chunk), ell,
                                      plus_p, minus_p, bond_w);
        }
    }
    double sum = 0.0;
    for (int c = 0; c < nchunks; ++c) sum += partial[c];
    return sum;
}

} // namespace

double z_star_enumerate(double lambda, const std::vector<double>& u) {
    return z_star_direct(lambda, u, true);
}

double z_star_enumerate_serial(double lambda, const std::vector<double>& u) {
    return z_star_direct(lambda, u, false);
}

namespace {

struct ArcSupport {
    std::uint32_t site_mask = 0;
    double total_weight = 0.0; // sum over S/X labelings of the support
};

double disjoint_collections(const std::vector<ArcSupport>& arcs, std::size_t i,
                            std::uint32_t used) {
    if (i == arcs.size()) return 1.0;
    double total = disjoint_collections(arcs, i + 1, used);
    if (!(arcs[i].site_mask & used))
        total += arcs[i].total_weight *
                 disjoint_collections(arcs, i + 1, used | arcs[i].site_mask);
    return total;
}

} // namespace

double z_star_polymer(double lambda, const std::vector<double>& u) {
    check_lambda(lambda);
    check_decorations(u);
    const int ell = static_cast<int>(u.size());
    if (ell < 3 || ell > 12)
        throw std::length_error("z_star_polymer: ring length must be in [3, 12]");

    std::vector<ArcSupport> arcs;
    for (int n = 1; n < ell; ++n) {
        for (int start = 0; start < ell; ++start) {
            ArcSupport a;
            for (int k = 0; k <= n; ++k) a.site_mask |= 1u << ((start + k) % ell);
            for (std::uint32_t s = 0; s < (1u << n); ++s)
                a.total_weight += polymer_weight({start, n, s}, ell, lambda, u);
            arcs.push_back(a);
        }
    }
    double wrap = 0.0;
    for (std::uint32_t s = 0; s < (1u << ell); ++s)
        wrap += polymer_weight({0, ell, s}, ell, lambda, u);
    // The wrapping support covers every site, so it only occurs alone.
    return disjoint_collections(arcs, 0, 0u) + wrap;
}

KpReport kp_check(double lambda, double b) {
    check_lambda(lambda);
    if (!std::isfinite(b) || b < 0.0)
        throw std::invalid_argument("kp_check: margin b must be finite and >= 0");
    // Each bond of a support contributes at most
    //   sinh(lambda) e^{1+b} (1 + (cosh(lambda)-1)/sinh(lambda))
    // to the weighted activity; the bracket sums the X and S labelings and
    // simplifies to (e^lambda - 1) e^{1+b}.
    const double q = std::expm1(lambda) * std::exp(1.0 + b);
    if (q >= 1.0)
        return {false, std::numeric_limits<double>::infinity()};
    // Arcs of c bonds touching a fixed bond's two sites: c + 2 placements
    // on the line, each of total activity at most q^c, so the weighted sum
    // over polymers incompatible with a single-bond polymer is at most
    //   sum_{c>=1} (c + 2) q^c = q (3 - 2 q) / (1 - q)^2.
    const double lhs = q * (3.0 - 2.0 * q) / ((1.0 - q) * (1.0 - q));
    return {lhs <= 2.0, lhs};
}

double max_lambda_kp() {
    const auto holds = [](double lambda) {
        return kp_check(lambda, (5.0 / 12.0) * std::log(1.0 / lambda)).holds;
    };
    double lo = 1e-9, hi = 1.0;
    if (!holds(lo)) return 0.0;
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
    }
    return lo;
}

namespace {

std::vector<int> canonical_rotation(const std::vector<int>& n) {
    const int ell = static_cast<int>(n.size());
    std::vector<int> best = n, cand(ell);
    for (int r = 1; r < ell; ++r) {
        for (int i = 0; i < ell; ++i) cand[i] = n[(i + r) % ell];
        if (cand < best) best = cand;
    }
    return best;
}

std::set<std::vector<int>> rotation_orbit(const std::vector<int>& n) {
    const int ell = static_cast<int>(n.size());
    std::set<std::vector<int>> orbit;
    std::vector<int> cand(ell);
    for (int r = 0; r < ell; ++r) {
        for (int i = 0; i < ell; ++i) cand[i] = n[(i + r) % ell];
        orbit.insert(cand);
    }
    return orbit;
}

} // namespace

CoeffMap cluster_coefficients(double lambda, int ell, int max_degree) {
    check_lambda(lambda);
    if (ell < 3 || ell > 10)
        throw std::length_error("cluster_coefficients: ring length must be in [3, 10]");
    if (max_degree < 0 || max_degree > 8)
        throw std::length_error("cluster_coefficients: max degree must be in [0, 8]");

    const std::uint32_t total = 1u << ell;
    const std::uint32_t mask = total - 1u;
    // Gibbs weight of each spin word, by number of unequal neighbor pairs.
    std::vector<double> bond_w(ell + 1);
    for (int k = 0; k <= ell; ++k) bond_w[k] = std::exp(lambda * (ell - 2 * k));
    std::vector<double> word_w(total);
    for (std::uint32_t w = 0; w < total; ++w) {
        const std::uint32_t rot = ((w << 1) | (w >> (ell - 1))) & mask;
        word_w[w] = bond_w[static_cast<std::size_t>(std::popcount(w ^ rot))];
    }

    // Z* is affine in every u_i: Z* = sum_T c_T prod_{i in T} u_i with
    // c_T the uniform average of prod_{i in T} sigma_i times the Gibbs
    // weight.  Spin-flip symmetry kills odd |T|.
    const auto subset_coeff = [&](std::uint32_t t) {
        long double acc = 0.0L;
        for (std::uint32_t w = 0; w < total; ++w) {
            const int sign = (std::popcount(w & t) & 1) ? -1 : 1;
            acc += sign * static_cast<long double>(word_w[w]);
        }
        return static_cast<double>(acc) / static_cast<double>(total);
    };

    const double c0 = subset_coeff(0u);
    TruncPoly x = TruncPoly::zero(ell, max_degree);
    std::vector<std::uint8_t> exps(ell);
    for (std::uint32_t t = 1; t < total; ++t) {
        const int k = std::popcount(t);
        if ((k & 1) || k > max_degree) continue;
        for (int i = 0; i < ell; ++i) exps[i] = static_cast<std::uint8_t>((t >> i) & 1u);
        x.add_term(exps, subset_coeff(t) / c0);
    }
    const TruncPoly series = log1p_series(x);

    CoeffMap out;
    out.ring_length = ell;
    out.max_total_degree = max_degree;
    out.lambda = lambda;
    out.a0 = std::log(c0);

    // Collapse rotation orbits; translation invariance makes the values
    // within an orbit agree up to roundoff, so store their mean once.
    std::map<std::vector<int>, std::pair<double, int>> grouped;
    for (const auto& [e, c] : series.terms) {
        std::vector<int> n(e.begin(), e.end());
        auto& slot = grouped[canonical_rotation(n)];
        slot.first += c;
        slot.second += 1;
    }
    for (const auto& [n, slot] : grouped) {
        const double value = slot.first / slot.second;
        if (value == 0.0) continue;
        CoeffEntry entry;
        entry.powers = n;
        entry.value = value;
        entry.orbit_size = static_cast<int>(rotation_orbit(n).size());
        out.canonical.push_back(std::move(entry));
    }
    return out;
}

std::vector<std::pair<std::vector<int>, double>> CoeffMap::all_entries() const {
    std::vector<std::pair<std::vector<int>, double>> out;
    for (const auto& entry : canonical)
        for (const auto& n : rotation_orbit(entry.powers))
            out.emplace_back(n, entry.value);
    return out;
}

double CoeffMap::coefficient(const std::vector<int>& n) const {
    if (static_cast<int>(n.size()) != ring_length)
        throw std::invalid_argument("CoeffMap::coefficient: multi-index size mismatch");
    for (int v : n)
        if (v < 0) throw std::invalid_argument("CoeffMap::coefficient: negative power");
    const std::vector<int> canon = canonical_rotation(n);
    for (const auto& entry : canonical)
        if (entry.powers == canon) return entry.value;
    return 0.0;
}

double cluster_log_z_star(const CoeffMap& coeffs, const std::vector<double>& u) {
    if (static_cast<int>(u.size()) != coeffs.ring_length)
        throw std::invalid_argument("cluster_log_z_star: decoration size mismatch");
    check_decorations(u);
    double sum = coeffs.a0;
    for (const auto& [n, value] : coeffs.all_entries()) {
        double mono = value;
        for (int i = 0; i < coeffs.ring_length; ++i)
            for (int k = 0; k < n[i]; ++k) mono *= u[i];
        sum += mono;
    }
    return sum;
}

int multi_index_norm(const std::vector<int>& n) {
    const int ell = static_cast<int>(n.size());
    int degree = 0;
    std::vector<int> support;
    for (int i = 0; i < ell; ++i) {
        if (n[i] < 0) throw std::invalid_argument("multi_index_norm: negative power");
        degree += n[i];
        if (n[i] > 0) support.push_back(i);
    }
    if (support.empty()) return 0;
    // Smallest arc containing the support: ring length minus the largest
    // circular gap between consecutive support sites, plus the site itself.
    int max_gap = ell; // single-site support: the gap wraps all the way
    if (support.size() > 1) {
        max_gap = 0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            const int cur = support[k];
            const int next = support[(k + 1) % support.size()];
            const int gap = (next - cur + ell) % ell;
            max_gap = std::max(max_gap, gap == 0 ? ell : gap);
        }
    }
    const int reach = ell - max_gap + 1;
    return std::max(degree, reach);
}

std::vector<DecayRow> coefficient_decay_report(const CoeffMap& coeffs, double b) {
    if (!std::isfinite(b) || b < 0.0)
        throw std::invalid_argument("coefficient_decay_report: margin b must be finite and >= 0");
    // Coefficients attached to a fixed site; translation invariance makes
    // the choice of site immaterial.
    std::vector<std::pair<int, double>> norms;
    int max_norm = 1;
    for (const auto& [n, value] : coeffs.all_entries()) {
        if (n[0] <= 0) continue;
        const int norm = multi_index_norm(n);
        norms.emplace_back(norm, std::abs(value));
        max_norm = std::max(max_norm, norm);
    }
    std::vector<DecayRow> rows;
    for (int m = 1; m <= max_norm; ++m) {
        DecayRow row;
        row.min_norm = m;
        for (const auto& [norm, mag] : norms)
            if (norm >= m) row.coeff_sum += mag;
        row.envelope = std::exp(-b * m);
        rows.push_back(row);
    }
    return rows;
}

} // namespace lpising
