#include "lpising/monomial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace lpising {

MultiIndex::MultiIndex(std::vector<int> parts) : parts_(std::move(parts)) {
    if (parts_.empty())
        throw std::invalid_argument("MultiIndex: at least one exponent required");
    for (int v : parts_) {
        if (v < 1) throw std::invalid_argument("MultiIndex: exponents must be >= 1");
        total_ += v;
    }
}

int MultiIndex::partial(int j) const {
    if (j < 1 || j > k()) throw std::invalid_argument("MultiIndex: partial index out of range");
    int s = 0;
    for (int i = 0; i < j; ++i) s += parts_[i];
    return s;
}

std::size_t AbsorbingChain::index_of(int component, int position) const {
    for (std::size_t s = 0; s < states.size(); ++s)
        if (states[s].component == component && states[s].position == position) return s;
    throw std::out_of_range("AbsorbingChain: no such state");
}

AbsorbingChain build_chain(const MultiIndex& mi) {
    const int k = mi.k();
    if (k < 2) throw std::invalid_argument("build_chain: need at least two variables");
    if (mi.total() < 2) throw std::invalid_argument("build_chain: total degree must be >= 2");

    AbsorbingChain chain;
    chain.n = mi.parts();
    for (int i = 1; i < k; ++i) {
        const int span = mi.partial(i + 1);
        const int lo = (i == k - 1) ? 0 : 1;
        const int hi = (i == k - 1) ? span : span - 1;
        for (int x = lo; x <= hi; ++x) chain.states.push_back({i, x});
    }
    chain.start = chain.index_of(1, mi.parts()[0]);
    chain.trap_bottom = chain.index_of(k - 1, 0);
    chain.trap_top = chain.index_of(k - 1, mi.total());

    const mpq_class half(1, 2);
    chain.rows.resize(chain.states.size());
    for (std::size_t s = 0; s < chain.states.size(); ++s) {
        if (s == chain.trap_bottom || s == chain.trap_top) {
            chain.rows[s].emplace_back(s, mpq_class(1));
            continue;
        }
        const auto [i, x] = chain.states[s];
        const int span = mi.partial(i + 1);
        std::map<std::size_t, mpq_class> row;
        for (int step : {-1, +1}) {
            const int y = x + step;
            const bool inside =
                (i == k - 1) ? (y >= 0 && y <= span) : (y >= 1 && y <= span - 1);
            // Leaving a component's range means merging into the next one
            // at its combined exponent, from either edge.
            const std::size_t target =
                inside ? chain.index_of(i, y) : chain.index_of(i + 1, span);
            row[target] += half;
        }
        chain.rows[s].assign(row.begin(), row.end());
    }
    return chain;
}

namespace {

// Solve (I - Q) x = rhs exactly where Q is the transient part of the
// symmetric walk on {0, ..., span}: a path of span-1 nodes with 1/2 on
// adjacent pairs.  Thomas elimination; Q is symmetric, so the same solve
// serves absorption vectors and occupation (visit count) vectors.
std::vector<mpq_class> solve_walk_system(int span, std::vector<mpq_class> rhs) {
    const std::size_t s = static_cast<std::size_t>(span) - 1;
    const mpq_class off(-1, 2);
    std::vector<mpq_class> diag(s, mpq_class(1));
    for (std::size_t r = 1; r < s; ++r) {
        const mpq_class m = off / diag[r - 1];
        diag[r] -= m * off;
        rhs[r] -= m * rhs[r - 1];
    }
    std::vector<mpq_class> x(s);
    x[s - 1] = rhs[s - 1] / diag[s - 1];
    for (std::size_t r = s - 1; r-- > 0;) x[r] = (rhs[r] - off * x[r + 1]) / diag[r];
    return x;
}

void check_span(int span) {
    if (span < 2) throw std::invalid_argument("walk span must be >= 2");
}

} // namespace

std::vector<mpq_class> expected_visits(int span, int entry) {
    check_span(span);
    if (entry < 1 || entry > span - 1)
        throw std::invalid_argument("expected_visits: entry must be a transient position");
    std::vector<mpq_class> rhs(span - 1, mpq_class(0));
    rhs[entry - 1] = 1;
    return solve_walk_system(span, std::move(rhs));
}

std::vector<mpq_class> absorption_at_top(int span) {
    check_span(span);
    std::vector<mpq_class> rhs(span - 1, mpq_class(0));
    rhs[span - 2] = mpq_class(1, 2);
    return solve_walk_system(span, std::move(rhs));
}

namespace {

GradDecomposition decompose_in_order(const MultiIndex& mi) {
    const int k = mi.k();
    GradDecomposition out;
    out.n = mi.parts();
    if (k == 1) {
        out.p.emplace_back(1);
        return out;
    }

    const mpq_class minus_half(-1, 2);
    // survivor[i-1] = probability that variable i is the one still alive
    // while the walk merges it with variable j; starts at j = 2.
    std::vector<mpq_class> survivor{mpq_class(1)};
    for (int j = 2; j <= k; ++j) {
        const int span = mi.partial(j);   // walk on {0, ..., N_j}
        const int entry = mi.partial(j - 1);
        const auto visits = expected_visits(span, entry);
        const mpq_class p_top = absorption_at_top(span)[entry - 1];

        for (int i = 1; i < j; ++i) {
            GradPolynomial g;
            g.i = i;
            g.j = j;
            for (int m = 1; m <= span - 1; ++m) {
                const mpq_class c = minus_half * survivor[i - 1] * visits[m - 1];
                g.c.push_back(c);
                PolyTerm term;
                term.powers.assign(k, 0);
                term.powers[i - 1] = m - 1;
                term.powers[j - 1] = span - m - 1;
                for (int r = j + 1; r <= k; ++r) term.powers[r - 1] = mi.parts()[r - 1];
                term.coeff = c;
                g.terms.push_back(std::move(term));
            }
            out.d.push_back(std::move(g));
        }

        if (j < k) {
            for (auto& w : survivor) w *= p_top;
            survivor.push_back(mpq_class(1) - p_top);
        } else {
            out.p.assign(k, mpq_class(0));
            for (int i = 1; i < k; ++i) out.p[i - 1] = survivor[i - 1] * p_top;
            out.p[k - 1] = mpq_class(1) - p_top;
        }
    }
    return out;
}

} // namespace

GradDecomposition decompose(const MultiIndex& mi, bool canonicalize) {
    if (mi.total() < 2)
        throw std::domain_error("decompose: total degree must be >= 2");
    if (!canonicalize || mi.k() == 1) return decompose_in_order(mi);

    const int k = mi.k();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return mi.parts()[a] < mi.parts()[b]; });
    std::vector<int> sorted_parts(k);
    for (int s = 0; s < k; ++s) sorted_parts[s] = mi.parts()[order[s]];

    GradDecomposition dec = decompose_in_order(MultiIndex(sorted_parts));
    GradDecomposition out;
    out.n = mi.parts();
    out.p.assign(k, mpq_class(0));
    for (int s = 0; s < k; ++s) out.p[order[s]] = dec.p[s];
    for (auto& g : dec.d) {
        GradPolynomial h;
        h.i = order[g.i - 1] + 1;
        h.j = order[g.j - 1] + 1;
        if (h.i > h.j) std::swap(h.i, h.j); // the squared gradient is symmetric
        h.c = std::move(g.c);
        for (auto& term : g.terms) {
            PolyTerm t;
            t.powers.assign(k, 0);
            for (int s = 0; s < k; ++s) t.powers[order[s]] = term.powers[s];
            t.coeff = std::move(term.coeff);
            h.terms.push_back(std::move(t));
        }
        out.d.push_back(std::move(h));
    }
    std::sort(out.d.begin(), out.d.end(), [](const GradPolynomial& a, const GradPolynomial& b) {
        return std::pair(a.j, a.i) < std::pair(b.j, b.i);
    });
    return out;
}

bool verify_identity(const MultiIndex& mi, const GradDecomposition& dec) {
    const int k = mi.k();
    const int N = mi.total();
    if (static_cast<int>(dec.p.size()) != k) return false;

    std::map<std::vector<int>, mpq_class> acc;
    std::vector<int> powers(k, 0);
    for (int i = 0; i < k; ++i) {
        powers.assign(k, 0);
        powers[i] = N;
        acc[powers] += dec.p[i];
    }
    for (const auto& g : dec.d) {
        if (g.i < 1 || g.j <= g.i || g.j > k) return false;
        for (const auto& term : g.terms) {
            if (static_cast<int>(term.powers.size()) != k) return false;
            for (int v : term.powers)
                if (v < 0) return false;
            // (u_i - u_j)^2 = u_i^2 - 2 u_i u_j + u_j^2
            powers = term.powers;
            powers[g.i - 1] += 2;
            acc[powers] += term.coeff;
            powers = term.powers;
            powers[g.i - 1] += 1;
            powers[g.j - 1] += 1;
            acc[powers] -= 2 * term.coeff;
            powers = term.powers;
            powers[g.j - 1] += 2;
            acc[powers] += term.coeff;
        }
    }
    acc[mi.parts()] -= 1;
    for (const auto& [mono, coeff] : acc) {
        (void)mono;
        if (coeff != 0) return false;
    }
    return true;
}

double coefficient_bound_report(const MultiIndex& mi, const GradDecomposition& dec,
                                double U) {
    if (!(U > 0.0) || U > 1.0)
        throw std::invalid_argument("coefficient_bound_report: U must be in (0, 1]");
    const double N = mi.total();
    double worst = 0.0;
    for (const auto& g : dec.d) {
        mpq_class sum_abs(0);
        for (const auto& term : g.terms) sum_abs += abs(term.coeff);
        // Every monomial has total degree N-2 and all coefficients share a
        // sign, so sup over the box is sum |coeff| * U^{N-2} and the
        // U^{N-2} cancels against the normalization.
        worst = std::max(worst, sum_abs.get_d() / (N * N * N));
    }
    return worst;
}

} // namespace lpising
