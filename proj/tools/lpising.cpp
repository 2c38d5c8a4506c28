// Command-line frontend for the lpising library.  Every experiment is a
// subcommand; numeric results go to the --out artifact (CSV or JSON) and a
// JSON run manifest records parameters, outcome checks, build identity, and
// wall time.  Validation failures produce a "rejected" manifest, no data
// artifact, and exit code 2; failed iterative solves exit with code 3.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lpising/effective.hpp"
#include "lpising/errors.hpp"
#include "lpising/mc.hpp"
#include "lpising/monomial.hpp"
#include "lpising/phase.hpp"
#include "lpising/polymer.hpp"
#include "lpising/rng.hpp"

#ifndef LPISING_GIT_DESCRIBE
#define LPISING_GIT_DESCRIBE "unknown"
#endif

namespace {

using json = nlohmann::ordered_json;
using namespace lpising;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

json finite_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cli: cannot open output path " + path);
    out << content;
    if (!out) throw std::runtime_error("cli: failed while writing " + path);
}

struct RunOutput {
    std::vector<std::pair<std::string, std::string>> files; // path -> content
    json results = json::object();
    json checks = json::object();
};

// Runs one subcommand body, writes artifacts only on success, and always
// emits the manifest (to the given path, or stdout when the path is empty).
int execute(const std::string& name, const json& params, const std::string& manifest_path,
            const std::function<RunOutput()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    json man;
    man["subcommand"] = name;
    int code = 0;
    try {
        RunOutput out = body();
        for (const auto& [path, content] : out.files) write_file(path, content);
        man["status"] = "ok";
        man["params"] = params;
        man["results"] = std::move(out.results);
        man["checks"] = std::move(out.checks);
        json paths = json::array();
        for (const auto& [path, content] : out.files) paths.push_back(path);
        man["outputs"] = std::move(paths);
    } catch (const convergence_error& e) {
        man["status"] = "error";
        man["params"] = params;
        man["error"] = e.what();
        man["outputs"] = json::array();
        std::cerr << "lpising " << name << ": " << e.what() << "\n";
        code = 3;
    } catch (const std::exception& e) {
        man["status"] = "rejected";
        man["params"] = params;
        man["error"] = e.what();
        man["outputs"] = json::array();
        std::cerr << "lpising " << name << ": " << e.what() << "\n";
        code = 2;
    }
    man["version"] = {{"git_describe", LPISING_GIT_DESCRIBE}};
    man["rng"] = kRngAlgorithm;
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
    man["wall_time_seconds"] = dt.count();
    const std::string text = man.dump(2) + "\n";
    if (manifest_path.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(manifest_path, std::ios::binary);
        if (out) out << text;
        else std::cerr << "lpising: cannot write manifest " << manifest_path << "\n";
    }
    return code;
}

std::string rational(const mpq_class& q) { return q.get_str(); }

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical toolkit for a layered Ising model with a long-range "
                 "in-layer interaction: phase diagram, cluster expansion, monomial "
                 "decomposition, effective-Hamiltonian minimization, ensemble "
                 "comparison, and Monte Carlo sampling."};
    app.require_subcommand(1);
    app.set_config("--config", "", "TOML config file; command-line flags override its values");
    // callbacks fire inside parse(), so the config path is read on demand
    auto config_path = [&app]() -> std::string {
        const CLI::Option* cfg = app.get_config_ptr();
        return (cfg != nullptr && cfg->count() > 0) ? cfg->as<std::string>() : std::string();
    };

    int exit_code = 0;

    // phase-diagram: variational curve, its convex envelope, coexistence flat.
    struct {
        double lambda = 0.0;
        double grid_step = 1e-3;
        std::string out, manifest;
    } pd;
    auto* pd_cmd = app.add_subcommand(
        "phase-diagram", "Tabulate the variational curve g(m) and its convex envelope");
    pd_cmd->add_option("--lambda", pd.lambda, "vertical coupling, >= 0")->required();
    pd_cmd->add_option("--grid-step", pd.grid_step, "m grid step in (0, 1e-2]")
        ->capture_default_str();
    pd_cmd->add_option("--out", pd.out, "CSV output path (columns m,g,envelope)")->required();
    pd_cmd->add_option("--manifest", pd.manifest, "manifest path (stdout if omitted)");
    pd_cmd->callback([&] {
        json params = {{"lambda", pd.lambda}, {"grid-step", pd.grid_step},
                       {"out", pd.out},       {"manifest", pd.manifest},
                       {"config", config_path()}};
        exit_code = execute("phase-diagram", params, pd.manifest, [&] {
            const EnvelopeCurve ec = convex_envelope(pd.lambda, pd.grid_step);
            const LpPressure lp = lp_pressure(pd.lambda, 0.0, pd.grid_step);
            std::string csv = "m,g,envelope\n";
            bool below = true;
            for (std::size_t k = 0; k < ec.m.size(); ++k) {
                csv += fmt17(ec.m[k]) + "," + fmt17(ec.g[k]) + "," + fmt17(ec.envelope[k]) + "\n";
                below = below && ec.envelope[k] <= ec.g[k] + 1e-12;
            }
            RunOutput out;
            out.files.emplace_back(pd.out, std::move(csv));
            out.results = {{"rows", ec.m.size()},
                           {"has_flat", ec.has_flat},
                           {"flat_lo", ec.flat_lo},
                           {"flat_hi", ec.flat_hi},
                           {"pressure_at_zero_field", lp.pressure},
                           {"spontaneous_magnetization", spontaneous_magnetization(pd.lambda)}};
            out.checks = {{"envelope_below_curve", below}};
            return out;
        });
    });

    // spontaneous-mag: positive minimizer against its small-coupling law.
    struct {
        std::vector<double> lambdas;
        std::string out, manifest;
    } sm;
    auto* sm_cmd = app.add_subcommand(
        "spontaneous-mag", "Spontaneous magnetization over a list of couplings");
    sm_cmd->add_option("--lambdas", sm.lambdas, "comma-separated couplings")
        ->required()
        ->delimiter(',');
    sm_cmd->add_option("--out", sm.out, "CSV output path (lambda,m_star,ratio)")->required();
    sm_cmd->add_option("--manifest", sm.manifest, "manifest path (stdout if omitted)");
    sm_cmd->callback([&] {
        json params = {{"lambdas", sm.lambdas}, {"out", sm.out},
                       {"manifest", sm.manifest}, {"config", config_path()}};
        exit_code = execute("spontaneous-mag", params, sm.manifest, [&] {
            std::string csv = "lambda,m_star,ratio_to_sqrt_6lambda\n";
            json values = json::array();
            for (double lam : sm.lambdas) {
                const double m = spontaneous_magnetization(lam);
                const double ratio = lam > 0.0 ? m / std::sqrt(6.0 * lam) : 0.0;
                csv += fmt17(lam) + "," + fmt17(m) + "," + fmt17(ratio) + "\n";
                values.push_back(m);
            }
            RunOutput out;
            out.files.emplace_back(sm.out, std::move(csv));
            out.results = {{"count", sm.lambdas.size()}, {"m_star", std::move(values)}};
            return out;
        });
    });

    // cluster-expand: log-series coefficients of the decorated ring.
    struct {
        double lambda = 0.0;
        int ell = 0;
        int max_degree = 6;
        std::string out, manifest;
    } ce;
    auto* ce_cmd = app.add_subcommand(
        "cluster-expand", "Series coefficients of the decorated-ring log partition function");
    ce_cmd->add_option("--lambda", ce.lambda, "vertical coupling")->required();
    ce_cmd->add_option("--ell", ce.ell, "ring length, 3..10")->required();
    ce_cmd->add_option("--max-degree", ce.max_degree, "total degree cutoff, 0..8")->capture_default_str();
    ce_cmd->add_option("--out", ce.out, "JSON output path")->required();
    ce_cmd->add_option("--manifest", ce.manifest, "manifest path (stdout if omitted)");
    ce_cmd->callback([&] {
        json params = {{"lambda", ce.lambda}, {"ell", ce.ell},
                       {"max-degree", ce.max_degree}, {"out", ce.out},
                       {"manifest", ce.manifest}, {"config", config_path()}};
        exit_code = execute("cluster-expand", params, ce.manifest, [&] {
            const CoeffMap cm = cluster_coefficients(ce.lambda, ce.ell, ce.max_degree);
            json entries = json::array();
            for (const auto& [powers, value] : cm.all_entries()) {
                json sites = json::array(), exps = json::array();
                for (std::size_t i = 0; i < powers.size(); ++i)
                    if (powers[i] > 0) {
                        sites.push_back(i);
                        exps.push_back(powers[i]);
                    }
                entries.push_back({{"sites", std::move(sites)},
                                   {"powers", std::move(exps)},
                                   {"value", value}});
            }
            json doc = {{"lambda", cm.lambda},
                        {"ring_length", cm.ring_length},
                        {"max_total_degree", cm.max_total_degree},
                        {"a0", cm.a0},
                        {"entries", std::move(entries)}};
            std::vector<int> nn(static_cast<std::size_t>(ce.ell), 0);
            nn[0] = nn[1] = 1;
            RunOutput out;
            out.files.emplace_back(ce.out, doc.dump(2) + "\n");
            out.results = {{"a0", cm.a0},
                           {"n_entries", doc["entries"].size()},
                           {"nn_coefficient", cm.coefficient(nn)}};
            return out;
        });
    });

    // kp-check: convergence criterion for the polymer expansion.
    struct {
        double lambda = 0.0;
        double b = 0.0;
        std::string out, manifest;
    } kp;
    auto* kp_cmd = app.add_subcommand(
        "kp-check", "Polymer-expansion convergence criterion at a given coupling");
    kp_cmd->add_option("--lambda", kp.lambda, "vertical coupling, > 0")->required();
    auto* kp_b = kp_cmd->add_option(
        "--b", kp.b, "weight margin; defaults to (5/12) log(1/lambda)");
    kp_cmd->add_option("--out", kp.out, "JSON output path")->required();
    kp_cmd->add_option("--manifest", kp.manifest, "manifest path (stdout if omitted)");
    kp_cmd->callback([&] {
        if (kp_b->count() == 0 && kp.lambda > 0.0)
            kp.b = (5.0 / 12.0) * std::log(1.0 / kp.lambda);
        json params = {{"lambda", kp.lambda}, {"b", kp.b}, {"out", kp.out},
                       {"manifest", kp.manifest}, {"config", config_path()}};
        exit_code = execute("kp-check", params, kp.manifest, [&] {
            const KpReport rep = kp_check(kp.lambda, kp.b);
            const double lam_max = max_lambda_kp();
            json doc = {{"lambda", kp.lambda},
                        {"b", kp.b},
                        {"lhs_max", finite_or_null(rep.lhs_max)},
                        {"bound", 2.0},
                        {"holds", rep.holds},
                        {"max_lambda_reference", lam_max}};
            RunOutput out;
            out.files.emplace_back(kp.out, doc.dump(2) + "\n");
            out.results = {{"holds", rep.holds},
                           {"lhs_max", finite_or_null(rep.lhs_max)},
                           {"max_lambda_reference", lam_max}};
            out.checks = {{"condition_holds", rep.holds}};
            return out;
        });
    });

    // decompose: exact rational monomial decomposition.
    struct {
        std::vector<int> powers;
        bool canonicalize = false;
        std::string format = "json";
        std::string out, manifest;
    } dc;
    auto* dc_cmd = app.add_subcommand(
        "decompose", "Exact convex-plus-gradient decomposition of a monomial");
    dc_cmd->add_option("--powers", dc.powers, "comma-separated exponents, all >= 1")
        ->required()
        ->delimiter(',');
    dc_cmd->add_flag("--canonicalize", dc.canonicalize,
                     "process variables in ascending exponent order");
    dc_cmd->add_option("--format", dc.format, "output format")->capture_default_str()
        ->check(CLI::IsMember({"json", "csv"}));
    dc_cmd->add_option("--out", dc.out, "output path")->required();
    dc_cmd->add_option("--manifest", dc.manifest, "manifest path (stdout if omitted)");
    dc_cmd->callback([&] {
        json params = {{"powers", dc.powers}, {"canonicalize", dc.canonicalize},
                       {"format", dc.format}, {"out", dc.out},
                       {"manifest", dc.manifest}, {"config", config_path()}};
        exit_code = execute("decompose", params, dc.manifest, [&] {
            const MultiIndex mi(dc.powers);
            const GradDecomposition dec = decompose(mi, dc.canonicalize);
            const bool ok = verify_identity(mi, dec);
            json pj = json::array();
            for (const mpq_class& q : dec.p) pj.push_back(rational(q));
            std::string content;
            if (dc.format == "json") {
                json dj = json::array();
                for (const GradPolynomial& g : dec.d) {
                    json cj = json::array(), terms = json::array();
                    for (const mpq_class& q : g.c) cj.push_back(rational(q));
                    for (const PolyTerm& t : g.terms)
                        terms.push_back({{"powers", t.powers}, {"coeff", rational(t.coeff)}});
                    dj.push_back({{"i", g.i}, {"j", g.j},
                                  {"c", std::move(cj)}, {"terms", std::move(terms)}});
                }
                json doc = {{"powers", dc.powers},
                            {"total_degree", mi.total()},
                            {"p", pj},
                            {"d", std::move(dj)},
                            {"verified", ok}};
                content = doc.dump(2) + "\n";
            } else {
                content = "kind,i,j,detail,value\n";
                for (std::size_t i = 0; i < dec.p.size(); ++i)
                    content += "p," + std::to_string(i + 1) + ",,," + rational(dec.p[i]) + "\n";
                for (const GradPolynomial& g : dec.d) {
                    for (std::size_t m = 0; m < g.c.size(); ++m)
                        content += "c," + std::to_string(g.i) + "," + std::to_string(g.j) + "," +
                                   std::to_string(m + 1) + "," + rational(g.c[m]) + "\n";
                    for (const PolyTerm& t : g.terms) {
                        std::string mono;
                        for (std::size_t r = 0; r < t.powers.size(); ++r) {
                            if (r) mono += ';';
                            mono += std::to_string(t.powers[r]);
                        }
                        content += "d," + std::to_string(g.i) + "," + std::to_string(g.j) + "," +
                                   mono + "," + rational(t.coeff) + "\n";
                    }
                }
            }
            RunOutput out;
            out.files.emplace_back(dc.out, std::move(content));
            out.results = {{"p", std::move(pj)},
                           {"n_gradient_polynomials", dec.d.size()},
                           {"verified", ok}};
            out.checks = {{"identity_verified", ok}};
            return out;
        });
    });

    // eff-minimize: global minima of the effective layer-field energy.
    struct {
        double lambda = 0.0;
        double h_ext = 0.0;
        int ell = 0;
        int restarts = 32;
        bool drop_constant = false;
        std::string out, manifest;
    } em;
    auto* em_cmd = app.add_subcommand(
        "eff-minimize", "Minimize the effective energy of the layer decorations");
    em_cmd->add_option("--lambda", em.lambda, "vertical coupling")->required();
    em_cmd->add_option("--h-ext", em.h_ext, "external field")->capture_default_str();
    em_cmd->add_option("--ell", em.ell, "number of layers, >= 3")->required();
    em_cmd->add_option("--restarts", em.restarts, "multistart count, >= 1")->capture_default_str();
    em_cmd->add_flag("--drop-constant", em.drop_constant,
                     "omit the additive constant of the energy");
    em_cmd->add_option("--out", em.out, "CSV output path (one row per minimum)")->required();
    em_cmd->add_option("--manifest", em.manifest, "manifest path (stdout if omitted)");
    em_cmd->callback([&] {
        json params = {{"lambda", em.lambda},     {"h-ext", em.h_ext},
                       {"ell", em.ell},           {"restarts", em.restarts},
                       {"drop-constant", em.drop_constant},
                       {"out", em.out},           {"manifest", em.manifest},
                       {"config", config_path()}};
        exit_code = execute("eff-minimize", params, em.manifest, [&] {
            const MinimizeReport rep =
                minimize_eff(em.lambda, em.h_ext, em.ell, em.restarts, em.drop_constant);
            std::string csv = "value,spread";
            for (int i = 0; i < em.ell; ++i) csv += ",u" + std::to_string(i);
            csv += "\n";
            for (const LocalMinimum& lm : rep.minima) {
                csv += fmt17(lm.value) + "," + fmt17(lm.spread);
                for (double ui : lm.u) csv += "," + fmt17(ui);
                csv += "\n";
            }
            RunOutput out;
            out.files.emplace_back(em.out, std::move(csv));
            out.results = {{"value", rep.value},
                           {"per_site", rep.value / em.ell},
                           {"spread", rep.spread},
                           {"n_minima", rep.minima.size()},
                           {"argmin", rep.argmin}};
            out.checks = {{"argmin_homogeneous", rep.spread <= 1e-6}};
            return out;
        });
    });

    // ensemble-gap: constrained versus tilted free energy of a spin block.
    struct {
        double lambda = 0.0;
        std::vector<double> m;
        std::string out, manifest;
    } eg;
    auto* eg_cmd = app.add_subcommand(
        "ensemble-gap", "Per-block gap between constrained and field-tilted ensembles");
    eg_cmd->add_option("--lambda", eg.lambda, "vertical coupling")->required();
    eg_cmd->add_option("--m", eg.m,
                       "comma-separated layer magnetizations; the count sets the block side")
        ->required()
        ->delimiter(',');
    eg_cmd->add_option("--out", eg.out, "CSV output path")->required();
    eg_cmd->add_option("--manifest", eg.manifest, "manifest path (stdout if omitted)");
    eg_cmd->callback([&] {
        json params = {{"lambda", eg.lambda}, {"m", eg.m}, {"out", eg.out},
                       {"manifest", eg.manifest}, {"config", config_path()}};
        exit_code = execute("ensemble-gap", params, eg.manifest, [&] {
            const EnsembleGap g =
                ensemble_gap(eg.lambda, static_cast<int>(eg.m.size()), eg.m);
            std::string csv = "ell,grand_term,phi,gap\n";
            csv += std::to_string(g.ell) + "," + fmt17(g.grand_term) + "," + fmt17(g.phi) +
                   "," + fmt17(g.gap) + "\n";
            RunOutput out;
            out.files.emplace_back(eg.out, std::move(csv));
            out.results = {{"ell", g.ell},
                           {"grand_term", g.grand_term},
                           {"phi", g.phi},
                           {"gap", g.gap}};
            out.checks = {{"finite", std::isfinite(g.gap)}};
            return out;
        });
    });

    // theta-scan: grid maximum of the interpolation slope bound.
    struct {
        int points = 2001;
        double cap = 0.999;
        std::string out, manifest;
    } ts;
    auto* ts_cmd = app.add_subcommand(
        "theta-scan", "Grid maximum of the two-point slope of (atanh u - u)(1 - u^2)");
    ts_cmd->add_option("--points", ts.points, "grid resolution per axis, >= 2")->capture_default_str();
    ts_cmd->add_option("--cap", ts.cap, "grid endpoint in (0, 1)")->capture_default_str();
    ts_cmd->add_option("--out", ts.out, "JSON output path")->required();
    ts_cmd->add_option("--manifest", ts.manifest, "manifest path (stdout if omitted)");
    ts_cmd->callback([&] {
        json params = {{"points", ts.points}, {"cap", ts.cap}, {"out", ts.out},
                       {"manifest", ts.manifest}, {"config", config_path()}};
        exit_code = execute("theta-scan", params, ts.manifest, [&] {
            const double mx = theta_grid_max(ts.points, ts.cap);
            json doc = {{"points", ts.points},
                        {"cap", ts.cap},
                        {"max", mx},
                        {"bound", 0.375},
                        {"below_bound", mx <= 0.375}};
            RunOutput out;
            out.files.emplace_back(ts.out, doc.dump(2) + "\n");
            out.results = {{"max", mx}, {"below_bound", mx <= 0.375}};
            out.checks = {{"below_bound", mx <= 0.375}};
            return out;
        });
    });

    // mc-run: Metropolis sampling of the layered Kac model.
    struct {
        double lambda = 0.0;
        double h_ext = 0.0;
        double gamma = 0.25;
        int L = 0;
        long long sweeps = 0;
        long long warmup = 0;
        std::uint64_t seed = 1;
        std::string shape = "cosine";
        std::string start = "plus";
        std::string out, manifest;
    } mc;
    auto* mc_cmd = app.add_subcommand(
        "mc-run", "Metropolis sampling of the layered model at fixed interaction range");
    mc_cmd->add_option("--lambda", mc.lambda, "vertical coupling")->required();
    mc_cmd->add_option("--h-ext", mc.h_ext, "external field")->capture_default_str();
    mc_cmd->add_option("--gamma", mc.gamma, "inverse interaction range in (0, 1/2]")->required();
    mc_cmd->add_option("--L", mc.L, "lattice side, >= 2 floor(1/gamma) + 1")->required();
    mc_cmd->add_option("--sweeps", mc.sweeps, "total sweeps")->required();
    auto* mc_warm = mc_cmd->add_option("--warmup", mc.warmup,
                                       "discarded sweeps; defaults to sweeps/4");
    mc_cmd->add_option("--seed", mc.seed, "RNG seed")->capture_default_str();
    mc_cmd->add_option("--shape", mc.shape, "interaction shape")->capture_default_str()
        ->check(CLI::IsMember({"cosine", "triangle"}));
    mc_cmd->add_option("--start", mc.start, "initial configuration")->capture_default_str()
        ->check(CLI::IsMember({"plus", "random"}));
    mc_cmd->add_option("--out", mc.out, "trace CSV path (sweep,magnetization,energy)")
        ->required();
    mc_cmd->add_option("--manifest", mc.manifest, "manifest path (stdout if omitted)");
    mc_cmd->callback([&] {
        if (mc_warm->count() == 0) mc.warmup = mc.sweeps / 4;
        json params = {{"lambda", mc.lambda}, {"h-ext", mc.h_ext}, {"gamma", mc.gamma},
                       {"L", mc.L},           {"sweeps", mc.sweeps}, {"warmup", mc.warmup},
                       {"seed", mc.seed},     {"shape", mc.shape},   {"start", mc.start},
                       {"out", mc.out},       {"manifest", mc.manifest},
                       {"config", config_path()}};
        exit_code = execute("mc-run", params, mc.manifest, [&] {
            const KernelShape shape = mc.shape == "triangle" ? KernelShape::triangle
                                                             : KernelShape::raised_cosine;
            const KacKernel kernel = build_kernel(mc.gamma, shape);
            SpinLattice init = mc.start == "random"
                                   ? random_lattice(mc.L, mc.seed)
                                   : SpinLattice(mc.L, 1);
            ModelParams p;
            p.lambda = mc.lambda;
            p.h_ext = mc.h_ext;
            p.gamma = mc.gamma;
            const McResult res =
                run_metropolis(p, kernel, std::move(init), mc.sweeps, mc.warmup, mc.seed);
            std::string csv = "sweep,magnetization,energy\n";
            for (std::size_t t = 0; t < res.magnetization_trace.size(); ++t)
                csv += std::to_string(res.warmup + static_cast<long long>(t)) + "," +
                       fmt17(res.magnetization_trace[t]) + "," + fmt17(res.energy_trace[t]) +
                       "\n";
            const double direct = total_energy(res.final_state, kernel, p.lambda, p.h_ext);
            const double drift = std::fabs(res.energy_trace.back() - direct) /
                                 std::max(1.0, std::fabs(direct));
            RunOutput out;
            out.files.emplace_back(mc.out, std::move(csv));
            out.results = {{"mean_magnetization", res.mean_magnetization},
                           {"std_error", res.std_error},
                           {"measured_sweeps", res.magnetization_trace.size()},
                           {"final_energy", res.energy_trace.back()},
                           {"seed", res.seed}};
            out.checks = {{"energy_bookkeeping", drift <= 1e-6}};
            return out;
        });
    });

    // gamma-sweep: convergence of the sampled magnetization toward the
    // variational prediction as the interaction range grows.
    struct {
        double lambda = 0.0;
        double h_ext = 0.0;
        std::vector<double> gammas;
        int L = 0;
        long long sweeps = 0;
        std::uint64_t seed = 1;
        std::string out, manifest;
    } gs;
    auto* gs_cmd = app.add_subcommand(
        "gamma-sweep", "Deviation from the variational magnetization across ranges");
    gs_cmd->add_option("--lambda", gs.lambda, "vertical coupling")->required();
    gs_cmd->add_option("--h-ext", gs.h_ext, "external field")->capture_default_str();
    gs_cmd->add_option("--gammas", gs.gammas, "comma-separated inverse ranges")
        ->required()
        ->delimiter(',');
    gs_cmd->add_option("--L", gs.L, "lattice side for the smallest gamma")->required();
    gs_cmd->add_option("--sweeps", gs.sweeps, "sweeps per run, >= 8")->required();
    gs_cmd->add_option("--seed", gs.seed, "base RNG seed")->capture_default_str();
    gs_cmd->add_option("--out", gs.out,
                       "CSV output path (gamma,lattice,mean,std_error,m_pred,deviation)")
        ->required();
    gs_cmd->add_option("--manifest", gs.manifest, "manifest path (stdout if omitted)");
    gs_cmd->callback([&] {
        json params = {{"lambda", gs.lambda}, {"h-ext", gs.h_ext}, {"gammas", gs.gammas},
                       {"L", gs.L},           {"sweeps", gs.sweeps}, {"seed", gs.seed},
                       {"out", gs.out},       {"manifest", gs.manifest},
                       {"config", config_path()}};
        exit_code = execute("gamma-sweep", params, gs.manifest, [&] {
            ModelParams p;
            p.lambda = gs.lambda;
            p.h_ext = gs.h_ext;
            const std::vector<GammaRow> rows = gamma_sweep(p, gs.gammas, gs.L, gs.sweeps, gs.seed);
            std::string csv = "gamma,lattice,mean,std_error,m_pred,deviation\n";
            double worst = 0.0;
            for (const GammaRow& r : rows) {
                csv += fmt17(r.gamma) + "," + std::to_string(r.lattice) + "," + fmt17(r.mean) +
                       "," + fmt17(r.std_error) + "," + fmt17(r.m_pred) + "," +
                       fmt17(r.deviation) + "\n";
                worst = std::max(worst, r.deviation);
            }
            RunOutput out;
            out.files.emplace_back(gs.out, std::move(csv));
            out.results = {{"n_rows", rows.size()},
                           {"m_pred", rows.front().m_pred},
                           {"max_deviation", worst}};
            return out;
        });
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    return exit_code;
}
