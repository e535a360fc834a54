// wavinv command-line tool: forward and inverse wave-invariant pipelines,
// billiard and Hessian diagnostics, verification suites, and the
// quadrature oracle.  Exit codes: 0 ok, 2 invalid spec, 3 resonance,
// 4 numerical failure, 5 ill-conditioned, 6 inconsistent data.

#include "wavinv/billiard.hpp"
#include "wavinv/errors.hpp"
#include "wavinv/inversion.hpp"
#include "wavinv/io.hpp"
#include "wavinv/length_hessian.hpp"
#include "wavinv/verify.hpp"
#include "wavinv/wave_invariants.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <numbers>
#include <iostream>

namespace {

using namespace wavinv;
using wavinv::io::ordered_json;

struct RunConfig {
    std::string domain_path;
    std::string table_path;
    std::string out_path;
    std::string csv_path;
    std::string suite;
    std::vector<double> alpha;
    std::vector<int> hyperbolic;
    int r_max = 4;
    int j_max = 2;
    int r = 1;
    int trunc = 0;
    std::uint64_t seed = 1;
    double k_min = 500.0, k_max = 1500.0;
    int k_count = 12;
    int nodes = 0;

    void enforce_guardrails() const {
        if (j_max < 0 || j_max > 3) throw SpecError("guardrail: j_max must be in [0, 3]");
        if (r_max < 1 || r_max > 12) throw SpecError("guardrail: r_max must be in [1, 12]");
        if (r < 1 || r > 12) throw SpecError("guardrail: r must be in [1, 12]");
        if (trunc != 0 && (trunc < 2 * j_max + 2 || trunc > kMaxTrunc))
            throw SpecError("guardrail: --trunc must cover 2*j_max+2 and stay within the jet cap");
    }
};

void write_output(const RunConfig& cfg, const ordered_json& j) {
    if (cfg.out_path.empty() || cfg.out_path == "-")
        std::cout << io::dump(j);
    else
        io::save_file(cfg.out_path, j);
}

int cmd_forward(const RunConfig& cfg) {
    cfg.enforce_guardrails();
    DomainSpec spec = io::domain_from_json(io::load_file(cfg.domain_path));
    OrbitData orbit = orbit_data(spec);
    ValidationReport report = validate_DL(spec, orbit, cfg.r_max);
    if (!report.ok) {
        std::cerr << "domain validation failed:\n" << report.summary() << "\n";
        throw ResonanceError("validate_DL failed");
    }
    WaveInvariantTable table = forward_table(spec, cfg.r_max, cfg.j_max);
    write_output(cfg, io::table_to_json(table));
    if (!cfg.csv_path.empty()) {
        std::ofstream csv(cfg.csv_path);
        csv << io::table_to_csv(table);
    }
    std::cerr << "wave-trace expansion at orbit lengths 2rL, r = 1.." << cfg.r_max << ":\n"
              << "  Tr R_rho(k) ~ D_r(k) * sum_j B_{r,j} k^{-j},  D_r(k) the symplectic prefactor\n"
              << "  (universal constant, Maslov phase and |det(I-P)|^{-1/2} left symbolic);\n"
              << "  reported entries are the normalized ratios B-hat_{r,j} = B_{r,j}/B_{r,0}.\n";
    return 0;
}

int cmd_invert(const RunConfig& cfg) {
    cfg.enforce_guardrails();
    WaveInvariantTable table = io::table_from_json(io::load_file(cfg.table_path));
    RecoverOptions opts;
    opts.j_max = std::min(cfg.j_max, table.j_max);
    opts.alpha_override = cfg.alpha;
    if (!cfg.hyperbolic.empty()) {
        if (cfg.alpha.empty())
            throw SpecError("--hyperbolic requires --alpha (experimental mixed-case recovery)");
        for (int h : cfg.hyperbolic) opts.hyperbolic_mask.push_back(h != 0);
        opts.experimental_mixed = true;
    }
    RecoveredJet rec = invert_pipeline(table, opts);
    if (rec.ill_conditioned) {
        write_output(cfg, io::recovered_to_json(rec, table.L, table.n));
        throw IllConditionedError("recovery ill-conditioned (partial result written)");
    }
    write_output(cfg, io::recovered_to_json(rec, table.L, table.n));
    return 0;
}

int cmd_billiard(const RunConfig& cfg) {
    cfg.enforce_guardrails();
    DomainSpec spec = io::domain_from_json(io::load_file(cfg.domain_path));
    OrbitData orbit = orbit_data(spec);
    ordered_json out;
    out["n"] = spec.n;
    out["L"] = spec.L;

    // short trajectory from a slightly transverse start
    ordered_json traj = ordered_json::array();
    BoundaryPoint p;
    p.side = 1;
    p.x.assign(spec.d(), 0.01);
    p.eta.assign(spec.d(), 0.0);
    for (int step = 0; step < 8; ++step) {
        ordered_json e;
        e["x"] = p.x;
        e["side"] = p.side;
        e["eta"] = p.eta;
        traj.push_back(std::move(e));
        p = billiard_step(spec, p);
    }
    out["trajectory"] = std::move(traj);

    linalg::Matrix P = poincare_matrix_numeric(spec);
    ordered_json eig = ordered_json::array();
    for (const auto& ev : linalg::eigenvalues(P)) {
        ordered_json e;
        e["re"] = ev.real();
        e["im"] = ev.imag();
        eig.push_back(std::move(e));
    }
    out["poincare_eigenvalues"] = std::move(eig);
    out["alpha_from_curvature"] = orbit.alpha;
    ordered_json dets = ordered_json::array();
    for (int r = 1; r <= cfg.r_max; ++r) {
        double predicted = 1.0;
        for (std::size_t j = 0; j < orbit.alpha.size(); ++j) {
            double c = orbit.stability[j] == Stability::elliptic ? std::cos(r * orbit.alpha[j])
                                                                 : std::cosh(r * orbit.alpha[j]);
            predicted *= std::abs(2.0 - 2.0 * c);
        }
        ordered_json e;
        e["r"] = r;
        e["det_numeric"] = det_I_minus_Pr(P, r);
        e["det_predicted"] = predicted;
        dets.push_back(std::move(e));
    }
    out["det_I_minus_P"] = std::move(dets);
    out["critical_point_gradient"] = verify_critical_point(spec, std::min(cfg.r_max, 3));
    ordered_json conv;
    conv["tool_version"] = io::kToolVersion;
    out["convention"] = std::move(conv);
    write_output(cfg, out);
    return 0;
}

int cmd_hessian(const RunConfig& cfg) {
    cfg.enforce_guardrails();
    DomainSpec spec = io::domain_from_json(io::load_file(cfg.domain_path));
    ordered_json out;
    out["n"] = spec.n;
    out["L"] = spec.L;
    out["r"] = cfg.r;
    BlockHessian bh = hessian_closed_form(spec, cfg.r);
    out["a_plus"] = bh.a_plus;
    out["a_minus"] = bh.a_minus;
    int dim = 2 * cfg.r * spec.d();
    if (dim <= 64) {
        linalg::Matrix m = bh.materialize(Orientation::plus);
        ordered_json rows = ordered_json::array();
        for (int i = 0; i < dim; ++i) {
            ordered_json row = ordered_json::array();
            for (int j = 0; j < dim; ++j) row.push_back(m(i, j));
            rows.push_back(std::move(row));
        }
        out["matrix"] = std::move(rows);
    }
    DetIdentityReport det = det_identity_check(spec, cfg.r);
    out["det_numeric"] = det.det_numeric;
    out["det_predicted_abs"] = det.predicted_abs;
    out["det_rel_err"] = det.rel_err;
    linalg::Matrix inv = inverse_hessian(spec, cfg.r, Orientation::plus);
    ordered_json elements = ordered_json::array();
    for (int i = 0; i < spec.d(); ++i)
        for (int p = 1; p <= 2 * cfg.r; ++p)
            for (int q = p; q <= 2 * cfg.r; ++q) {
                ordered_json e;
                e["i"] = i + 1;
                e["p"] = p;
                e["q"] = q;
                e["value"] = inv(config_var(p - 1, i, spec.d()), config_var(q - 1, i, spec.d()));
                elements.push_back(std::move(e));
            }
    out["inverse_elements"] = std::move(elements);
    ordered_json conv;
    conv["tool_version"] = io::kToolVersion;
    out["convention"] = std::move(conv);
    write_output(cfg, out);
    return 0;
}

int cmd_verify(const RunConfig& cfg) {
    std::vector<verify::SuiteResult> results;
    if (!cfg.suite.empty())
        results.push_back(verify::run_suite(cfg.suite, cfg.seed));
    else
        results = verify::run_all(cfg.seed);
    ordered_json out;
    out["seed"] = cfg.seed;
    out["tool_version"] = io::kToolVersion;
    ordered_json suites = ordered_json::array();
    bool all_passed = true;
    for (const auto& r : results) {
        std::cout << (r.passed ? "PASS" : "FAIL") << "  " << r.name << "  measured " << r.measured
                  << "  tolerance " << r.tolerance << "  (" << r.seconds << " s)"
                  << (r.detail.empty() ? "" : "  [" + r.detail + "]") << "\n";
        ordered_json e;
        e["name"] = r.name;
        e["passed"] = r.passed;
        e["measured"] = r.measured;
        e["tolerance"] = r.tolerance;
        e["seconds"] = r.seconds;
        e["detail"] = r.detail;
        suites.push_back(std::move(e));
        all_passed = all_passed && r.passed;
    }
    out["suites"] = std::move(suites);
    out["all_passed"] = all_passed;
    if (!cfg.out_path.empty()) io::save_file(cfg.out_path, out);
    return all_passed ? 0 : 4;
}

int cmd_oracle(const RunConfig& cfg) {
    cfg.enforce_guardrails();
    DomainSpec spec = io::domain_from_json(io::load_file(cfg.domain_path));
    int J = cfg.j_max;
    int hankel_terms = J + 1;
    PrincipalIntegral pi = build_principal_integral(spec, cfg.r, Orientation::plus, J, hankel_terms);
    SPExpansion engine = sp_expand(pi.phase, pi.amplitude, J);
    auto integrand = model_integrand(spec, cfg.r, Orientation::plus, hankel_terms);
    int dim = 2 * cfg.r * spec.d();
    bool use_trace = spec.d() == 1 && dim > 2;
    OracleOptions opts;
    // Chebyshev spacing in 1/k conditions the coefficient fit
    double tmin = 1.0 / cfg.k_max, tmax = 1.0 / cfg.k_min;
    for (int i = 0; i < cfg.k_count; ++i) {
        double t = 0.5 * (tmin + tmax) +
                   0.5 * (tmax - tmin) * std::cos(std::numbers::pi * i / std::max(1.0, cfg.k_count - 1.0));
        opts.k_grid.push_back(1.0 / t);
    }
    opts.nodes_per_dim = cfg.nodes > 0 ? cfg.nodes : (dim == 2 ? 1700 : 500);
    opts.fit_degree = std::max(J + 2, 5);
    opts.flat_fraction = 0.65;
    opts.k_power_offset = pi.k_power;
    double box = std::min(oracle_box_half_width(spec, cfg.r), dim == 2 ? 0.7 : 0.55);
    OracleResult oracle =
        use_trace ? model_oracle_trace(spec, cfg.r, Orientation::plus, hankel_terms, engine, box, opts)
                  : oscillatory_oracle(dim, integrand, engine, std::vector<double>(dim, box), opts);
    ordered_json out;
    out["r"] = cfg.r;
    out["j_max"] = J;
    out["box_half_width"] = box;
    out["fit_residual"] = oracle.fit_residual;
    ordered_json rows = ordered_json::array();
    for (int j = 0; j <= J; ++j) {
        cplx be = engine.coeffs[j] / engine.coeffs[0];
        cplx bo = oracle.coeffs[j] / oracle.coeffs[0];
        ordered_json e;
        e["j"] = j;
        e["engine_re"] = be.real();
        e["engine_im"] = be.imag();
        e["oracle_re"] = bo.real();
        e["oracle_im"] = bo.imag();
        e["abs_diff"] = std::abs(be - bo);
        rows.push_back(std::move(e));
    }
    out["bhat"] = std::move(rows);
    ordered_json conv;
    conv["tool_version"] = io::kToolVersion;
    out["convention"] = std::move(conv);
    write_output(cfg, out);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"forward/inverse wave invariants of bouncing-ball orbits in symmetric analytic billiards"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--out", cfg.out_path, "output JSON path (default stdout)");
        sub->add_option("--seed", cfg.seed, "seed for randomized verification");
    };

    CLI::App* forward = app.add_subcommand("forward", "domain spec -> wave-invariant table");
    forward->add_option("--domain", cfg.domain_path, "DomainSpec JSON")->required();
    forward->add_option("--r-max", cfg.r_max, "max iterate (<= 12)");
    forward->add_option("--j-max", cfg.j_max, "max invariant order (<= 3)");
    forward->add_option("--trunc", cfg.trunc, "truncation check (default 2*j_max+2; capped at 8)");
    forward->add_option("--emit-csv", cfg.csv_path, "also write entries as CSV");
    add_common(forward);

    CLI::App* invert = app.add_subcommand("invert", "wave-invariant table -> recovered boundary jet");
    invert->add_option("--table", cfg.table_path, "WaveInvariantTable JSON")->required();
    invert->add_option("--j-max", cfg.j_max, "max level to recover");
    invert->add_option("--alpha", cfg.alpha, "known Floquet exponents (skips recovery)")->delimiter(',');
    invert->add_option("--hyperbolic", cfg.hyperbolic,
                       "per-index hyperbolic flags (0/1) for the experimental mixed case; requires --alpha")
        ->delimiter(',');
    add_common(invert);

    CLI::App* billiard = app.add_subcommand("billiard", "trajectory and Poincare diagnostics");
    billiard->add_option("--domain", cfg.domain_path, "DomainSpec JSON")->required();
    billiard->add_option("--r-max", cfg.r_max, "iterates for the det cross-check");
    add_common(billiard);

    CLI::App* hessian = app.add_subcommand("hessian", "length-functional Hessian diagnostics");
    hessian->add_option("--domain", cfg.domain_path, "DomainSpec JSON")->required();
    hessian->add_option("--r", cfg.r, "iterate");
    add_common(hessian);

    CLI::App* verify_cmd = app.add_subcommand("verify", "run verification suites");
    verify_cmd->add_option("--suite", cfg.suite, "single suite name (default: all)");
    add_common(verify_cmd);

    CLI::App* oracle = app.add_subcommand("oracle", "model-integral quadrature oracle vs engine");
    oracle->add_option("--domain", cfg.domain_path, "DomainSpec JSON")->required();
    oracle->add_option("--r", cfg.r, "iterate");
    oracle->add_option("--j-max", cfg.j_max, "orders to fit");
    oracle->add_option("--k-min", cfg.k_min, "lowest k");
    oracle->add_option("--k-max", cfg.k_max, "highest k");
    oracle->add_option("--k-count", cfg.k_count, "k-grid size");
    oracle->add_option("--nodes", cfg.nodes, "quadrature nodes per dimension (0: auto)");
    add_common(oracle);

    CLI11_PARSE(app, argc, argv);

    try {
        if (forward->parsed()) return cmd_forward(cfg);
        if (invert->parsed()) return cmd_invert(cfg);
        if (billiard->parsed()) return cmd_billiard(cfg);
        if (hessian->parsed()) return cmd_hessian(cfg);
        if (verify_cmd->parsed()) return cmd_verify(cfg);
        if (oracle->parsed()) return cmd_oracle(cfg);
    } catch (const SpecError& e) {
        std::cerr << "error (invalid spec): " << e.what() << "\n";
        return 2;
    } catch (const ResonanceError& e) {
        std::cerr << "error (resonance/degeneracy): " << e.what() << "\n";
        return 3;
    } catch (const IllConditionedError& e) {
        std::cerr << "error (ill-conditioned): " << e.what() << "\n";
        return 5;
    } catch (const InconsistentDataError& e) {
        std::cerr << "error (inconsistent data): " << e.what() << "\n";
        return 6;
    } catch (const NumericalError& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
