#include "wavinv/verify.hpp"

#include "wavinv/billiard.hpp"
#include "wavinv/errors.hpp"
#include "wavinv/inversion.hpp"
#include "wavinv/length_hessian.hpp"
#include "wavinv/stationary_phase.hpp"
#include "wavinv/wave_invariants.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace wavinv::verify {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

using Clock = std::chrono::steady_clock;

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

bool alpha_nonresonant(const std::vector<double>& alpha, int r_max, double margin) {
    for (double a : alpha)
        for (int r = 1; r <= r_max; ++r) {
            double t = std::fmod(r * a, kTwoPi);
            if (std::min(t, kTwoPi - t) < margin) return false;
        }
    for (std::size_t i = 0; i < alpha.size(); ++i)
        for (std::size_t j = i + 1; j < alpha.size(); ++j)
            if (std::abs(alpha[i] - alpha[j]) < margin) return false;
    return true;
}

std::vector<double> alphas_of(const DomainSpec& spec) {
    return floquet_from_curvature(spec).alpha;
}

// k grid with Chebyshev-Lobatto spacing in t = 1/k: near-optimal sample
// placement for the inverse-k polynomial fit
std::vector<double> k_grid(double k0, double k1, int count) {
    std::vector<double> ks(count);
    double tmin = 1.0 / k1, tmax = 1.0 / k0;
    double c = 0.5 * (tmin + tmax), h = 0.5 * (tmax - tmin);
    for (int i = 0; i < count; ++i) ks[i] = 1.0 / (c + h * std::cos(std::numbers::pi * i / (count - 1.0)));
    return ks;
}

} // namespace

DomainSpec random_symmetric_domain(std::uint64_t seed, int d, int u_degree, int r_max) {
    std::mt19937_64 rng(seed * 1000003ULL + 17);
    for (int attempt = 0; attempt < 200; ++attempt) {
        Jet F(d, std::min(kMaxTrunc / 2, std::max(1, u_degree)));
        std::vector<double> nu(d);
        for (int i = 0; i < d; ++i) {
            nu[i] = uniform(rng, -1.8, -0.2);
            F.set_coeff(MultiIndex::unit(d, i), 0.5 * nu[i]);
        }
        for (int deg = 2; deg <= u_degree; ++deg)
            for (const MultiIndex& gamma : multi_indices_of_order(d, deg)) {
                double mag = uniform(rng, 0.05, 0.5);
                double sign = uniform(rng, 0.0, 1.0) < 0.5 ? -1.0 : 1.0;
                F.set_coeff(gamma, sign * mag);
            }
        DomainSpec spec = make_symmetric_domain(d + 1, 1.0, F);
        try {
            if (alpha_nonresonant(alphas_of(spec), r_max, 0.05)) return spec;
        } catch (const ResonanceError&) {
        }
    }
    throw NumericalError("random_symmetric_domain: no non-resonant sample found");
}

// ---------------------------------------------------------------------------
// Suite 1: Hessian closed form vs finite differences
// ---------------------------------------------------------------------------

namespace {

double fd_hessian_entry(const DomainSpec& spec, int r, Orientation o, int i, int j, double h) {
    int dim = 2 * r * spec.d();
    std::vector<double> x(dim, 0.0);
    auto f = [&](double xi, double xj) {
        x[i] += xi;
        x[j] += xj;
        double v = length_functional_value(spec, r, o, x);
        x[i] -= xi;
        x[j] -= xj;
        return v;
    };
    if (i == j) {
        double f0 = f(0, 0);
        return (f(h, 0) - 2.0 * f0 + f(-h, 0)) / (h * h);
    }
    return (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h);
}

double fd_hessian_entry_richardson(const DomainSpec& spec, int r, Orientation o, int i, int j) {
    const double h = 2e-3;
    double d1 = fd_hessian_entry(spec, r, o, i, j, h);
    double d2 = fd_hessian_entry(spec, r, o, i, j, 0.5 * h);
    return (4.0 * d2 - d1) / 3.0;
}

DomainSpec random_general_domain(std::mt19937_64& rng, int d) {
    // independent graphs with diagonal Hessians and a few higher terms
    DomainSpec spec;
    spec.n = d + 1;
    spec.L = uniform(rng, 0.7, 1.3);
    spec.symmetric = false;
    Jet fp(d, 4), fm(d, 4);
    fp.set_coeff(MultiIndex::zero(d), spec.L / 2.0);
    fm.set_coeff(MultiIndex::zero(d), -spec.L / 2.0);
    for (int i = 0; i < d; ++i) {
        fp.set_coeff(MultiIndex::unit(d, i, 2), 0.5 * uniform(rng, -1.8 / spec.L, -0.2 / spec.L));
        fm.set_coeff(MultiIndex::unit(d, i, 2), 0.5 * uniform(rng, 0.2 / spec.L, 1.8 / spec.L));
    }
    for (const MultiIndex& gamma : multi_indices_of_order(d, 3)) {
        fp.set_coeff(gamma, uniform(rng, -0.3, 0.3));
        fm.set_coeff(gamma, uniform(rng, -0.3, 0.3));
    }
    spec.f_plus = fp;
    spec.f_minus = fm;
    return spec;
}

SuiteResult suite_hessian(std::uint64_t seed) {
    SuiteResult res{"hessian", false, 0.0, 1e-8, 0.0, ""};
    auto t0 = Clock::now();
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    for (int cfg = 0; cfg < 20; ++cfg) {
        int n = 2 + cfg % 3;
        int r = 1 + (cfg / 3) % 3;
        DomainSpec spec;
        if (cfg % 4 == 3)
            spec = random_general_domain(rng, n - 1);
        else {
            spec = random_symmetric_domain(seed * 31 + cfg, n - 1, 2, 3);
            spec.L = uniform(rng, 0.7, 1.3);
            // rescale curvatures into (-2/L, 0)
            Jet F = spec.F;
            for (int i = 0; i < spec.d(); ++i)
                F.set_coeff(MultiIndex::unit(spec.d(), i), 0.5 * uniform(rng, -1.8 / spec.L, -0.2 / spec.L));
            spec.F = F;
        }
        Orientation o = (cfg % 2 == 0) ? Orientation::plus : Orientation::minus;
        linalg::Matrix closed = hessian_closed_form(spec, r).materialize(o);
        int dim = closed.rows();
        for (int i = 0; i < dim; ++i)
            for (int j = i; j < dim; ++j) {
                double fd = fd_hessian_entry_richardson(spec, r, o, i, j);
                res.measured = std::max(res.measured, std::abs(fd - closed(i, j)));
            }
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 2: determinant identity
// ---------------------------------------------------------------------------

SuiteResult suite_det_identity(std::uint64_t seed) {
    SuiteResult res{"det-identity", false, 0.0, 1e-10, 0.0, ""};
    auto t0 = Clock::now();
    std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dULL);
    // elliptic configs
    for (int cfg = 0; cfg < 20; ++cfg) {
        int n = 2 + cfg % 3;
        int r = 1 + (cfg / 3) % 3;
        DomainSpec spec = random_symmetric_domain(seed * 77 + cfg, n - 1, 2, 3);
        res.measured = std::max(res.measured, det_identity_check(spec, r).rel_err);
    }
    // hyperbolic configs: nu < -2/L
    for (int cfg = 0; cfg < 5; ++cfg) {
        int d = 1 + cfg % 2;
        Jet F(d, 2);
        for (int i = 0; i < d; ++i) F.set_coeff(MultiIndex::unit(d, i), 0.5 * uniform(rng, -4.0, -2.2));
        DomainSpec spec = make_symmetric_domain(d + 1, 1.0, F);
        int r = 1 + cfg % 3;
        res.measured = std::max(res.measured, det_identity_check(spec, r).rel_err);
    }
    // pinned case: d=1, r=1, L=1, nu=-1/2 -> alpha = 4 pi /3, det = -3
    {
        Jet F(1, 2);
        F.set_coeff(MultiIndex{1}, -0.25);
        DomainSpec spec = make_symmetric_domain(2, 1.0, F);
        DetIdentityReport rep = det_identity_check(spec, 1);
        double pin_err = std::max(std::abs(rep.det_numeric - (-3.0)), std::abs(rep.predicted_abs - 3.0));
        res.measured = std::max(res.measured, pin_err);
        std::ostringstream d;
        d << "pinned det=" << rep.det_numeric << " predicted |.|=" << rep.predicted_abs;
        res.detail = d.str();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 3: Chebyshev closed-form inverse + parity
// ---------------------------------------------------------------------------

SuiteResult suite_chebyshev(std::uint64_t seed) {
    SuiteResult res{"chebyshev", false, 0.0, 1e-9, 0.0, ""};
    auto t0 = Clock::now();
    double parity_err = 0.0;
    for (int cfg = 0; cfg < 10; ++cfg) {
        int d = 1 + cfg % 3;
        int r = 1 + cfg % 4;
        DomainSpec spec = random_symmetric_domain(seed * 131 + cfg, d, 1, 2 * r);
        linalg::Matrix closed = inverse_hessian(spec, r, Orientation::plus);
        linalg::Matrix direct = linalg::inverse(hessian_closed_form(spec, r).materialize(Orientation::plus));
        for (int i = 0; i < closed.rows(); ++i)
            for (int j = 0; j < closed.cols(); ++j)
                res.measured = std::max(res.measured, std::abs(closed(i, j) - direct(i, j)));
    }
    // pinned: d=1, L=1, nu=-1/2, r=1 -> h^{11,11} = -1/3
    {
        double h11 = inverse_hessian_element(-1.0, 1.0, 1, 1, 1);
        res.measured = std::max(res.measured, std::abs(h11 - (-1.0 / 3.0)));
    }
    // parity relations on a general alternating configuration
    {
        std::mt19937_64 rng(seed ^ 0xda942042e4dd58b5ULL);
        for (int cfg = 0; cfg < 5; ++cfg) {
            int d = 1 + cfg % 2, r = 2 + cfg % 2;
            DomainSpec spec = random_general_domain(rng, d);
            BlockHessian bh = hessian_closed_form(spec, r);
            for (int i = 0; i < d; ++i) {
                linalg::Matrix hp = linalg::inverse(bh.materialize_index(i, Orientation::plus));
                linalg::Matrix hm = linalg::inverse(bh.materialize_index(i, Orientation::minus));
                int m = 2 * r;
                for (int p = 0; p < m; ++p) {
                    int parity_rep = (p % 2 == 0) ? 0 : 1;
                    parity_err = std::max(parity_err, std::abs(hp(p, p) - hp(parity_rep, parity_rep)));
                    // cyclic shift: h_-^{pq} = h_+^{p-1,q-1}
                    for (int q = 0; q < m; ++q)
                        parity_err = std::max(parity_err,
                                              std::abs(hm(p, q) - hp((p + m - 1) % m, (q + m - 1) % m)));
                }
                parity_err = std::max(parity_err, std::abs(hp(0, 0) - hm(1, 1)));
                parity_err = std::max(parity_err, std::abs(hp(1, 1) - hm(0, 0)));
            }
        }
    }
    std::ostringstream d;
    d << "parity max err " << parity_err << " (tol 1e-12)";
    res.detail = d.str();
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance && parity_err <= 1e-12;
    res.measured = std::max(res.measured, parity_err);
    return res;
}

// ---------------------------------------------------------------------------
// Suite 4: Poincare cross-check
// ---------------------------------------------------------------------------

SuiteResult suite_billiard(std::uint64_t seed) {
    SuiteResult res{"billiard", false, 0.0, 1e-5, 0.0, ""};
    auto t0 = Clock::now();
    for (int cfg = 0; cfg < 6; ++cfg) {
        int d = 1 + cfg % 2;
        DomainSpec spec = random_symmetric_domain(seed * 997 + cfg, d, 2, 3);
        OrbitData orbit = floquet_from_curvature(spec);
        linalg::Matrix P = poincare_matrix_numeric(spec);
        for (int r = 1; r <= 3; ++r) {
            double numeric = det_I_minus_Pr(P, r);
            double predicted = 1.0;
            for (double a : orbit.alpha) predicted *= 2.0 - 2.0 * std::cos(r * a);
            res.measured = std::max(res.measured, std::abs(numeric - std::abs(predicted)) / std::abs(predicted));
        }
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 5: stationary-phase engine vs Wick and oracle
// ---------------------------------------------------------------------------

namespace {

struct EngineOracleCase {
    Jet phase;
    AmplitudeData amp;
    std::function<cplx(const double*, double)> amp_eval; // a(x, k)
    double box = 0.6;
    int nodes = 0;
    std::vector<double> ks;
};

double engine_oracle_worst(const SPExpansion& engine, const OracleResult& oracle, int J) {
    double scale = 0.0;
    for (int j = 0; j <= J; ++j) scale = std::max(scale, std::abs(engine.coeffs[j]));
    double worst = 0.0;
    for (int j = 0; j <= J; ++j) worst = std::max(worst, std::abs(engine.coeffs[j] - oracle.coeffs[j]) / scale);
    return worst;
}

double compare_engine_oracle(const EngineOracleCase& c, int J) {
    PhaseData pd = PhaseData::from_jet(c.phase);
    SPExpansion engine = sp_expand(pd, c.amp, J);
    const Jet& S = c.phase;
    auto integrand = [&](const double* x, double k) -> cplx {
        std::span<const double> xs(x, static_cast<std::size_t>(S.dim()));
        double s = S.eval(xs);
        return c.amp_eval(x, k) * cplx(std::cos(k * s), std::sin(k * s));
    };
    OracleOptions opts;
    opts.k_grid = c.ks;
    opts.nodes_per_dim = c.nodes;
    opts.fit_degree = 5;
    OracleResult oracle =
        oscillatory_oracle(S.dim(), integrand, engine, std::vector<double>(S.dim(), c.box), opts);
    return engine_oracle_worst(engine, oracle, J);
}

// Chain-coupled integrands factor as prod_d F_d(x_d, x_{d+1}); the tensor
// integral collapses to matrix-vector sweeps, so high k and node counts
// stay affordable at N = 4.
OracleResult chain_oracle(int n_vars, const std::vector<std::function<cplx(double, double, double)>>& factors,
                          const SPExpansion& prefactor_record, double half_width, const OracleOptions& opts) {
    int n = opts.nodes_per_dim;
    const auto& gl = linalg::gauss_legendre(n);
    std::vector<double> x(n), wc(n);
    for (int i = 0; i < n; ++i) {
        x[i] = half_width * gl.nodes[i];
        wc[i] = half_width * gl.weights[i] *
                cutoff_profile(gl.nodes[i], opts.flat_fraction, opts.cutoff_power);
    }
    int nk = static_cast<int>(opts.k_grid.size());
    std::vector<cplx> values(nk);
    for (int t = 0; t < nk; ++t) {
        double k = opts.k_grid[t];
        // right-to-left matvec sweep; weight of x_d folds into factor d,
        // the last variable's weight into the seed vector
        std::vector<cplx> vec(n);
        for (int j = 0; j < n; ++j) vec[j] = wc[j];
        for (int d = n_vars - 2; d >= 0; --d) {
            std::vector<cplx> next(n, 0.0);
            for (int i = 0; i < n; ++i) {
                cplx acc = 0.0;
                for (int j = 0; j < n; ++j) acc += factors[d](x[i], x[j], k) * vec[j];
                next[i] = wc[i] * acc;
            }
            vec = std::move(next);
        }
        cplx total = 0.0;
        for (int i = 0; i < n; ++i) total += vec[i];
        values[t] = total / sp_prefactor(prefactor_record, k) * std::pow(k, opts.k_power_offset);
    }
    InverseKFit fit = fit_inverse_k(opts.k_grid, values, opts.fit_degree);
    OracleResult res;
    res.normalized = values;
    res.coeffs = fit.coeffs;
    res.fit_residual = fit.residual;
    if (res.fit_residual > opts.residual_threshold)
        throw NumericalError("chain_oracle: fit residual above threshold");
    return res;
}

} // namespace

SuiteResult suite_stationary_phase(std::uint64_t seed) {
    SuiteResult res{"stationary-phase", false, 0.0, 1e-3, 0.0, ""};
    auto t0 = Clock::now();
    (void)seed;
    std::ostringstream case_log;
    auto record = [&](const char* label, double err) {
        case_log << label << ' ' << err << "; ";
        res.measured = std::max(res.measured, err);
    };

    // Wick benchmark: S = x^2/2 + x^4, a = 1: c_j = i^{3j} (4j-1)!! / j!
    double wick_err = 0.0;
    {
        Jet S(1, 8);
        S.set_coeff(MultiIndex{2}, 0.5);
        S.set_coeff(MultiIndex{4}, 1.0);
        PhaseData pd = PhaseData::from_jet(S);
        AmplitudeData amp = AmplitudeData::constant(1, 6, 1.0);
        SPExpansion e = sp_expand(pd, amp, 3);
        auto wick = [](int j) {
            double df = 1.0;
            for (int k = 4 * j - 1; k >= 3; k -= 2) df *= k;
            double fact = 1.0;
            for (int k = 2; k <= j; ++k) fact *= k;
            cplx ipow = 1.0;
            for (int k = 0; k < 3 * j; ++k) ipow *= cplx(0, 1);
            return ipow * df / fact;
        };
        for (int j = 0; j <= 3; ++j) wick_err = std::max(wick_err, std::abs(e.coeffs[j] - wick(j)));

        EngineOracleCase c;
        c.phase = S;
        c.amp = amp;
        c.amp_eval = [](const double*, double) { return cplx(1.0, 0.0); };
        c.box = 0.9;
        c.nodes = 4300;
        c.ks = k_grid(400, 2400, 16);
        record("quartic", compare_engine_oracle(c, 2));
    }

    // random-phase suite, N <= 4, j <= 2
    {
        // N=1, cubic+quartic with polynomial amplitude
        EngineOracleCase c;
        c.phase = Jet(1, 8);
        c.phase.set_coeff(MultiIndex{2}, 0.5);
        c.phase.set_coeff(MultiIndex{3}, 0.2);
        c.phase.set_coeff(MultiIndex{4}, 0.3);
        Jet a0(1, 6);
        a0.set_coeff(MultiIndex{0}, 1.0);
        a0.set_coeff(MultiIndex{1}, 0.5);
        a0.set_coeff(MultiIndex{2}, 0.25);
        c.amp.families.push_back(ComplexJet::from_real(a0));
        c.amp_eval = [](const double* x, double) { return cplx(1.0 + 0.5 * x[0] + 0.25 * x[0] * x[0], 0.0); };
        c.box = 0.9;
        c.nodes = 2900;
        c.ks = k_grid(400, 2400, 16);
        record("n1-cubic", compare_engine_oracle(c, 2));
    }
    {
        // N=1, negative-definite quadratic part (signature -1)
        EngineOracleCase c;
        c.phase = Jet(1, 8);
        c.phase.set_coeff(MultiIndex{2}, -0.5);
        c.phase.set_coeff(MultiIndex{4}, 0.15);
        c.amp = AmplitudeData::constant(1, 6, 1.0);
        c.amp_eval = [](const double*, double) { return cplx(1.0, 0.0); };
        c.box = 0.9;
        c.nodes = 1300;
        c.ks = k_grid(400, 2400, 16);
        record("n1-negsig", compare_engine_oracle(c, 2));
    }
    {
        // N=2 with a k^{-1} amplitude family member
        EngineOracleCase c;
        c.phase = Jet(2, 8);
        c.phase.set_coeff(MultiIndex{2, 0}, 0.5);
        c.phase.set_coeff(MultiIndex{0, 2}, 0.65);
        c.phase.set_coeff(MultiIndex{2, 1}, 0.2);
        c.phase.set_coeff(MultiIndex{1, 3}, 0.1);
        c.phase.set_coeff(MultiIndex{4, 0}, 0.12);
        Jet a0(2, 6);
        a0.set_coeff(MultiIndex{0, 0}, 1.0);
        a0.set_coeff(MultiIndex{1, 1}, 0.3);
        Jet a1(2, 6);
        a1.set_coeff(MultiIndex{0, 0}, 0.4);
        a1.set_coeff(MultiIndex{2, 0}, 0.2);
        c.amp.families.push_back(ComplexJet::from_real(a0));
        c.amp.families.push_back(ComplexJet::from_real(a1));
        c.amp_eval = [](const double* x, double k) {
            return cplx(1.0 + 0.3 * x[0] * x[1] + (0.4 + 0.2 * x[0] * x[0]) / k, 0.0);
        };
        c.box = 0.8;
        c.nodes = 1700;
        c.ks = k_grid(500, 2000, 14);
        record("n2-family", compare_engine_oracle(c, 2));
    }
    {
        // N=3, mixed-sign quadratic, chain couplings (transfer-matrix oracle)
        Jet S(3, 8);
        S.set_coeff(MultiIndex{2, 0, 0}, 0.5);
        S.set_coeff(MultiIndex{0, 2, 0}, 0.6);
        S.set_coeff(MultiIndex{0, 0, 2}, -0.45);
        S.set_coeff(MultiIndex{1, 1, 0}, 0.18);
        S.set_coeff(MultiIndex{0, 1, 1}, 0.15);
        S.set_coeff(MultiIndex{3, 0, 0}, 0.08);
        S.set_coeff(MultiIndex{0, 4, 0}, 0.08);
        S.set_coeff(MultiIndex{0, 1, 2}, 0.06);
        AmplitudeData amp = AmplitudeData::constant(3, 6, 1.0);
        PhaseData pd = PhaseData::from_jet(S);
        SPExpansion engine = sp_expand(pd, amp, 2);
        std::vector<std::function<cplx(double, double, double)>> factors = {
            [](double a, double b, double k) {
                double s = 0.5 * a * a + 0.18 * a * b + 0.08 * a * a * a;
                return cplx(std::cos(k * s), std::sin(k * s));
            },
            [](double a, double b, double k) {
                double s = 0.6 * a * a + 0.15 * a * b + 0.08 * a * a * a * a + 0.06 * a * b * b -
                           0.45 * b * b;
                return cplx(std::cos(k * s), std::sin(k * s));
            },
        };
        OracleOptions opts;
        opts.k_grid = k_grid(500, 2500, 14);
        opts.nodes_per_dim = 1950;
        opts.fit_degree = 5;
        OracleResult oracle = chain_oracle(3, factors, engine, 0.75, opts);
        record("n3-chain", engine_oracle_worst(engine, oracle, 2));
    }
    {
        // N=4, chain-coupled phase: the oracle contracts transfer matrices,
        // so nodes and k stay high while the engine sees a dense inverse
        // Hessian and four-variable tensors
        Jet S(4, 8);
        S.set_coeff(MultiIndex{2, 0, 0, 0}, 0.5);
        S.set_coeff(MultiIndex{0, 2, 0, 0}, 0.55);
        S.set_coeff(MultiIndex{0, 0, 2, 0}, 0.7);
        S.set_coeff(MultiIndex{0, 0, 0, 2}, 0.6);
        S.set_coeff(MultiIndex{1, 1, 0, 0}, 0.2);
        S.set_coeff(MultiIndex{0, 1, 1, 0}, 0.15);
        S.set_coeff(MultiIndex{0, 0, 1, 1}, 0.1);
        S.set_coeff(MultiIndex{2, 1, 0, 0}, 0.08);
        S.set_coeff(MultiIndex{0, 0, 1, 2}, 0.05);
        S.set_coeff(MultiIndex{4, 0, 0, 0}, 0.06);
        Jet a0(4, 6);
        a0.set_coeff(MultiIndex{0, 0, 0, 0}, 1.0);
        a0.set_coeff(MultiIndex{1, 1, 0, 0}, 0.2);
        AmplitudeData amp;
        amp.families.push_back(ComplexJet::from_real(a0));
        PhaseData pd = PhaseData::from_jet(S);
        SPExpansion engine = sp_expand(pd, amp, 2);
        std::vector<std::function<cplx(double, double, double)>> factors = {
            [](double a, double b, double k) {
                double s = 0.5 * a * a + 0.2 * a * b + 0.08 * a * a * b + 0.06 * a * a * a * a;
                return cplx(1.0 + 0.2 * a * b, 0.0) * cplx(std::cos(k * s), std::sin(k * s));
            },
            [](double a, double b, double k) {
                double s = 0.55 * a * a + 0.15 * a * b;
                return cplx(std::cos(k * s), std::sin(k * s));
            },
            [](double a, double b, double k) {
                double s = 0.7 * a * a + 0.1 * a * b + 0.05 * a * b * b + 0.6 * b * b;
                return cplx(std::cos(k * s), std::sin(k * s));
            },
        };
        OracleOptions opts;
        opts.k_grid = k_grid(500, 2500, 14);
        opts.nodes_per_dim = 1900;
        opts.fit_degree = 5;
        OracleResult oracle = chain_oracle(4, factors, engine, 0.8, opts);
        record("n4-chain", engine_oracle_worst(engine, oracle, 2));
    }

    std::ostringstream d;
    d << "wick err " << wick_err << " (tol 1e-12); " << case_log.str();
    res.detail = d.str();
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance && wick_err <= 1e-12;
    res.measured = std::max(res.measured, wick_err);
    return res;
}

// ---------------------------------------------------------------------------
// Suite 6: Hankel amplitude
// ---------------------------------------------------------------------------

SuiteResult suite_hankel(std::uint64_t seed) {
    (void)seed;
    SuiteResult res{"hankel", false, 0.0, 1e-6, 0.0, ""};
    auto t0 = Clock::now();
    const double z = 50.0;
    for (double nu : {0.5, 1.0, 1.5}) {
        cplx series = hankel_amp_series(nu, z, 4);
        cplx exact = std::exp(cplx(0.0, -z)) * hankel_h1_quadrature(nu, z);
        res.measured = std::max(res.measured, std::abs(series - exact) / std::abs(exact));
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 7: model-integral invariants, engine vs oracle
// ---------------------------------------------------------------------------

namespace {

double model_engine_vs_oracle(const DomainSpec& spec, int r, int J, int nodes, double k0, double k1) {
    int hankel_terms = J + 1;
    PrincipalIntegral pi = build_principal_integral(spec, r, Orientation::plus, J, hankel_terms);
    SPExpansion engine = sp_expand(pi.phase, pi.amplitude, J);
    OracleOptions opts;
    opts.k_grid = k_grid(k0, k1, 14);
    opts.nodes_per_dim = nodes;
    opts.fit_degree = 5;
    opts.k_power_offset = pi.k_power;
    opts.flat_fraction = 0.65;
    double box = std::min(oracle_box_half_width(spec, r), 0.55);
    OracleResult oracle =
        model_oracle_trace(spec, r, Orientation::plus, hankel_terms, engine, box, opts);
    double worst = 0.0;
    for (int j = 1; j <= J; ++j) {
        cplx be = engine.coeffs[j] / engine.coeffs[0];
        cplx bo = oracle.coeffs[j] / oracle.coeffs[0];
        worst = std::max(worst, std::abs(be - bo) / std::max(1.0, std::abs(be)));
    }
    return worst;
}

} // namespace

SuiteResult suite_model_integral(std::uint64_t seed) {
    (void)seed;
    SuiteResult res{"model-integral", false, 0.0, 1e-2, 0.0, ""};
    auto t0 = Clock::now();

    // quadratic-only domain: B-hat_{1,1} is pure amplitude/Hessian data
    {
        Jet F(1, 3);
        F.set_coeff(MultiIndex{1}, -0.3);
        DomainSpec spec = make_symmetric_domain(2, 1.0, F);
        res.measured = std::max(res.measured, model_engine_vs_oracle(spec, 1, 2, 500, 400, 1200));
    }
    // generic d=1 domain, r = 1 and r = 2
    {
        Jet F(1, 3);
        F.set_coeff(MultiIndex{1}, -0.3);
        F.set_coeff(MultiIndex{2}, 0.15);
        F.set_coeff(MultiIndex{3}, -0.08);
        DomainSpec spec = make_symmetric_domain(2, 1.0, F);
        res.measured = std::max(res.measured, model_engine_vs_oracle(spec, 1, 2, 500, 400, 1200));
        res.measured = std::max(res.measured, model_engine_vs_oracle(spec, 2, 2, 500, 400, 1200));
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 8: linearity (a, b) and probe pattern (c)
// ---------------------------------------------------------------------------

namespace {

cplx bhat_with_top(const DomainSpec& base, const MultiIndex& gamma, double value, int r, int j) {
    DomainSpec spec = base;
    Jet F = spec.F.truncated(std::max(spec.F.trunc(), gamma.order()));
    F.set_coeff(gamma, value);
    spec.F = F;
    return wave_invariants_row(spec, r, j).bhat[j];
}

} // namespace

SuiteResult suite_linearity(std::uint64_t seed) {
    SuiteResult res{"linearity", false, 0.0, 1e-9, 0.0, ""};
    auto t0 = Clock::now();
    double insensitivity = 0.0;
    {
        DomainSpec spec = random_symmetric_domain(seed * 7 + 5, 1, 1, 6);
        // (a) second difference in the degree-4 coefficient (j = 1, r = 2)
        MultiIndex top{2};
        cplx b0 = bhat_with_top(spec, top, 0.0, 2, 1);
        cplx b1 = bhat_with_top(spec, top, 0.4, 2, 1);
        cplx b2 = bhat_with_top(spec, top, 0.8, 2, 1);
        res.measured = std::max(res.measured, std::abs(b2 - 2.0 * b1 + b0));
        // (a) degree-6 coefficient at j = 2
        MultiIndex top3{3};
        cplx c0 = bhat_with_top(spec, top3, 0.0, 2, 2);
        cplx c1 = bhat_with_top(spec, top3, 0.3, 2, 2);
        cplx c2 = bhat_with_top(spec, top3, 0.6, 2, 2);
        res.measured = std::max(res.measured, std::abs(c2 - 2.0 * c1 + c0));
        // (b) degree-(2j+4) coefficients do not move B-hat_{r,j}
        cplx base1 = wave_invariants_row(spec, 2, 1).bhat[1];
        cplx pert1 = bhat_with_top(spec, MultiIndex{3}, 0.7, 2, 1);
        insensitivity = std::max(insensitivity, std::abs(pert1 - base1));
        cplx base2 = wave_invariants_row(spec, 2, 2).bhat[2];
        cplx pert2 = bhat_with_top(spec, MultiIndex{4}, 0.7, 2, 2);
        insensitivity = std::max(insensitivity, std::abs(pert2 - base2));
    }
    {
        DomainSpec spec = random_symmetric_domain(seed * 7 + 6, 2, 1, 6);
        MultiIndex top{1, 1};
        cplx b0 = bhat_with_top(spec, top, 0.0, 2, 1);
        cplx b1 = bhat_with_top(spec, top, 0.4, 2, 1);
        cplx b2 = bhat_with_top(spec, top, 0.8, 2, 1);
        res.measured = std::max(res.measured, std::abs(b2 - 2.0 * b1 + b0));
    }
    std::ostringstream d;
    d << "insensitivity " << insensitivity << " (tol 1e-12)";
    res.detail = d.str();
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance && insensitivity <= 1e-12;
    return res;
}

SuiteResult suite_pattern(std::uint64_t seed) {
    SuiteResult res{"pattern", false, 0.0, 1e-8, 0.0, ""};
    auto t0 = Clock::now();
    (void)seed;
    // d=2, j=1: probe(r, gamma) * gamma! / r divided by prod cot(r alpha_i/2)^gamma_i
    // must be r-independent and factor as C_j prod kappa_i^gamma_i
    Jet F(2, 2);
    F.set_coeff(MultiIndex{1, 0}, 0.5 * curvature_from_alpha(2.4, 1.0));
    F.set_coeff(MultiIndex{0, 1}, 0.5 * curvature_from_alpha(1.3, 1.0));
    DomainSpec spec = make_symmetric_domain(3, 1.0, F);
    std::vector<double> alpha = alphas_of(spec);
    auto columns = multi_indices_of_order(2, 2);
    std::vector<std::vector<cplx>> ratios(columns.size());
    for (int r = 1; r <= 6; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            cplx probe = bhat_with_top(spec, columns[c], 0.5, r, 1) - bhat_with_top(spec, columns[c], 0.0, r, 1);
            probe *= 2.0; // unit-coefficient response
            // response per unit derivative D^{2j+2}_{2 gamma} f(0)
            probe /= columns[c].doubled().factorial();
            double cots = 1.0;
            for (int i = 0; i < 2; ++i)
                for (int k = 0; k < columns[c][i]; ++k) cots *= 1.0 / std::tan(0.5 * r * alpha[i]);
            ratios[c].push_back(probe * columns[c].factorial() / (double(r) * cots));
        }
    }
    // r-independence
    for (const auto& col : ratios) {
        cplx ref = col.front();
        for (const cplx& v : col)
            res.measured = std::max(res.measured, std::abs(v - ref) / std::abs(ref));
    }
    // factorization: ratio(2,0) * ratio(0,2) == ratio(1,1)^2 (up to C_j)
    {
        cplx r20 = ratios[0].front(), r11 = ratios[1].front(), r02 = ratios[2].front();
        // columns order from multi_indices_of_order: (2,0), (1,1), (0,2)
        res.measured = std::max(res.measured, std::abs(r20 * r02 / (r11 * r11) - 1.0));
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 9: Floquet recovery
// ---------------------------------------------------------------------------

SuiteResult suite_floquet(std::uint64_t seed) {
    SuiteResult res{"floquet", false, 0.0, 1e-8, 0.0, ""};
    auto t0 = Clock::now();
    auto check = [&](const std::vector<double>& alpha) {
        std::map<int, double> vals;
        for (int r = 1; r <= 8; ++r) {
            double v = 1.0;
            for (double a : alpha) {
                double s = std::sin(0.5 * r * a);
                v *= 4.0 * s * s;
            }
            vals[r] = v;
        }
        FloquetRecovery rec = recover_floquet(vals, static_cast<int>(alpha.size()), 8);
        std::vector<double> want = alpha;
        std::sort(want.begin(), want.end());
        for (std::size_t i = 0; i < want.size(); ++i)
            res.measured = std::max(res.measured, std::abs(rec.alpha[i] - want[i]));
    };
    check({1.0});
    check({1.0, std::sqrt(2.0)});
    std::mt19937_64 rng(seed ^ 0x853c49e6748fea9bULL);
    for (int cfg = 0; cfg < 3; ++cfg) {
        int d = 1 + cfg % 2;
        std::vector<double> alpha(d);
        do {
            for (int i = 0; i < d; ++i) alpha[i] = uniform(rng, 0.3, kPi - 0.3);
        } while (!alpha_nonresonant(alpha, 8, 0.05));
        check(alpha);
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------
// Suite 10: full round trip
// ---------------------------------------------------------------------------

SuiteResult suite_roundtrip(std::uint64_t seed) {
    SuiteResult res{"roundtrip", false, 0.0, 1e-6, 0.0, ""};
    auto t0 = Clock::now();
    for (int trial = 0; trial < 10; ++trial) {
        int d = 1 + trial % 2;
        DomainSpec spec = random_symmetric_domain(seed * 10007 + trial, d, 3, 8);
        WaveInvariantTable table = forward_table(spec, 8, 2);
        RecoverOptions opts;
        opts.j_max = 2;
        RecoveredJet rec = invert_pipeline(table, opts);
        // Floquet exponents come back in canonical ascending order, so the
        // recovered domain may be a coordinate permutation of the input
        // (an isometry); compare under the best index permutation.
        std::vector<int> perm(d);
        for (int i = 0; i < d; ++i) perm[i] = i;
        double best = -1.0;
        do {
            double worst = 0.0;
            for (int deg = 1; deg <= 3; ++deg)
                for (const MultiIndex& gamma : multi_indices_of_order(d, deg)) {
                    std::vector<int> permuted(d);
                    for (int i = 0; i < d; ++i) permuted[i] = gamma[perm[i]];
                    double truth = spec.F.coeff(MultiIndex(permuted));
                    double got = rec.F.coeff(gamma);
                    worst = std::max(worst, std::abs(got - truth) / std::max(1e-3, std::abs(truth)));
                }
            if (best < 0 || worst < best) best = worst;
        } while (std::next_permutation(perm.begin(), perm.end()));
        res.measured = std::max(res.measured, best);
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    res.passed = res.measured <= res.tolerance;
    return res;
}

// ---------------------------------------------------------------------------

} // namespace

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names = {
        "hessian",   "det-identity",   "chebyshev", "billiard", "stationary-phase", "hankel",
        "model-integral", "linearity", "pattern",   "floquet",  "roundtrip"};
    return names;
}

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
    if (name == "hessian") return suite_hessian(seed);
    if (name == "det-identity") return suite_det_identity(seed);
    if (name == "chebyshev") return suite_chebyshev(seed);
    if (name == "billiard") return suite_billiard(seed);
    if (name == "stationary-phase") return suite_stationary_phase(seed);
    if (name == "hankel") return suite_hankel(seed);
    if (name == "model-integral") return suite_model_integral(seed);
    if (name == "linearity") return suite_linearity(seed);
    if (name == "pattern") return suite_pattern(seed);
    if (name == "floquet") return suite_floquet(seed);
    if (name == "roundtrip") return suite_roundtrip(seed);
    throw SpecError("unknown verification suite: " + name);
}

std::vector<SuiteResult> run_all(std::uint64_t seed) {
    std::vector<SuiteResult> out;
    for (const std::string& name : suite_names()) out.push_back(run_suite(name, seed));
    return out;
}

} // namespace wavinv::verify
