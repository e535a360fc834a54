#include "wavinv/wave_invariants.hpp"

#include "wavinv/errors.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace wavinv {

namespace {

constexpr double kPi = std::numbers::pi;

double lgamma_half(double x) { return std::lgamma(x); }

} // namespace

// ---------------------------------------------------------------------------
// Hankel amplitude
// ---------------------------------------------------------------------------

std::vector<cplx> hankel_amp_coeffs(double nu, int M) {
    if (M < 1 || M > 12) throw std::invalid_argument("hankel_amp_coeffs: M out of range");
    // From Ha_nu(z) = sqrt(2/(pi z)) e^{i(z - pi nu/2 - pi/4)} / Gamma(nu+1/2)
    //                 * int_0^inf e^{-s} s^{nu-1/2} (1 - s/(2iz))^{nu-1/2} ds:
    // a_m = sqrt(2/pi) e^{-i pi(2nu+1)/4} binom(nu-1/2, m)
    //       Gamma(nu+1/2+m)/Gamma(nu+1/2) (i/2)^m
    std::vector<cplx> out(M);
    double arg = -0.25 * kPi * (2.0 * nu + 1.0);
    cplx pref = std::sqrt(2.0 / kPi) * cplx(std::cos(arg), std::sin(arg));
    double binom = 1.0;       // binom(nu - 1/2, m)
    double gamma_ratio = 1.0; // Gamma(nu+1/2+m)/Gamma(nu+1/2)
    cplx ihalf_pow = 1.0;
    for (int m = 0; m < M; ++m) {
        if (m > 0) {
            binom *= (nu - 0.5 - (m - 1)) / m;
            gamma_ratio *= (nu - 0.5 + m);
            ihalf_pow *= cplx(0.0, 0.5);
        }
        out[m] = pref * binom * gamma_ratio * ihalf_pow;
    }
    return out;
}

cplx hankel_h1_quadrature(double nu, double z) {
    // int_0^inf e^{-s} s^{nu-1/2} (1 + i s/(2z))^{nu-1/2} ds; the
    // substitution s = u^2 removes the endpoint singularity for every
    // half-integer and integer nu, leaving a smooth Gaussian-decay integrand
    const int panels = 16, nodes = 24;
    const auto& gl = linalg::gauss_legendre(nodes);
    const double u_max = 7.5; // e^{-u^2} ~ 4e-25
    cplx integral = 0.0;
    double width = u_max / panels;
    for (int p = 0; p < panels; ++p) {
        double a = p * width;
        for (int i = 0; i < nodes; ++i) {
            double u = a + 0.5 * width * (gl.nodes[i] + 1.0);
            double w = 0.5 * width * gl.weights[i];
            double s = u * u;
            cplx base = 1.0 + cplx(0.0, s / (2.0 * z));
            cplx val = 2.0 * std::exp(-s) * std::pow(u, 2.0 * nu) * std::pow(base, nu - 0.5);
            integral += w * val;
        }
    }
    double arg = z - 0.5 * kPi * nu - 0.25 * kPi;
    cplx osc(std::cos(arg), std::sin(arg));
    return std::sqrt(2.0 / (kPi * z)) * osc / std::exp(lgamma_half(nu + 0.5)) * integral;
}

cplx hankel_amp_series(double nu, double z, int M) {
    std::vector<cplx> a = hankel_amp_coeffs(nu, M);
    cplx sum = 0.0;
    double zp = 1.0;
    for (int m = 0; m < M; ++m) {
        sum += a[m] / zp;
        zp *= z;
    }
    return sum / std::sqrt(z);
}

// ---------------------------------------------------------------------------
// Principal integral
// ---------------------------------------------------------------------------

namespace {

struct LinkJets {
    Jet length;    // l_p
    Jet numerator; // N_p = <x_p - x_{p+1}, grad f_w(p)(x_p)> - (f_w(p)(x_p) - f_w(p+1)(x_{p+1}))
};

LinkJets build_link(const DomainSpec& spec, const Jet& f_from, const Jet& f_to, int p, int r, int trunc) {
    int d = spec.d();
    int dim = 2 * r * d;
    int q = (p + 1) % (2 * r);
    std::vector<int> map_p(d), map_q(d);
    for (int i = 0; i < d; ++i) {
        map_p[i] = config_var(p, i, d);
        map_q[i] = config_var(q, i, d);
    }
    Jet fp = f_from.truncated(trunc).remapped(dim, map_p);
    Jet fq = f_to.truncated(trunc).remapped(dim, map_q);
    Jet df = fp - fq;
    Jet sq = df * df;
    for (int i = 0; i < d; ++i) {
        Jet diff = Jet::variable(dim, trunc, map_q[i]) - Jet::variable(dim, trunc, map_p[i]);
        sq = sq + diff * diff;
    }
    LinkJets lj;
    lj.length = jet_compose_univariate(sqrt_series(spec.L * spec.L, trunc + 1), sq);

    Jet inner(dim, trunc);
    for (int i = 0; i < d; ++i) {
        Jet gi = jet_partial(f_from, i).truncated(trunc).remapped(dim, map_p);
        Jet diff = Jet::variable(dim, trunc, map_p[i]) - Jet::variable(dim, trunc, map_q[i]);
        inner = inner + diff * gi;
    }
    lj.numerator = inner - df;
    return lj;
}

} // namespace

PrincipalIntegral build_principal_integral(const DomainSpec& spec, int r, Orientation orientation, int J,
                                           int hankel_terms) {
    int d = spec.d();
    int dim = 2 * r * d;
    if (dim > kMaxVars) throw SpecError("build_principal_integral: configuration dimension too large");
    int phase_trunc = 2 * J + 2;
    int amp_trunc = std::max(0, 2 * J);
    if (phase_trunc > kMaxTrunc) throw SpecError("build_principal_integral: J too large for packing");
    int M = hankel_terms > 0 ? hankel_terms : J + 1;

    auto [fplus, fminus] = build_boundary_jets(spec, phase_trunc);

    // phase and links
    Jet phase_jet(dim, phase_trunc);
    std::vector<LinkJets> links;
    links.reserve(2 * r);
    for (int p = 0; p < 2 * r; ++p) {
        const Jet& f_from = orientation_sign(orientation, p + 1) > 0 ? fplus : fminus;
        const Jet& f_to = orientation_sign(orientation, p + 2) > 0 ? fplus : fminus;
        LinkJets lj = build_link(spec, f_from, f_to, p, r, phase_trunc);
        phase_jet = phase_jet + lj.length;
        links.push_back(std::move(lj));
    }

    // Hessian data from the closed form (per-index blocks)
    BlockHessian bh = hessian_closed_form(spec, r);
    int signature = 0;
    double log_sqrt_det = 0.0;
    for (int i = 0; i < d; ++i) {
        linalg::Matrix block = bh.materialize_index(i, orientation);
        for (double e : linalg::symmetric_eigenvalues(std::move(block))) {
            if (std::abs(e) < 1e-12) throw ResonanceError("build_principal_integral: singular Hessian");
            signature += e > 0 ? 1 : -1;
            log_sqrt_det += 0.5 * std::log(std::abs(e));
        }
    }
    PrincipalIntegral out;
    out.phase = PhaseData::from_parts(phase_jet, inverse_hessian(spec, r, orientation), signature,
                                      std::exp(log_sqrt_det));
    out.k_power = r * (spec.n - 1);

    // amplitude family: product over links of
    //   a_1(k l_p) Q_p = k^{-(n-1)/2} sum_m a_m N_p l_p^{-(n+1)/2 - m} k^{-m}
    std::vector<cplx> am = hankel_amp_coeffs(0.5 * spec.n - 1.0, M);
    int n_eps = J + 1;
    std::vector<ComplexJet> prod(n_eps, ComplexJet::zero(dim, amp_trunc));
    for (int p = 0; p < 2 * r; ++p) {
        Jet len = links[p].length.truncated(amp_trunc);
        Jet num = links[p].numerator.truncated(amp_trunc);
        std::vector<Jet> factor; // real jets R_{p,m} = N_p l_p^{-(n+1)/2-m}
        factor.reserve(n_eps);
        for (int m = 0; m < n_eps; ++m) {
            double beta = -0.5 * (spec.n + 1.0) - m;
            factor.push_back(num * jet_compose_univariate(power_series(beta, spec.L, amp_trunc + 1), len));
        }
        if (p == 0) {
            for (int m = 0; m < n_eps; ++m)
                prod[m] = cjet_scale(factor[m], m < M ? am[m] : cplx(0.0));
        } else {
            std::vector<ComplexJet> next(n_eps, ComplexJet::zero(dim, amp_trunc));
            for (int m1 = 0; m1 < n_eps; ++m1)
                for (int m2 = 0; m1 + m2 < n_eps; ++m2) {
                    if (m2 >= M) continue;
                    ComplexJet t = cjet_mul(prod[m1], factor[m2]);
                    next[m1 + m2] = cjet_add(next[m1 + m2], cjet_scale(t, am[m2]));
                }
            prod = std::move(next);
        }
    }

    // a^{pr} = L(x) A + (1/i) dA/dk with A = k^{-r(n-1)} sum_m G_m k^{-m}:
    // family member m is L G_m + i (r(n-1) + m - 1) G_{m-1}
    Jet length_total = phase_jet.truncated(amp_trunc);
    out.amplitude.families.resize(n_eps, ComplexJet::zero(dim, amp_trunc));
    for (int m = 0; m < n_eps; ++m) {
        ComplexJet fam = cjet_mul(prod[m], length_total);
        if (m >= 1) {
            double c = out.k_power + m - 1.0;
            fam = cjet_add(fam, cjet_scale(prod[m - 1], cplx(0.0, c)));
        }
        out.amplitude.families[m] = std::move(fam);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Wave invariants
// ---------------------------------------------------------------------------

WaveRow wave_invariants_row(const DomainSpec& spec, int r, int J) {
    PrincipalIntegral plus = build_principal_integral(spec, r, Orientation::plus, J);
    SPExpansion ep = sp_expand(plus.phase, plus.amplitude, J);
    std::vector<cplx> total = ep.coeffs;
    if (spec.symmetric) {
        for (cplx& c : total) c *= 2.0; // I^0 = 2 I^{0,+}
    } else {
        PrincipalIntegral minus = build_principal_integral(spec, r, Orientation::minus, J);
        SPExpansion em = sp_expand(minus.phase, minus.amplitude, J);
        for (int j = 0; j <= J; ++j) total[j] += em.coeffs[j];
    }
    if (std::abs(total[0]) < 1e-300) throw NumericalError("wave_invariants_row: vanishing leading coefficient");
    WaveRow row;
    row.r = r;
    row.bhat.resize(J + 1);
    for (int j = 0; j <= J; ++j) row.bhat[j] = total[j] / total[0];
    row.prefactor.critical_value = ep.critical_value;
    row.prefactor.signature = ep.signature;
    row.prefactor.sqrt_abs_det = ep.sqrt_abs_det;
    row.prefactor.c0 = total[0];
    row.prefactor.k_power = plus.k_power;
    return row;
}

cplx WaveInvariantTable::at(int r, int j) const {
    auto it = entries.find({r, j});
    if (it == entries.end()) throw std::out_of_range("WaveInvariantTable: missing entry");
    return it->second;
}

double WaveInvariantTable::det_invariant(int r) const {
    auto it = prefactors.find(r);
    if (it == prefactors.end()) throw std::out_of_range("WaveInvariantTable: missing prefactor");
    double det_h = it->second.sqrt_abs_det * it->second.sqrt_abs_det;
    return det_h * std::pow(L, 2.0 * r * (n - 1.0));
}

cplx top_term_calibration(int j) {
    static std::mutex mtx;
    static std::map<int, cplx> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find(j);
        if (it != cache.end()) return it->second;
    }
    // probe a fixed reference domain: d = 1, L = 1, nu = -0.6, r = 1
    Jet base(1, std::min(kMaxTrunc / 2, j + 1));
    base.set_coeff(MultiIndex{1}, -0.3);
    DomainSpec spec = make_symmetric_domain(2, 1.0, base);
    Jet pert = base.truncated(j + 1);
    pert.set_coeff(MultiIndex{j + 1}, 0.5);
    DomainSpec spec_pert = spec;
    spec_pert.F = pert;
    cplx delta = wave_invariants_row(spec_pert, 1, j).bhat[j] - wave_invariants_row(spec, 1, j).bhat[j];
    cplx top = top_term_closed_form(spec_pert, 1, j);
    cplx c = delta / top;
    std::lock_guard<std::mutex> lock(mtx);
    cache[j] = c;
    return c;
}

WaveInvariantTable forward_table(const DomainSpec& spec, int r_max, int J) {
    WaveInvariantTable table;
    table.n = spec.n;
    table.L = spec.L;
    table.symmetric = spec.symmetric;
    table.j_max = J;
    {
        std::ostringstream tag;
        tag << "normalization=c0-ratio;orientations=sum;tau=0;hankel_terms=" << J + 1
            << ";phase_trunc=" << 2 * J + 2 << ";amp_trunc=" << 2 * J;
        tag.precision(17);
        for (int j = 1; j <= J; ++j) {
            cplx c = top_term_calibration(j);
            tag << ";top_term_c" << j << "=(" << c.real() << "," << c.imag() << ")";
        }
        table.convention = tag.str();
    }
    for (int r = 1; r <= r_max; ++r) {
        WaveRow row = wave_invariants_row(spec, r, J);
        for (int j = 0; j <= J; ++j) table.entries[{r, j}] = row.bhat[j];
        table.prefactors[r] = row.prefactor;
    }
    return table;
}

cplx top_term_closed_form(const DomainSpec& spec, int r, int j) {
    if (!spec.symmetric) throw SpecError("top_term_closed_form: symmetric mode only");
    if (j < 1) throw std::invalid_argument("top_term_closed_form: j >= 1 required");
    int d = spec.d();
    BlockHessian bh = hessian_closed_form(spec, r);
    std::vector<double> h11(d);
    for (int i = 0; i < d; ++i) h11[i] = inverse_hessian_element(bh.a_plus[i], spec.L, r, 1, 1);

    auto [f, fm] = build_boundary_jets(spec, std::min(kMaxTrunc, 2 * j + 2));
    cplx sum = 0.0;
    for (const MultiIndex& gamma : multi_indices_of_order(d, j + 1)) {
        MultiIndex top = gamma.doubled();
        if (top.order() > f.trunc()) continue;
        double df = jet_derivative_coefficient(f, top);
        if (df == 0.0) continue;
        double hpow = 1.0;
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < gamma[i]; ++k) hpow *= h11[i];
        sum += (r / gamma.factorial()) * hpow * df;
    }
    cplx two_i_pow = 1.0;
    for (int k = 0; k < j + 1; ++k) two_i_pow *= cplx(0.0, 2.0);
    return sum / two_i_pow;
}

// ---------------------------------------------------------------------------
// Oracle integrand
// ---------------------------------------------------------------------------

std::function<cplx(const double*, double)> model_integrand(const DomainSpec& spec, int r,
                                                           Orientation orientation, int hankel_terms) {
    int d = spec.d();
    int m_links = 2 * r;
    auto [fplus, fminus] = build_boundary_jets(spec, kMaxTrunc);
    std::vector<cplx> am = hankel_amp_coeffs(0.5 * spec.n - 1.0, hankel_terms);
    double expo = -0.5 * (spec.n - 1.0);
    std::vector<int> sides(m_links);
    for (int p = 0; p < m_links; ++p) sides[p] = orientation_sign(orientation, p + 1);

    return [=, fplus = fplus, fminus = fminus](const double* x, double k) -> cplx {
        double S = 0.0;
        cplx P = 1.0;
        cplx D = 0.0;
        std::vector<double> xp(d), xq(d);
        for (int p = 0; p < m_links; ++p) {
            int q = (p + 1) % m_links;
            for (int i = 0; i < d; ++i) {
                xp[i] = x[p * d + i];
                xq[i] = x[q * d + i];
            }
            const Jet& f_from = sides[p] > 0 ? fplus : fminus;
            const Jet& f_to = sides[q] > 0 ? fplus : fminus;
            double fv = f_from.eval(xp), fw = f_to.eval(xq);
            double df = fv - fw;
            double chord2 = df * df;
            for (int i = 0; i < d; ++i) chord2 += (xq[i] - xp[i]) * (xq[i] - xp[i]);
            double len = std::sqrt(chord2);
            S += len;
            std::vector<double> g = f_from.eval_gradient(xp);
            double inner = 0.0;
            for (int i = 0; i < d; ++i) inner += (xp[i] - xq[i]) * g[i];
            double Q = (inner - df) / len;
            double z = k * len;
            // truncated a_1(z) = z^{-(n-1)/2} sum_m a_m z^{-m} and its z-derivative
            cplx series = 0.0, dseries = 0.0;
            double zp = 1.0;
            for (int m = 0; m < hankel_terms; ++m) {
                series += am[m] / zp;
                dseries += (expo - m) * am[m] / zp;
                zp *= z;
            }
            double zfac = std::pow(z, expo);
            cplx a1 = zfac * series;
            cplx da1 = zfac / z * dseries;
            P *= a1 * Q;
            D += len * da1 / a1;
        }
        cplx amp = P * (S - cplx(0.0, 1.0) * D);
        return amp * cplx(std::cos(k * S), std::sin(k * S));
    };
}

namespace {

// n x n complex matrices as separate re/im planes (cache-friendly products)
struct CMat {
    int n = 0;
    std::vector<double> re, im;
    explicit CMat(int n_) : n(n_), re(static_cast<std::size_t>(n_) * n_), im(re) {}
    double& r(int i, int j) { return re[static_cast<std::size_t>(i) * n + j]; }
    double& i_(int i, int j) { return im[static_cast<std::size_t>(i) * n + j]; }
    double r(int i, int j) const { return re[static_cast<std::size_t>(i) * n + j]; }
    double i_(int i, int j) const { return im[static_cast<std::size_t>(i) * n + j]; }
};

CMat cmat_mul(const CMat& a, const CMat& b) {
    int n = a.n;
    CMat c(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) {
            double ar = a.r(i, k), ai = a.i_(i, k);
            if (ar == 0.0 && ai == 0.0) continue;
            const double* br = &b.re[static_cast<std::size_t>(k) * n];
            const double* bi = &b.im[static_cast<std::size_t>(k) * n];
            double* cr = &c.re[static_cast<std::size_t>(i) * n];
            double* ci = &c.im[static_cast<std::size_t>(i) * n];
            for (int j = 0; j < n; ++j) {
                cr[j] += ar * br[j] - ai * bi[j];
                ci[j] += ar * bi[j] + ai * br[j];
            }
        }
    return c;
}

cplx cmat_trace_product(const CMat& a, const CMat& b) {
    // Tr(A B) = sum_ij A_ij B_ji
    int n = a.n;
    double tr = 0.0, ti = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double ar = a.r(i, j), ai = a.i_(i, j);
            double br = b.r(j, i), bi = b.i_(j, i);
            tr += ar * br - ai * bi;
            ti += ar * bi + ai * br;
        }
    return {tr, ti};
}

} // namespace

OracleResult model_oracle_trace(const DomainSpec& spec, int r, Orientation orientation, int hankel_terms,
                                const SPExpansion& prefactor_record, double half_width,
                                const OracleOptions& opts) {
    if (spec.d() != 1) throw SpecError("model_oracle_trace: d = 1 only");
    int m_links = 2 * r;
    int n = opts.nodes_per_dim;
    auto [fplus, fminus] = build_boundary_jets(spec, kMaxTrunc);
    std::vector<cplx> am = hankel_amp_coeffs(0.5 * spec.n - 1.0, hankel_terms);
    double expo = -0.5 * (spec.n - 1.0);

    const auto& gl = linalg::gauss_legendre(n);
    std::vector<double> xi(n), swc(n); // nodes and sqrt(weight * cutoff)
    for (int i = 0; i < n; ++i) {
        xi[i] = half_width * gl.nodes[i];
        double cut = cutoff_profile(gl.nodes[i], opts.flat_fraction, opts.cutoff_power);
        swc[i] = std::sqrt(half_width * gl.weights[i] * cut);
    }
    std::vector<double> fval_p(n), fval_m(n), gval_p(n), gval_m(n);
    for (int i = 0; i < n; ++i) {
        std::vector<double> x = {xi[i]};
        fval_p[i] = fplus.eval(x);
        fval_m[i] = fminus.eval(x);
        gval_p[i] = fplus.eval_gradient(x)[0];
        gval_m[i] = fminus.eval_gradient(x)[0];
    }

    auto integrate_at = [&](double k) -> cplx {
        // per-link kernels K_p and length-modified kernels M_p
        std::vector<CMat> kernels, modified;
        kernels.reserve(m_links);
        modified.reserve(m_links);
        for (int p = 0; p < m_links; ++p) {
            bool from_plus = orientation_sign(orientation, p + 1) > 0;
            bool to_plus = orientation_sign(orientation, p + 2) > 0;
            const std::vector<double>& ff = from_plus ? fval_p : fval_m;
            const std::vector<double>& gf = from_plus ? gval_p : gval_m;
            const std::vector<double>& ft = to_plus ? fval_p : fval_m;
            CMat K(n), M(n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double df = ff[i] - ft[j];
                    double dx = xi[j] - xi[i];
                    double len = std::sqrt(dx * dx + df * df);
                    double Q = ((xi[i] - xi[j]) * gf[i] - df) / len;
                    double z = k * len;
                    cplx series = 0.0, dseries = 0.0;
                    double zp = 1.0;
                    for (int mm = 0; mm < hankel_terms; ++mm) {
                        series += am[mm] / zp;
                        dseries += (expo - mm) * am[mm] / zp;
                        zp *= z;
                    }
                    double zfac = std::pow(z, expo);
                    cplx a1 = zfac * series;
                    cplx a1ratio = dseries / (z * series); // a1'(z)/a1(z)
                    cplx base = a1 * Q * cplx(std::cos(k * len), std::sin(k * len)) * swc[i] * swc[j];
                    // per-link amplitude factor l_p - i l_p a1'(k l)/a1(k l)
                    cplx mod = base * len * (1.0 - cplx(0.0, 1.0) * a1ratio);
                    K.r(i, j) = base.real();
                    K.i_(i, j) = base.imag();
                    M.r(i, j) = mod.real();
                    M.i_(i, j) = mod.imag();
                }
            kernels.push_back(std::move(K));
            modified.push_back(std::move(M));
        }
        // suffix products S_q = K_q ... K_{2r-1}
        std::vector<CMat> suffix(m_links + 1, CMat(n));
        {
            CMat id(n);
            for (int i = 0; i < n; ++i) id.r(i, i) = 1.0;
            suffix[m_links] = id;
        }
        for (int q = m_links - 1; q >= 0; --q) suffix[q] = cmat_mul(kernels[q], suffix[q + 1]);
        // I(k) = sum_q Tr(prefix_{q-1} M_q suffix_{q+1})
        CMat prefix(n);
        for (int i = 0; i < n; ++i) prefix.r(i, i) = 1.0;
        cplx total = 0.0;
        for (int q = 0; q < m_links; ++q) {
            CMat pm = cmat_mul(prefix, modified[q]);
            total += cmat_trace_product(pm, suffix[q + 1]);
            if (q + 1 < m_links) prefix = cmat_mul(prefix, kernels[q]);
        }
        return total / sp_prefactor(prefactor_record, k) * std::pow(k, opts.k_power_offset);
    };

    int nk = static_cast<int>(opts.k_grid.size());
    std::vector<cplx> values(nk);
    int nthreads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, nk));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto worker = [&]() {
        for (;;) {
            int t = next.fetch_add(1);
            if (t >= nk) return;
            try {
                values[t] = integrate_at(opts.k_grid[t]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);

    InverseKFit fit = fit_inverse_k(opts.k_grid, values, opts.fit_degree);
    OracleResult res;
    res.normalized = values;
    res.coeffs = fit.coeffs;
    res.fit_residual = fit.residual;
    if (res.fit_residual > opts.residual_threshold)
        throw NumericalError("model_oracle_trace: fit residual " + std::to_string(res.fit_residual) +
                             " exceeds threshold");
    return res;
}

double oracle_box_half_width(const DomainSpec& spec, int r) {
    double w = 0.7 * std::min(1.0, spec.L);
    int d = spec.d();
    int dim = 2 * r * d;
    auto [fplus, fminus] = build_boundary_jets(spec, kMaxTrunc);
    for (int shrink = 0; shrink < 20; ++shrink) {
        // probe the corners and edge midpoints of the box for link degeneracy
        bool ok = true;
        std::vector<double> xp(d), xq(d);
        for (int corner = 0; corner < (1 << std::min(dim, 16)) && ok; ++corner) {
            std::vector<double> x(dim);
            for (int i = 0; i < dim; ++i) x[i] = ((corner >> (i % 16)) & 1) ? w : -w;
            for (int p = 0; p < 2 * r && ok; ++p) {
                int q = (p + 1) % (2 * r);
                for (int i = 0; i < d; ++i) {
                    xp[i] = x[p * d + i];
                    xq[i] = x[q * d + i];
                }
                const Jet& f_from = orientation_sign(Orientation::plus, p + 1) > 0 ? fplus : fminus;
                const Jet& f_to = orientation_sign(Orientation::plus, p + 2) > 0 ? fplus : fminus;
                double df = f_from.eval(xp) - f_to.eval(xq);
                double chord2 = df * df;
                for (int i = 0; i < d; ++i) chord2 += (xq[i] - xp[i]) * (xq[i] - xp[i]);
                if (chord2 < 0.09 * spec.L * spec.L) ok = false;
            }
        }
        if (ok) return w;
        w *= 0.8;
    }
    return w;
}

} // namespace wavinv
