#include "wavinv/length_hessian.hpp"

#include "wavinv/errors.hpp"

#include <cmath>
#include <sstream>

namespace wavinv {

Jet LengthJet::total() const {
    Jet sum = links.front();
    for (std::size_t i = 1; i < links.size(); ++i) sum = sum + links[i];
    return sum;
}

// ---------------------------------------------------------------------------
// Length jet
// ---------------------------------------------------------------------------

namespace {

// Squared chord between boundary points p and p+1 as a jet in the full
// configuration space.
Jet link_squared(const Jet& f_from, const Jet& f_to, int p, int r, int d, int trunc) {
    int dim = 2 * r * d;
    int q = (p + 1) % (2 * r);
    // embed f(x_p) and f(x_{p+1})
    std::vector<int> map_p(d), map_q(d);
    for (int i = 0; i < d; ++i) {
        map_p[i] = config_var(p, i, d);
        map_q[i] = config_var(q, i, d);
    }
    Jet fp = f_from.truncated(trunc).remapped(dim, map_p);
    Jet fq = f_to.truncated(trunc).remapped(dim, map_q);
    Jet df = fq - fp;
    Jet sq = df * df;
    for (int i = 0; i < d; ++i) {
        Jet diff = Jet::variable(dim, trunc, map_q[i]) - Jet::variable(dim, trunc, map_p[i]);
        sq = sq + diff * diff;
    }
    return sq;
}

} // namespace

LengthJet build_length_jet(const DomainSpec& spec, int r, Orientation orientation, int trunc) {
    if (trunc < 2) throw SpecError("build_length_jet: trunc must be >= 2");
    if (2 * r * spec.d() > kMaxVars) throw SpecError("build_length_jet: configuration dimension too large");
    auto [fplus, fminus] = build_boundary_jets(spec, trunc);
    LengthJet lj;
    lj.r = r;
    lj.orientation = orientation;
    lj.d = spec.d();
    lj.L = spec.L;
    lj.links.reserve(2 * r);
    std::vector<double> sqrt_at_L2 = sqrt_series(spec.L * spec.L, trunc + 1);
    for (int p = 0; p < 2 * r; ++p) {
        const Jet& f_from = orientation_sign(orientation, p + 1) > 0 ? fplus : fminus;
        const Jet& f_to = orientation_sign(orientation, p + 2) > 0 ? fplus : fminus;
        Jet sq = link_squared(f_from, f_to, p, r, spec.d(), trunc);
        lj.links.push_back(jet_compose_univariate(sqrt_at_L2, sq));
    }
    return lj;
}

double length_functional_value(const DomainSpec& spec, int r, Orientation orientation,
                               std::span<const double> x) {
    int d = spec.d();
    if (static_cast<int>(x.size()) != 2 * r * d)
        throw std::invalid_argument("length_functional_value: wrong configuration size");
    // Evaluate f as an exact polynomial; the domain is its own jet.
    auto [fplus, fminus] = build_boundary_jets(spec, kMaxTrunc);
    double total = 0.0;
    std::vector<double> xp(d), xq(d);
    for (int p = 0; p < 2 * r; ++p) {
        int q = (p + 1) % (2 * r);
        for (int i = 0; i < d; ++i) {
            xp[i] = x[config_var(p, i, d)];
            xq[i] = x[config_var(q, i, d)];
        }
        const Jet& f_from = orientation_sign(orientation, p + 1) > 0 ? fplus : fminus;
        const Jet& f_to = orientation_sign(orientation, p + 2) > 0 ? fplus : fminus;
        double df = f_to.eval(xq) - f_from.eval(xp);
        double chord2 = df * df;
        for (int i = 0; i < d; ++i) chord2 += (xq[i] - xp[i]) * (xq[i] - xp[i]);
        if (chord2 <= 0.0) throw NumericalError("length_functional_value: degenerate link");
        total += std::sqrt(chord2);
    }
    return total;
}

// ---------------------------------------------------------------------------
// Closed-form Hessian
// ---------------------------------------------------------------------------

BlockHessian hessian_closed_form(const DomainSpec& spec, int r) {
    BlockHessian h;
    h.r = r;
    h.d = spec.d();
    h.L = spec.L;
    std::vector<double> nup = curvatures_plus(spec);
    std::vector<double> num = curvatures_minus(spec);
    h.a_plus.resize(h.d);
    h.a_minus.resize(h.d);
    for (int j = 0; j < h.d; ++j) {
        h.a_plus[j] = -2.0 * (1.0 + spec.L * nup[j]);
        h.a_minus[j] = -2.0 * (1.0 - spec.L * num[j]);
    }
    return h;
}

linalg::Matrix BlockHessian::materialize_index(int i, Orientation orientation) const {
    int m = 2 * r;
    linalg::Matrix block(m, m);
    for (int p = 0; p < m; ++p) {
        double diag = orientation_sign(orientation, p + 1) > 0 ? a_plus[i] : a_minus[i];
        block(p, p) = -diag / L;
        // neighbors with cyclic wrap; for r = 1 both contributions land on
        // the same entry and merge to -2/L
        int q1 = (p + 1) % m, q2 = (p + m - 1) % m;
        block(p, q1) += -1.0 / L;
        block(p, q2) += -1.0 / L;
    }
    return block;
}

linalg::Matrix BlockHessian::materialize(Orientation orientation) const {
    int dim = 2 * r * d;
    if (dim > 64) throw SpecError("BlockHessian::materialize: dimension exceeds dense cap (64)");
    linalg::Matrix out(dim, dim);
    for (int i = 0; i < d; ++i) {
        linalg::Matrix block = materialize_index(i, orientation);
        for (int p = 0; p < 2 * r; ++p)
            for (int q = 0; q < 2 * r; ++q)
                out(config_var(p, i, d), config_var(q, i, d)) = block(p, q);
    }
    return out;
}

double BlockHessian::det(Orientation orientation) const {
    double det = 1.0;
    for (int i = 0; i < d; ++i) det *= linalg::determinant(materialize_index(i, orientation));
    return det;
}

DetIdentityReport det_identity_check(const DomainSpec& spec, int r) {
    BlockHessian h = hessian_closed_form(spec, r);
    DetIdentityReport report;
    report.det_numeric = h.det(Orientation::plus);
    std::vector<double> cosines = floquet_cosines(spec);
    // L^{2r(1-n)} prod_j |2 - 2 cos(r alpha_j)|; cos(r alpha) via Chebyshev
    // T_r of cos(alpha) covers elliptic and hyperbolic (cosh) branches alike.
    double predicted = std::pow(spec.L, 2.0 * r * (1.0 - spec.n));
    for (double c : cosines) predicted *= std::abs(2.0 - 2.0 * chebyshev_T(r, c));
    report.predicted_abs = predicted;
    double denom = std::max(std::abs(report.predicted_abs), 1e-300);
    report.rel_err = std::abs(std::abs(report.det_numeric) - report.predicted_abs) / denom;
    report.observed_sign = report.det_numeric > 0 ? 1 : (report.det_numeric < 0 ? -1 : 0);
    return report;
}

// ---------------------------------------------------------------------------
// Chebyshev polynomials and closed-form inverse
// ---------------------------------------------------------------------------

double chebyshev_T(int m, double x) {
    if (m == 0) return 1.0;
    double t0 = 1.0, t1 = x;
    for (int k = 2; k <= m; ++k) {
        double t2 = 2.0 * x * t1 - t0;
        t0 = t1;
        t1 = t2;
    }
    return t1;
}

double chebyshev_U(int m, double x) {
    if (m < 0) return 0.0; // U_{-1} = 0
    if (m == 0) return 1.0;
    double u0 = 1.0, u1 = 2.0 * x;
    for (int k = 2; k <= m; ++k) {
        double u2 = 2.0 * x * u1 - u0;
        u0 = u1;
        u1 = u2;
    }
    return u1;
}

double inverse_hessian_element(double a_i, double L, int r, int p, int q) {
    if (p > q) std::swap(p, q);
    double x = -a_i / 2.0;
    double denom = 2.0 * (1.0 - chebyshev_T(2 * r, x));
    if (std::abs(denom) <= 1e-12)
        throw ResonanceError("inverse_hessian: singular Hessian (r*alpha on 2*pi*Z)");
    // The T/U quotient inverts the pattern matrix -L*H_2r; the -L factor
    // restores the inverse of the Hessian itself.
    return -L * (chebyshev_U(2 * r - q + p - 1, x) + chebyshev_U(q - p - 1, x)) / denom;
}

linalg::Matrix inverse_hessian(const DomainSpec& spec, int r, Orientation orientation) {
    BlockHessian h = hessian_closed_form(spec, r);
    int d = h.d, m = 2 * r;
    linalg::Matrix out(m * d, m * d);
    for (int i = 0; i < d; ++i) {
        if (spec.symmetric) {
            double a_i = h.a_plus[i];
            for (int p = 1; p <= m; ++p)
                for (int q = 1; q <= m; ++q) {
                    double v = inverse_hessian_element(a_i, spec.L, r, p, q);
                    out(config_var(p - 1, i, d), config_var(q - 1, i, d)) = v;
                }
        } else {
            linalg::Matrix block = h.materialize_index(i, orientation);
            double det = linalg::determinant(block);
            if (std::abs(det) <= 1e-12)
                throw ResonanceError("inverse_hessian: singular Hessian factor");
            linalg::Matrix inv = linalg::inverse(std::move(block));
            for (int p = 0; p < m; ++p)
                for (int q = 0; q < m; ++q) out(config_var(p, i, d), config_var(q, i, d)) = inv(p, q);
        }
    }
    return out;
}

} // namespace wavinv
