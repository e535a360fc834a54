#include "wavinv/billiard.hpp"

#include "wavinv/errors.hpp"
#include "wavinv/length_hessian.hpp"

#include <cmath>

namespace wavinv {

namespace {

struct Graphs {
    Jet fplus, fminus;
    const Jet& side(int s) const { return s > 0 ? fplus : fminus; }
};

Graphs boundary_graphs(const DomainSpec& spec) {
    auto [fp, fm] = build_boundary_jets(spec, kMaxTrunc);
    return {fp, fm};
}

double eval_f(const Jet& f, std::span<const double> x) { return f.eval(x); }

std::vector<double> grad_f(const Jet& f, std::span<const double> x) { return f.eval_gradient(x); }

} // namespace

BoundaryPoint billiard_step(const DomainSpec& spec, const BoundaryPoint& p, const BilliardOptions& opts) {
    int d = spec.d();
    double eps = opts.patch_radius > 0 ? opts.patch_radius : 0.3 * std::min(1.0, spec.L);
    Graphs graphs = boundary_graphs(spec);
    const Jet& f_here = graphs.side(p.side);

    // Reconstruct the inward unit direction zeta = (u, v) from eta:
    // u_i + v * d_i f = eta_i and |zeta| = 1.
    std::vector<double> gf = grad_f(f_here, p.x);
    double gg = 0.0, etag = 0.0, ee = 0.0;
    for (int i = 0; i < d; ++i) {
        gg += gf[i] * gf[i];
        etag += p.eta[i] * gf[i];
        ee += p.eta[i] * p.eta[i];
    }
    double disc = etag * etag + (1.0 + gg) * (1.0 - ee);
    if (disc <= 0.0) throw NumericalError("billiard_step: tangential ray (|eta| = 1)");
    // side +: inward points down (v < 0); side -: inward points up
    double v = (etag - p.side * std::sqrt(disc)) / (1.0 + gg);
    std::vector<double> u(d);
    for (int i = 0; i < d; ++i) u[i] = p.eta[i] - v * gf[i];

    // Intersect the ray with the opposite graph: phi(t) = x_n(t) - f(x'(t)).
    int new_side = -p.side;
    const Jet& f_there = graphs.side(new_side);
    double x_n0 = eval_f(f_here, p.x);
    std::vector<double> xt(d);
    auto phi = [&](double t) {
        for (int i = 0; i < d; ++i) xt[i] = p.x[i] + t * u[i];
        return (x_n0 + t * v) - f_there.eval(xt);
    };
    // Newton with bisection safeguard on [lo, hi]
    double lo = 0.25 * spec.L, hi = 4.0 * spec.L;
    double flo = phi(lo), fhi = phi(hi);
    if (flo * fhi > 0) throw NumericalError("billiard_step: ray does not re-intersect the opposite graph");
    double t = spec.L; // chord length of the unperturbed orbit
    for (int iter = 0; iter < 200; ++iter) {
        double ft = phi(t);
        if (std::abs(ft) < opts.tol) break;
        if (flo * ft < 0)
            hi = t;
        else {
            lo = t;
            flo = ft;
        }
        const double dh = 1e-7;
        double dphi = (phi(t + dh) - phi(t - dh)) / (2.0 * dh);
        double tn = t - ft / dphi;
        t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    }
    BoundaryPoint out;
    out.side = new_side;
    out.x.resize(d);
    for (int i = 0; i < d; ++i) out.x[i] = p.x[i] + t * u[i];
    for (double xi : out.x)
        if (std::abs(xi) > eps) throw NumericalError("billiard_step: ray leaves the patch");

    // Reflect: flip the normal component of zeta at the new point.
    std::vector<double> gf2 = grad_f(f_there, out.x);
    double norm2 = 1.0;
    for (int i = 0; i < d; ++i) norm2 += gf2[i] * gf2[i];
    double invn = 1.0 / std::sqrt(norm2);
    // inward unit normal: side -: (-grad f, 1)/|.|, side +: (grad f, -1)/|.|
    std::vector<double> nu(d + 1);
    for (int i = 0; i < d; ++i) nu[i] = -new_side * gf2[i] * invn;
    nu[d] = new_side * invn;
    double zdotn = v * nu[d];
    for (int i = 0; i < d; ++i) zdotn += u[i] * nu[i];
    std::vector<double> zr(d + 1);
    for (int i = 0; i < d; ++i) zr[i] = u[i] - 2.0 * zdotn * nu[i];
    zr[d] = v - 2.0 * zdotn * nu[d];

    // Project to chart covector components: eta_i = zeta . (e_i, d_i f).
    out.eta.resize(d);
    for (int i = 0; i < d; ++i) out.eta[i] = zr[i] + zr[d] * gf2[i];
    return out;
}

linalg::Matrix poincare_matrix_numeric(const DomainSpec& spec, double h, const BilliardOptions& opts) {
    int d = spec.d();
    auto two_step = [&](const std::vector<double>& z) {
        BoundaryPoint p;
        p.side = 1;
        p.x.assign(z.begin(), z.begin() + d);
        p.eta.assign(z.begin() + d, z.end());
        BoundaryPoint mid = billiard_step(spec, p, opts);
        BoundaryPoint back = billiard_step(spec, mid, opts);
        std::vector<double> out(2 * d);
        for (int i = 0; i < d; ++i) {
            out[i] = back.x[i];
            out[d + i] = back.eta[i];
        }
        return out;
    };
    auto central = [&](double step) {
        linalg::Matrix jac(2 * d, 2 * d);
        std::vector<double> z(2 * d, 0.0);
        for (int c = 0; c < 2 * d; ++c) {
            z[c] = step;
            std::vector<double> fp = two_step(z);
            z[c] = -step;
            std::vector<double> fm = two_step(z);
            z[c] = 0.0;
            for (int rr = 0; rr < 2 * d; ++rr) jac(rr, c) = (fp[rr] - fm[rr]) / (2.0 * step);
        }
        return jac;
    };
    // Richardson: central differences at h and h/2
    linalg::Matrix j1 = central(h);
    linalg::Matrix j2 = central(0.5 * h);
    linalg::Matrix out(2 * d, 2 * d);
    for (int r = 0; r < 2 * d; ++r)
        for (int c = 0; c < 2 * d; ++c) out(r, c) = (4.0 * j2(r, c) - j1(r, c)) / 3.0;
    return out;
}

std::vector<std::complex<double>> poincare_eigenvalues_numeric(const DomainSpec& spec, double h,
                                                               const BilliardOptions& opts) {
    return linalg::eigenvalues(poincare_matrix_numeric(spec, h, opts));
}

double det_I_minus_Pr(const linalg::Matrix& poincare, int r) {
    linalg::Matrix pr = linalg::matrix_power(poincare, r);
    linalg::Matrix m = linalg::Matrix::identity(pr.rows()) - pr;
    return std::abs(linalg::determinant(std::move(m)));
}

double length_gradient_norm(const DomainSpec& spec, int r, std::span<const double> x) {
    int dim = 2 * r * spec.d();
    std::vector<double> xv(x.begin(), x.end());
    double maxg = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < dim; ++i) {
        xv[i] = x[i] + h;
        double fp = length_functional_value(spec, r, Orientation::plus, xv);
        xv[i] = x[i] - h;
        double fm = length_functional_value(spec, r, Orientation::plus, xv);
        xv[i] = x[i];
        maxg = std::max(maxg, std::abs((fp - fm) / (2.0 * h)));
    }
    return maxg;
}

namespace {

// Analytic gradient of the length functional: each point p contributes the
// outgoing and incoming chord terms with exact polynomial graph gradients.
double analytic_length_gradient_norm(const DomainSpec& spec, int r, Orientation orientation,
                                     std::span<const double> x) {
    int d = spec.d();
    auto [fplus, fminus] = build_boundary_jets(spec, kMaxTrunc);
    auto side_jet = [&](int p) -> const Jet& {
        return orientation_sign(orientation, p + 1) > 0 ? fplus : fminus;
    };
    int m = 2 * r;
    std::vector<std::vector<double>> pts(m, std::vector<double>(d));
    for (int p = 0; p < m; ++p)
        for (int i = 0; i < d; ++i) pts[p][i] = x[config_var(p, i, d)];
    std::vector<double> fv(m);
    std::vector<std::vector<double>> gv(m);
    for (int p = 0; p < m; ++p) {
        fv[p] = side_jet(p).eval(pts[p]);
        gv[p] = side_jet(p).eval_gradient(pts[p]);
    }
    auto chord = [&](int p, int q) {
        double c2 = (fv[p] - fv[q]) * (fv[p] - fv[q]);
        for (int i = 0; i < d; ++i) c2 += (pts[p][i] - pts[q][i]) * (pts[p][i] - pts[q][i]);
        return std::sqrt(c2);
    };
    double maxg = 0.0;
    for (int p = 0; p < m; ++p) {
        int next = (p + 1) % m, prev = (p + m - 1) % m;
        double lf = chord(p, next), lb = chord(prev, p);
        for (int i = 0; i < d; ++i) {
            double g = ((pts[p][i] - pts[next][i]) + (fv[p] - fv[next]) * gv[p][i]) / lf +
                       ((pts[p][i] - pts[prev][i]) + (fv[p] - fv[prev]) * gv[p][i]) / lb;
            maxg = std::max(maxg, std::abs(g));
        }
    }
    return maxg;
}

} // namespace

double verify_critical_point(const DomainSpec& spec, int r) {
    int dim = 2 * r * spec.d();
    std::vector<double> zero(dim, 0.0);
    double numeric = length_gradient_norm(spec, r, zero);
    double analytic = std::max(analytic_length_gradient_norm(spec, r, Orientation::plus, zero),
                               analytic_length_gradient_norm(spec, r, Orientation::minus, zero));
    return std::max(numeric, analytic);
}

} // namespace wavinv
