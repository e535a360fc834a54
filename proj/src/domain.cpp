#include "wavinv/domain.hpp"

#include "wavinv/errors.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace wavinv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Jet doubled_graph(const DomainSpec& spec, int trunc) {
    // f(x) = L/2 + F(x_1^2,...,x_d^2) - F(0): monomial u^gamma -> x^{2 gamma}
    Jet f(spec.d(), trunc);
    f.set_coeff(MultiIndex::zero(spec.d()), spec.L / 2.0);
    spec.F.for_each([&](const MultiIndex& gamma, double c) {
        if (gamma.order() == 0) return; // normalized away
        MultiIndex idx = gamma.doubled();
        if (idx.order() <= trunc) f.set_coeff(idx, c);
    });
    return f;
}

void check_graph_invariants(const Jet& f, double expected_const, const char* which) {
    if (std::abs(f.constant_term() - expected_const) > 1e-12)
        throw SpecError(std::string(which) + ": constant term must be +-L/2");
    for (int i = 0; i < f.dim(); ++i)
        if (f.coeff(MultiIndex::unit(f.dim(), i)) != 0.0)
            throw SpecError(std::string(which) + ": gradient at 0 must vanish (orbit endpoint not critical)");
    for (int i = 0; i < f.dim(); ++i)
        for (int j = i + 1; j < f.dim(); ++j) {
            MultiIndex mixed = MultiIndex::unit(f.dim(), i) + MultiIndex::unit(f.dim(), j);
            if (std::abs(f.coeff(mixed)) > 1e-12)
                throw SpecError(std::string(which) +
                                ": Hessian at 0 must be diagonal; rotate coordinates to principal axes first");
        }
}

} // namespace

DomainSpec make_symmetric_domain(int n, double L, const Jet& F) {
    if (n < 2) throw SpecError("DomainSpec: ambient dimension must be >= 2");
    if (L <= 0) throw SpecError("DomainSpec: L must be positive");
    if (F.dim() != n - 1) throw SpecError("DomainSpec: F must have n-1 variables");
    DomainSpec spec;
    spec.n = n;
    spec.L = L;
    spec.symmetric = true;
    spec.F = F;
    return spec;
}

std::pair<Jet, Jet> build_boundary_jets(const DomainSpec& spec, int trunc) {
    if (trunc < 2) throw SpecError("build_boundary_jets: trunc must be >= 2");
    if (spec.symmetric) {
        if (spec.F.dim() != spec.d()) throw SpecError("build_boundary_jets: missing F in symmetric mode");
        Jet f = doubled_graph(spec, trunc);
        return {f, -f};
    }
    if (!spec.f_plus || !spec.f_minus)
        throw SpecError("build_boundary_jets: general mode requires explicit f_plus and f_minus");
    Jet fp = spec.f_plus->truncated(trunc);
    Jet fm = spec.f_minus->truncated(trunc);
    check_graph_invariants(fp, spec.L / 2.0, "f_plus");
    check_graph_invariants(fm, -spec.L / 2.0, "f_minus");
    return {fp, fm};
}

std::vector<double> curvatures_plus(const DomainSpec& spec) {
    auto [fp, fm] = build_boundary_jets(spec, 2);
    std::vector<double> nu(spec.d());
    for (int j = 0; j < spec.d(); ++j)
        nu[j] = jet_derivative_coefficient(fp, MultiIndex::unit(spec.d(), j, 2));
    return nu;
}

std::vector<double> curvatures_minus(const DomainSpec& spec) {
    auto [fp, fm] = build_boundary_jets(spec, 2);
    std::vector<double> nu(spec.d());
    for (int j = 0; j < spec.d(); ++j)
        nu[j] = jet_derivative_coefficient(fm, MultiIndex::unit(spec.d(), j, 2));
    return nu;
}

OrbitData floquet_from_curvature(const DomainSpec& spec) {
    if (!spec.symmetric)
        throw SpecError("floquet_from_curvature: symmetric mode only (use floquet_cosines for general domains)");
    OrbitData orbit;
    orbit.nu = curvatures_plus(spec);
    int d = spec.d();
    orbit.a.resize(d);
    orbit.stability.resize(d);
    orbit.alpha.resize(d);
    for (int j = 0; j < d; ++j) {
        double g = 1.0 + spec.L * orbit.nu[j];
        if (std::abs(std::abs(g) - 1.0) <= kDegeneracyTol) {
            std::ostringstream msg;
            msg << "floquet_from_curvature: parabolic index j=" << j << " (|1 + L nu| = " << std::abs(g)
                << "), orbit degenerate";
            throw ResonanceError(msg.str());
        }
        orbit.a[j] = -2.0 * g;
        if (std::abs(g) < 1.0) {
            orbit.stability[j] = Stability::elliptic;
            orbit.alpha[j] = 2.0 * std::acos(-g); // in (0, 2pi)
        } else {
            orbit.stability[j] = Stability::hyperbolic;
            // |a_j| = 2 cosh(alpha_j / 2); the sign of a_j (inverse hyperbolic
            // branch) does not enter |det| identities
            orbit.alpha[j] = 2.0 * std::acosh(std::abs(orbit.a[j]) / 2.0);
        }
    }
    return orbit;
}

std::vector<double> floquet_cosines(const DomainSpec& spec) {
    int d = spec.d();
    std::vector<double> cosines(d);
    if (spec.symmetric) {
        OrbitData orbit = floquet_from_curvature(spec);
        for (int j = 0; j < d; ++j) {
            double half = orbit.a[j] / 2.0; // cos or cosh of alpha/2
            cosines[j] = 2.0 * half * half - 1.0;
        }
        return cosines;
    }
    std::vector<double> nup = curvatures_plus(spec);
    std::vector<double> num = curvatures_minus(spec);
    for (int j = 0; j < d; ++j) {
        double ap = -2.0 * (1.0 + spec.L * nup[j]);
        double am = -2.0 * (1.0 - spec.L * num[j]);
        cosines[j] = (ap * am - 2.0) / 2.0;
    }
    return cosines;
}

OrbitData orbit_data(const DomainSpec& spec) {
    if (spec.symmetric) return floquet_from_curvature(spec);
    OrbitData orbit;
    orbit.nu = curvatures_plus(spec);
    std::vector<double> cosines = floquet_cosines(spec);
    int d = spec.d();
    orbit.a.resize(d);
    orbit.stability.resize(d);
    orbit.alpha.resize(d);
    for (int j = 0; j < d; ++j) {
        double c = cosines[j];
        if (std::abs(std::abs(c) - 1.0) <= kDegeneracyTol) {
            std::ostringstream msg;
            msg << "orbit_data: parabolic index j=" << j << " (cos alpha = " << c << ")";
            throw ResonanceError(msg.str());
        }
        orbit.a[j] = 0.0; // half-angle diagonals are a symmetric-mode notion
        if (std::abs(c) < 1.0) {
            orbit.stability[j] = Stability::elliptic;
            orbit.alpha[j] = std::acos(c);
        } else {
            orbit.stability[j] = Stability::hyperbolic;
            orbit.alpha[j] = std::acosh(std::abs(c));
        }
    }
    return orbit;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    out << (ok ? "OK" : "FAILED");
    for (const auto& issue : issues) out << "\n  " << (issue.fatal ? "[fail] " : "[warn] ") << issue.what;
    return out.str();
}

ValidationReport validate_DL(const DomainSpec& spec, const OrbitData& orbit, int r_max) {
    ValidationReport report;
    auto fail = [&](std::string what) {
        report.issues.push_back({std::move(what), true});
        report.ok = false;
    };

    // (i) symmetry consistency
    if (spec.symmetric) {
        auto [fp, fm] = build_boundary_jets(spec, std::min(kMaxTrunc, 6));
        Jet sum = fp + fm;
        if (!sum.terms().empty()) fail("symmetry: f_plus + f_minus is not the zero jet");
        bool even = true;
        fp.for_each([&](const MultiIndex& gamma, double) {
            for (int i = 0; i < gamma.dim(); ++i)
                if (gamma[i] % 2 != 0) even = false;
        });
        if (!even) fail("symmetry: f has an odd-order coefficient");
    }

    // (iv) non-degeneracy: parabolic indices, resonances, distinct exponents
    if (spec.symmetric) {
        for (double nu : curvatures_plus(spec)) {
            double g = 1.0 + spec.L * nu;
            if (std::abs(std::abs(g) - 1.0) <= kDegeneracyTol) {
                std::ostringstream msg;
                msg << "non-degeneracy: parabolic index (|1 + L nu| = " << std::abs(g) << ")";
                fail(msg.str());
            }
        }
    }
    int d = static_cast<int>(orbit.alpha.size());
    for (int j = 0; j < d; ++j) {
        if (orbit.stability[j] == Stability::hyperbolic) continue; // r*alpha never on 2pi Z
        for (int r = 1; r <= r_max; ++r) {
            double t = std::fmod(r * orbit.alpha[j], kTwoPi);
            double dist = std::min(t, kTwoPi - t);
            if (dist <= kDegeneracyTol) {
                std::ostringstream msg;
                msg << "non-degeneracy: r*alpha_" << j + 1 << " in 2*pi*Z at r=" << r
                    << " (alpha=" << orbit.alpha[j] << ")";
                fail(msg.str());
            }
        }
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (orbit.stability[i] == orbit.stability[j] &&
                std::abs(orbit.alpha[i] - orbit.alpha[j]) <= kDegeneracyTol) {
                std::ostringstream msg;
                msg << "non-degeneracy: alpha_" << i + 1 << " and alpha_" << j + 1 << " coincide";
                fail(msg.str());
            }
    return report;
}

} // namespace wavinv
