#pragma once

// Symmetric analytic domain model near a bouncing-ball orbit: boundary
// graphs f_plus / f_minus over the tangential hyperplane, curvature data,
// and Floquet exponents.

#include "wavinv/jets.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wavinv {

// Tolerance for the parabolic / resonance rejection (|1+L nu| vs 1 and
// distance of r*alpha to 2*pi*Z).
inline constexpr double kDegeneracyTol = 1e-9;

struct DomainSpec {
    int n = 2;        // ambient dimension, d = n-1 tangential variables
    double L = 1.0;   // distance between the orbit endpoints (orbit length 2L)
    bool symmetric = true;
    // Even-representation function F: f(x) = L/2 + F(x_1^2, ..., x_d^2) - F(0).
    // Stored as a jet/polynomial in d variables (u_i = x_i^2).
    Jet F;
    // General mode: explicit graphs (f_plus(0) = L/2, f_minus(0) = -L/2).
    std::optional<Jet> f_plus;
    std::optional<Jet> f_minus;

    int d() const { return n - 1; }
};

enum class Stability { elliptic, hyperbolic };

struct OrbitData {
    std::vector<double> nu;      // curvature eigenvalues nu_j = D^2_{x^j} f_+(0)
    std::vector<double> a;       // Hessian diagonals a_j = -2(1 + L nu_j) (symmetric case)
    std::vector<Stability> stability;
    std::vector<double> alpha;   // elliptic: alpha_j in (0, 2pi); hyperbolic: positive exponent
};

// Boundary jets to total order `trunc`.  Symmetric mode builds
// f(x) = L/2 + F(x^2) - F(0) by index doubling and f_minus = -f_plus;
// general mode returns the stored jets truncated.
std::pair<Jet, Jet> build_boundary_jets(const DomainSpec& spec, int trunc);

// Second derivatives of f_plus / f_minus at 0 (requires diagonal Hessian).
std::vector<double> curvatures_plus(const DomainSpec& spec);
std::vector<double> curvatures_minus(const DomainSpec& spec);

// Per-index stability and Floquet exponents from 2 cos(alpha_j/2) = a_j
// (cosh in the hyperbolic case).  Throws ResonanceError on a parabolic
// index.  Symmetric mode only; see floquet_cosines for general domains.
OrbitData floquet_from_curvature(const DomainSpec& spec);

// cos(alpha_j) for either mode: symmetric from the half-angle relation,
// general from the two-bounce transfer-matrix trace (a_+ a_- - 2)/2.
std::vector<double> floquet_cosines(const DomainSpec& spec);

// OrbitData for either mode.  Symmetric mode delegates to
// floquet_from_curvature; general mode derives stability and exponents
// from the transfer-matrix cosine (alpha in (0, pi) for elliptic indices,
// which suffices for resonance checks and determinant identities).
OrbitData orbit_data(const DomainSpec& spec);

struct ValidationIssue {
    std::string what;
    bool fatal = false;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ValidationIssue> issues;
    std::string summary() const;
};

// Checks the domain-class conditions used by the pipeline: symmetry
// consistency, non-degeneracy (no parabolic index), r*alpha_j away from
// 2*pi*Z for all r <= r_max, and distinct alpha_j.
ValidationReport validate_DL(const DomainSpec& spec, const OrbitData& orbit, int r_max);

// Convenience: build a symmetric spec from F coefficients.
DomainSpec make_symmetric_domain(int n, double L, const Jet& F);

} // namespace wavinv
