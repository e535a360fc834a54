#pragma once

// Numerical billiard dynamics on the two-graph boundary model, used as an
// independent geometric oracle: billiard map iteration, criticality of the
// bouncing-ball configuration, and numeric Poincare-map eigenvalues.

#include "wavinv/domain.hpp"
#include "wavinv/linalg.hpp"

#include <complex>
#include <vector>

namespace wavinv {

struct BoundaryPoint {
    std::vector<double> x;   // tangential coordinates (d)
    int side = 1;            // +1: top graph, -1: bottom graph
    std::vector<double> eta; // projected cotangent momentum (d)
};

struct BilliardOptions {
    double patch_radius = 0.0; // 0 -> 0.3 * min(1, L)
    double tol = 1e-12;        // on the graph equation of the ray intersection
};

// One reflection: follow the ray to the opposite graph, reflect with equal
// angles, return the new point with updated projected momentum.  Throws
// NumericalError when the ray leaves the patch or the ray is tangential.
BoundaryPoint billiard_step(const DomainSpec& spec, const BoundaryPoint& p,
                            const BilliardOptions& opts = {});

// Jacobian of the two-step map beta^2 at the fixed point (0, 0) by central
// finite differences; 2d x 2d in (x', eta) coordinates.
linalg::Matrix poincare_matrix_numeric(const DomainSpec& spec, double h = 1e-5,
                                       const BilliardOptions& opts = {});

std::vector<std::complex<double>> poincare_eigenvalues_numeric(const DomainSpec& spec, double h = 1e-5,
                                                               const BilliardOptions& opts = {});

// |det(I - P^r)| from the numeric Poincare matrix.
double det_I_minus_Pr(const linalg::Matrix& poincare, int r);

// Max of |analytic gradient| and |finite-difference gradient| of the length
// functional at the bouncing-ball configuration (or at x if given).
double verify_critical_point(const DomainSpec& spec, int r);
double length_gradient_norm(const DomainSpec& spec, int r, std::span<const double> x);

} // namespace wavinv
