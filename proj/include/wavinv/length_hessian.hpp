#pragma once

// The length functional of the 2r-link configuration as a jet at the
// critical (bouncing-ball) configuration, its block Hessian in closed
// form, the determinant identity, and the Chebyshev closed-form inverse.

#include "wavinv/domain.hpp"
#include "wavinv/jets.hpp"
#include "wavinv/linalg.hpp"

#include <vector>

namespace wavinv {

enum class Orientation { plus, minus };

inline int orientation_sign(Orientation o, int p) {
    // w_+(p) = +1 for odd p (1-based), alternating; w_- flips it.
    int w = (p % 2 == 1) ? 1 : -1;
    return o == Orientation::plus ? w : -w;
}

struct LengthJet {
    int r = 1;
    Orientation orientation = Orientation::plus;
    int d = 1;        // tangential variables per point
    double L = 1.0;
    std::vector<Jet> links; // 2r jets in 2r*d variables, trunc T
    Jet total() const;
    int dim() const { return 2 * r * d; }
};

// Variable layout: component i of boundary point p (both 0-based) sits at
// index p*d + i of the 2r*d-dimensional configuration space.
inline int config_var(int p, int i, int d) { return p * d + i; }

// Link lengths as sqrt-composition jets of the squared chord.
LengthJet build_length_jet(const DomainSpec& spec, int r, Orientation orientation, int trunc);

// Exact evaluation of the length functional (sum of true square roots of
// the polynomial boundary), for finite-difference oracles.
double length_functional_value(const DomainSpec& spec, int r, Orientation orientation,
                               std::span<const double> x);

struct BlockHessian {
    int r = 1;
    int d = 1;
    double L = 1.0;
    std::vector<double> a_plus;  // a_{j,+} = -2(1 + L nu_{j,+})
    std::vector<double> a_minus; // a_{j,-} = -2(1 - L nu_{j,-})

    // Dense 2r*d x 2r*d materialization (capped; see materialize_block).
    linalg::Matrix materialize(Orientation orientation) const;
    // The 2r x 2r periodic Jacobi factor for tangential index i:
    // H is block-diagonal over i after permutation, with these factors.
    linalg::Matrix materialize_index(int i, Orientation orientation) const;
    double det(Orientation orientation) const;
};

BlockHessian hessian_closed_form(const DomainSpec& spec, int r);

struct DetIdentityReport {
    double det_numeric = 0.0;      // det of the materialized Hessian
    double predicted_abs = 0.0;    // L^{2r(1-n)} prod |2 - 2 cos r alpha_j| (cosh branch as needed)
    double rel_err = 0.0;          // on absolute values
    int observed_sign = 0;
};

DetIdentityReport det_identity_check(const DomainSpec& spec, int r);

double chebyshev_T(int m, double x);
// U_{-1} := 0 by convention.
double chebyshev_U(int m, double x);

// Inverse Hessian h^{ij,pq}, dense in configuration indices.  Symmetric
// domains use the Chebyshev closed form (per tangential index); general
// domains invert the 2r x 2r periodic Jacobi factors numerically.
// Throws ResonanceError when 1 - T_{2r}(-a_i/2) vanishes.
linalg::Matrix inverse_hessian(const DomainSpec& spec, int r, Orientation orientation);

// Closed-form single element for symmetric domains (p, q are 1-based).
double inverse_hessian_element(double a_i, double L, int r, int p, int q);

} // namespace wavinv
