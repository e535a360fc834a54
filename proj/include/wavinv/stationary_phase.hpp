#pragma once

// Stationary-phase coefficient engine: labelled-multigraph (Feynman
// diagram) enumeration with brute-force automorphism counts, sparse
// tensor contraction over labelings, and an independent oscillatory
// quadrature oracle.
//
// Conventions (pinned by the quartic benchmark and the quadrature oracle):
//   Z(k) = (2 pi / k)^{N/2} e^{i pi sgn(H)/4} / sqrt|det H| e^{i k S(0)} Z_A(k),
//   Z_A(k) = sum_j k^{-j} sum_{graphs, I-V=j} I_l(Gamma) / S(Gamma),
// edges carry i h^{jk}, closed vertices i D^nu S(0), the open vertex
// D^nu a(0) without an i; the empty graph carries a(0).

#include "wavinv/jets.hpp"
#include "wavinv/linalg.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace wavinv {

using cplx = std::complex<double>;

// Complex-coefficient jet as a pair of real jets.
struct ComplexJet {
    Jet re, im;

    static ComplexJet zero(int dim, int trunc) { return {Jet(dim, trunc), Jet(dim, trunc)}; }
    static ComplexJet from_real(const Jet& j) { return {j, Jet(j.dim(), j.trunc())}; }
    cplx coeff(const MultiIndex& gamma) const { return {re.coeff(gamma), im.coeff(gamma)}; }
    cplx value_at_zero() const { return {re.constant_term(), im.constant_term()}; }
    int dim() const { return re.dim(); }
    int trunc() const { return re.trunc(); }
};

ComplexJet cjet_add(const ComplexJet& a, const ComplexJet& b);
ComplexJet cjet_mul(const ComplexJet& a, const ComplexJet& b);
ComplexJet cjet_mul(const ComplexJet& a, const Jet& b);
ComplexJet cjet_scale(const ComplexJet& a, cplx s);
inline ComplexJet cjet_scale(const Jet& a, cplx s) { return {a * s.real(), a * s.imag()}; }

// Derivative data of a phase function at its critical point.
struct PhaseData {
    int n_vars = 0;
    double critical_value = 0.0;
    linalg::Matrix inverse_hessian;
    int signature = 0;
    double sqrt_abs_det = 0.0;

    struct TensorEntry {
        std::vector<int> vars; // sorted variable ids with repetition, size = order
        double value;          // D^gamma S(0) = gamma! * coeff
    };
    std::vector<std::vector<TensorEntry>> tensors_by_order;

    const std::vector<TensorEntry>& tensors(int order) const;

    // Numeric Hessian inverse / signature from the order-2 coefficients.
    static PhaseData from_jet(const Jet& phase);
    // Closed-form Hessian data supplied by the caller.
    static PhaseData from_parts(const Jet& phase, linalg::Matrix inverse_hessian, int signature,
                                double sqrt_abs_det);
};

// Amplitude family a(x, k) = sum_m k^{-m} A_m(x).
struct AmplitudeData {
    std::vector<ComplexJet> families;
    static AmplitudeData constant(int dim, int trunc, cplx value);
};

struct DiagramGraph {
    int closed_vertices = 0;
    // (V+1) x (V+1) symmetric multiplicity matrix; index 0 is the open
    // vertex; diagonal entries count loop edges.
    std::vector<std::vector<int>> multiplicity;
    long long automorphisms = 1;

    int edges() const;
    int valency(int v) const;
    int euler_characteristic() const { return closed_vertices - edges(); } // chi(Gamma')
    bool empty() const { return closed_vertices == 0 && edges() == 0; }
};

// Complete duplicate-free list of isomorphism classes with chi(Gamma') = -j.
const std::vector<DiagramGraph>& enumerate_graphs(int j);

// Sum over labelings of one graph, divided by S(Gamma).
cplx feynman_graph_sum(const PhaseData& phase, const ComplexJet& amp, const DiagramGraph& graph);

// Coefficient of k^{-j} in Z_A for the amplitude family (linearity:
// family member m feeds the order j-m pure-phase sum).
cplx feynman_sum(const PhaseData& phase, const AmplitudeData& amp, int j);

struct SPExpansion {
    std::vector<cplx> coeffs; // c_0..c_J
    double critical_value = 0.0;
    int signature = 0;
    double sqrt_abs_det = 0.0;
    int n_vars = 0;
};

SPExpansion sp_expand(const PhaseData& phase, const AmplitudeData& amp, int J);

// Closed-form prefactor (2 pi/k)^{N/2} e^{i pi sgn/4} e^{i k S0} / sqrt|det H|.
cplx sp_prefactor(const SPExpansion& e, double k);

// ---------------------------------------------------------------------------
// Oscillatory quadrature oracle
// ---------------------------------------------------------------------------

struct OracleOptions {
    std::vector<double> k_grid;   // required
    int nodes_per_dim = 64;
    int fit_degree = 8;           // polynomial degree in 1/k
    int k_power_offset = 0;       // integrand carries an overall k^{-offset}
    // Cutoff exp(-(|x_d| / (flat_fraction * half_width))^cutoff_power):
    // analytic, so its deviation from 1 contributes clean k^{-power/2}
    // corrections that the fit absorbs; cutoff_power = 0 means a hard box
    // window (the sharp-cutoff failure mode).
    double flat_fraction = 0.6;
    int cutoff_power = 8;
    double residual_threshold = 1e-2;
    int threads = 0;              // 0 -> hardware
};

struct OracleResult {
    std::vector<cplx> coeffs;          // fitted c_j, j = 0..fit_degree
    double fit_residual = 0.0;         // max relative deviation over the grid
    std::vector<cplx> normalized;      // per-k values the fit was made against
};

// Integrates integrand(x, k) (already including the amplitude and the
// oscillatory factor) against a smooth product bump over the box
// [-half_width_i, half_width_i], divides out the closed-form prefactor,
// and fits a polynomial in 1/k.  Throws NumericalError when the fit
// residual exceeds the threshold.
OracleResult oscillatory_oracle(int n_vars,
                                const std::function<cplx(const double*, double)>& integrand,
                                const SPExpansion& prefactor_record,
                                const std::vector<double>& half_width, const OracleOptions& opts);

// The oracle's cutoff profile in box-relative coordinates t in [-1, 1].
double cutoff_profile(double t, double flat_fraction, int cutoff_power);

// Least-squares fit of sum_j c_j k^{-j} against values on a k grid
// (shared by the tensor-product and trace-product oracles).
struct InverseKFit {
    std::vector<cplx> coeffs;
    double residual = 0.0; // max relative deviation over the grid
};
InverseKFit fit_inverse_k(const std::vector<double>& k_grid, const std::vector<cplx>& values,
                          int degree);

} // namespace wavinv
