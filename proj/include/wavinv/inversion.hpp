#pragma once

// Inverse spectral algorithm: recover Floquet exponents from r-indexed
// determinant invariants, then inductively recover the even Taylor
// coefficients of the boundary from the wave-invariant table via probe
// columns generated by the forward engine.

#include "wavinv/wave_invariants.hpp"

#include <map>

namespace wavinv {

struct FloquetRecovery {
    std::vector<double> alpha; // canonical: folded into (0, pi), ascending
    double residual = 0.0;     // rms of the determinant matching
};

// Solves prod_j 4 sin^2(r alpha_j / 2) = det_values(r) by multi-start
// bounded least squares.  Requires det_values for r = 1..r_max with
// r_max >= 2d + 2; d <= 3.  Throws InconsistentDataError when the best
// residual exceeds 1e-6 (e.g. a parabolic orbit) and SpecError for d > 3.
FloquetRecovery recover_floquet(const std::map<int, double>& det_values, int d, int r_max);

struct ProbeMatrix {
    std::vector<int> r_list;          // rows kept (resonant rows dropped)
    std::vector<MultiIndex> columns;  // gamma with |gamma| = j+1 (u variables)
    std::vector<std::vector<cplx>> response; // response[col][row]
    std::vector<cplx> base;           // B-hat_{r,j} of the zero-top candidate
};

// Linear response of B-hat_{r,j} to unit top coefficients, by pairs of
// forward evaluations on the candidate domain lower_F.
ProbeMatrix probe_matrix(const Jet& lower_F, const std::vector<double>& alpha, double L, int n, int j,
                         const std::vector<int>& r_list);

struct RecoveredJet {
    int d = 1;
    int order = 0; // highest boundary order recovered (2 j + 2)
    Jet F;         // recovered even-representation coefficients
    std::vector<double> alpha;
    std::vector<int> branch;  // per index: 0 = folded alpha, 1 = 2 pi - alpha
    std::vector<double> condition_numbers; // per level j = 1..
    std::vector<double> residuals;         // per level (rms)
    double floquet_residual = 0.0;
    bool ill_conditioned = false;
    bool experimental_mixed = false;
};

struct RecoverOptions {
    int j_max = 2;
    double condition_threshold = 1e8;
    double residual_threshold = 1e-6;
    std::vector<double> alpha_override;   // skips Floquet recovery and branch search
    std::vector<bool> hyperbolic_mask;    // with alpha_override only (experimental mixed case)
    bool experimental_mixed = false;
};

// Level-by-level recovery with the branch of each alpha_j fixed by the
// caller (alpha entries may lie anywhere in (0, 2 pi)).
RecoveredJet recover_jet(const WaveInvariantTable& table, const std::vector<double>& alpha, double L, int n,
                         int J_max, const RecoverOptions& opts = {});

// Full pipeline: Floquet recovery from the stored determinant invariants,
// branch disambiguation at the first level (all 2^d fold combinations,
// smallest residual wins), then inductive jet recovery.
RecoveredJet invert_pipeline(const WaveInvariantTable& table, const RecoverOptions& opts = {});

// FLOQUET relation inverted: nu = -(1 + cos(alpha/2))/L (cosh if hyperbolic).
double curvature_from_alpha(double alpha, double L, bool hyperbolic = false);

} // namespace wavinv
