#pragma once

// Verification suites behind `wavinv verify` and the acceptance binary.
// Each suite checks one of the pinned identities (Hessian closed form,
// determinant identity, Chebyshev inverse, Poincare cross-check,
// stationary-phase engine vs oracle, Hankel series, model-integral
// invariants, linearity/pattern structure, Floquet recovery, round trip)
// at its stated tolerance.

#include "wavinv/domain.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wavinv::verify {

struct SuiteResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;  // worst error observed
    double tolerance = 0.0;
    double seconds = 0.0;
    std::string detail;
};

const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, std::uint64_t seed);
std::vector<SuiteResult> run_all(std::uint64_t seed);

// Deterministic random symmetric domains for tests: elliptic curvatures,
// non-resonant up to r_max, even coefficients up to F-degree `u_degree`.
DomainSpec random_symmetric_domain(std::uint64_t seed, int d, int u_degree, int r_max);

} // namespace wavinv::verify
