// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  Runs the same library suites as `wavinv verify`.

#include "wavinv/verify.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>

int main(int argc, char** argv) {
    std::uint64_t seed = 1;
    for (int i = 1; i < argc - 1; ++i)
        if (std::strcmp(argv[i], "--seed") == 0) seed = std::strtoull(argv[i + 1], nullptr, 10);

    struct Criterion {
        const char* label;
        const char* suite;
    };
    const Criterion criteria[] = {
        {"01 hessian closed form vs finite differences (<= 1e-8)", "hessian"},
        {"02 determinant identity |det H| (<= 1e-10 rel)", "det-identity"},
        {"03 chebyshev inverse + parity relations (<= 1e-9 / 1e-12)", "chebyshev"},
        {"04 poincare det(I-P^r) cross-check (<= 1e-5 rel)", "billiard"},
        {"05 stationary-phase engine vs wick/oracle (<= 1e-12 / 1e-3)", "stationary-phase"},
        {"06 hankel amplitude series vs quadrature (<= 1e-6 rel)", "hankel"},
        {"07 model-integral invariants vs oracle (<= 1e-2 rel)", "model-integral"},
        {"08a/b linearity + insensitivity (<= 1e-9 / 1e-12)", "linearity"},
        {"08c probe pattern r-independence + factorization (<= 1e-8)", "pattern"},
        {"09 floquet recovery (<= 1e-8)", "floquet"},
        {"10 full round trip, 10 seeds (<= 1e-6 rel)", "roundtrip"},
    };

    bool all = true;
    for (const Criterion& c : criteria) {
        wavinv::verify::SuiteResult r = wavinv::verify::run_suite(c.suite, seed);
        std::printf("%s  %-62s measured %.3e  tol %.1e  (%.1f s)%s%s\n", r.passed ? "PASS" : "FAIL",
                    c.label, r.measured, r.tolerance, r.seconds, r.detail.empty() ? "" : "  ",
                    r.detail.c_str());
        std::fflush(stdout);
        all = all && r.passed;
    }
    return all ? 0 : 1;
}
