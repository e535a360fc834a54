#include "wavinv/inversion.hpp"

#include "wavinv/errors.hpp"
#include "wavinv/verify.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace wavinv;

namespace {

std::map<int, double> det_values_for(const std::vector<double>& alpha, int r_max) {
    std::map<int, double> vals;
    for (int r = 1; r <= r_max; ++r) {
        double v = 1.0;
        for (double a : alpha) {
            double s = std::sin(0.5 * r * a);
            v *= 4.0 * s * s;
        }
        vals[r] = v;
    }
    return vals;
}

} // namespace

TEST_CASE("floquet recovery d=1 and d=2") {
    FloquetRecovery rec = recover_floquet(det_values_for({1.0}, 8), 1, 8);
    CHECK(rec.alpha[0] == doctest::Approx(1.0).epsilon(1e-8));

    FloquetRecovery rec2 = recover_floquet(det_values_for({std::sqrt(2.0), 1.0}, 8), 2, 8);
    CHECK(rec2.alpha[0] == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(rec2.alpha[1] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("floquet recovery rejects parabolic data") {
    auto vals = det_values_for({1.0}, 8);
    vals[4] = 0.0; // a vanishing determinant value
    CHECK_THROWS_AS(recover_floquet(vals, 1, 8), InconsistentDataError);
}

TEST_CASE("floquet recovery guards") {
    CHECK_THROWS_AS(recover_floquet(det_values_for({1.0}, 3), 1, 3), InconsistentDataError); // r_max < 2d+2
    CHECK_THROWS_AS(recover_floquet(det_values_for({0.5, 1.0, 1.5, 2.0}, 12), 4, 12), SpecError); // d > 3
}

TEST_CASE("probe matrix: linearity, pattern, rank") {
    DomainSpec spec = verify::random_symmetric_domain(3001, 1, 1, 6);
    OrbitData orbit = floquet_from_curvature(spec);
    std::vector<int> r_list = {1, 2, 3};
    ProbeMatrix pm = probe_matrix(spec.F, orbit.alpha, spec.L, spec.n, 1, r_list);
    REQUIRE(pm.columns.size() == 1);
    REQUIRE(pm.r_list.size() == 3);

    // doubling the perturbation doubles the response
    Jet F2 = spec.F.truncated(2);
    F2.set_coeff(MultiIndex{2}, 2.0);
    DomainSpec spec2 = spec;
    spec2.F = F2;
    cplx b2 = wave_invariants_row(spec2, 2, 1).bhat[1];
    cplx b0 = pm.base[1];
    cplx unit = pm.response[0][1];
    CHECK(std::abs((b2 - b0) - 2.0 * unit) < 1e-10);

    // d=1, j=1: single column proportional to r cot^2(r alpha/2) across r
    double a = orbit.alpha[0];
    cplx ratio0 = pm.response[0][0] / (1.0 / std::pow(std::tan(0.5 * 1 * a), 2));
    cplx ratio1 = pm.response[0][1] / (2.0 / std::pow(std::tan(0.5 * 2 * a), 2));
    cplx ratio2 = pm.response[0][2] / (3.0 / std::pow(std::tan(0.5 * 3 * a), 2));
    CHECK(std::abs(ratio1 - ratio0) < 1e-9 * std::abs(ratio0));
    CHECK(std::abs(ratio2 - ratio0) < 1e-9 * std::abs(ratio0));
}

TEST_CASE("probe matrix rank equals columns for d=2") {
    DomainSpec spec = verify::random_symmetric_domain(3002, 2, 1, 6);
    OrbitData orbit = floquet_from_curvature(spec);
    std::vector<int> r_list = {1, 2, 3, 4, 5};
    ProbeMatrix pm = probe_matrix(spec.F, orbit.alpha, spec.L, spec.n, 1, r_list);
    REQUIRE(pm.columns.size() == 3);
    int rows = static_cast<int>(pm.r_list.size());
    linalg::Matrix a(2 * rows, 3);
    for (int c = 0; c < 3; ++c)
        for (int row = 0; row < rows; ++row) {
            a(row, c) = pm.response[c][row].real();
            a(rows + row, c) = pm.response[c][row].imag();
        }
    auto sv = linalg::singular_values(a);
    CHECK(sv.back() > 1e-10 * sv.front()); // full column rank
}

TEST_CASE("curvature from alpha inverts the Floquet relation") {
    double alpha = 4.0 * std::numbers::pi / 3.0;
    CHECK(curvature_from_alpha(alpha, 1.0) == doctest::Approx(-0.5));
    CHECK(curvature_from_alpha(2.0 * std::acosh(1.5), 1.0, true) == doctest::Approx(-2.5));
}

TEST_CASE("round trip d=1 including branch disambiguation") {
    // curvature in (-1, 0): true alpha > pi, so the folded candidate is wrong
    // and the pipeline must pick the unfolded branch from level-1 residuals
    Jet F(1, 2);
    F.set_coeff(MultiIndex{1}, -0.15); // nu = -0.3, cos(alpha/2) = -0.7
    F.set_coeff(MultiIndex{2}, 0.12);
    DomainSpec spec = make_symmetric_domain(2, 1.0, F);
    WaveInvariantTable table = forward_table(spec, 5, 1);
    RecoverOptions opts;
    opts.j_max = 1;
    RecoveredJet rec = invert_pipeline(table, opts);
    CHECK(rec.branch.size() == 1);
    CHECK(rec.branch[0] == 1); // unfolded
    CHECK(rec.F.coeff(MultiIndex{1}) == doctest::Approx(-0.15).epsilon(1e-7));
    CHECK(rec.F.coeff(MultiIndex{2}) == doctest::Approx(0.12).epsilon(1e-7));
}

TEST_CASE("insufficient table rows raise inconsistent-data") {
    DomainSpec spec = verify::random_symmetric_domain(3003, 2, 1, 6);
    WaveInvariantTable table = forward_table(spec, 1, 1); // single row
    OrbitData orbit = floquet_from_curvature(spec);
    CHECK_THROWS_AS(recover_jet(table, orbit.alpha, spec.L, spec.n, 1), InconsistentDataError);
}

TEST_CASE("hyperbolic recovery with known exponents (experimental)") {
    Jet F(1, 3);
    F.set_coeff(MultiIndex{1}, -1.25); // a = 3 = 2 cosh(alpha/2)
    F.set_coeff(MultiIndex{2}, 0.1);
    F.set_coeff(MultiIndex{3}, -0.04);
    DomainSpec spec = make_symmetric_domain(2, 1.0, F);
    OrbitData orbit = floquet_from_curvature(spec);
    WaveInvariantTable table = forward_table(spec, 4, 2);
    RecoverOptions opts;
    opts.j_max = 2;
    opts.alpha_override = orbit.alpha;
    opts.hyperbolic_mask = {true};
    opts.experimental_mixed = true;
    RecoveredJet rec = recover_jet(table, orbit.alpha, spec.L, spec.n, 2, opts);
    CHECK(rec.F.coeff(MultiIndex{1}) == doctest::Approx(-1.25).epsilon(1e-10));
    CHECK(rec.F.coeff(MultiIndex{2}) == doctest::Approx(0.1).epsilon(1e-10));
    CHECK(rec.F.coeff(MultiIndex{3}) == doctest::Approx(-0.04).epsilon(1e-10));
    for (double r : rec.residuals) CHECK(r < 1e-10); // residual-based self-validation
}

TEST_CASE("mixed elliptic/hyperbolic recovery with known exponents (experimental)") {
    Jet F(2, 2);
    F.set_coeff(MultiIndex{1, 0}, -0.3);
    F.set_coeff(MultiIndex{0, 1}, -1.4);
    F.set_coeff(MultiIndex{2, 0}, 0.15);
    F.set_coeff(MultiIndex{1, 1}, -0.1);
    F.set_coeff(MultiIndex{0, 2}, 0.08);
    DomainSpec spec = make_symmetric_domain(3, 1.0, F);
    OrbitData orbit = floquet_from_curvature(spec);
    REQUIRE(orbit.stability[0] == Stability::elliptic);
    REQUIRE(orbit.stability[1] == Stability::hyperbolic);
    WaveInvariantTable table = forward_table(spec, 5, 1);
    RecoverOptions opts;
    opts.j_max = 1;
    opts.alpha_override = orbit.alpha;
    opts.hyperbolic_mask = {false, true};
    opts.experimental_mixed = true;
    RecoveredJet rec = recover_jet(table, orbit.alpha, spec.L, spec.n, 1, opts);
    CHECK(rec.F.coeff(MultiIndex{2, 0}) == doctest::Approx(0.15).epsilon(1e-10));
    CHECK(rec.F.coeff(MultiIndex{1, 1}) == doctest::Approx(-0.1).epsilon(1e-10));
    CHECK(rec.F.coeff(MultiIndex{0, 2}) == doctest::Approx(0.08).epsilon(1e-10));
    CHECK(rec.experimental_mixed);
}

TEST_CASE("levels only install their own degree") {
    DomainSpec spec = verify::random_symmetric_domain(3004, 1, 3, 8);
    WaveInvariantTable table = forward_table(spec, 6, 2);
    OrbitData orbit = floquet_from_curvature(spec);
    RecoverOptions opts;
    opts.j_max = 2;
    RecoveredJet rec = recover_jet(table, orbit.alpha, spec.L, spec.n, 2, opts);
    // after level 2, the level-1 coefficient still equals its level-1 value
    RecoveredJet rec1 = recover_jet(table, orbit.alpha, spec.L, spec.n, 1, opts);
    CHECK(rec.F.coeff(MultiIndex{2}) == doctest::Approx(rec1.F.coeff(MultiIndex{2})).epsilon(1e-12));
    CHECK(rec.order == 6);
    CHECK(rec.residuals.size() == 2);
    for (double r : rec.residuals) CHECK(r < 1e-8);
}
