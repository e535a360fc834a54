#include "wavinv/billiard.hpp"

#include "wavinv/errors.hpp"
#include "wavinv/verify.hpp"

#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>

using namespace wavinv;

namespace {

DomainSpec ellipse_like() {
    // L=1, nu=-0.5 -> alpha = 4 pi/3
    Jet F(1, 3);
    F.set_coeff(MultiIndex{1}, -0.25);
    F.set_coeff(MultiIndex{2}, 0.05);
    return make_symmetric_domain(2, 1.0, F);
}

} // namespace

TEST_CASE("bouncing-ball link and 2-periodicity") {
    DomainSpec spec = ellipse_like();
    BoundaryPoint p;
    p.side = 1;
    p.x = {0.0};
    p.eta = {0.0};
    BoundaryPoint q = billiard_step(spec, p);
    CHECK(q.side == -1);
    CHECK(q.x[0] == doctest::Approx(0.0));
    CHECK(q.eta[0] == doctest::Approx(0.0));
    BoundaryPoint back = billiard_step(spec, q);
    CHECK(back.side == 1);
    // the fixed point is exact: every step of the straight vertical ray
    // evaluates without roundoff
    CHECK(back.x[0] == 0.0);
    CHECK(back.eta[0] == 0.0);
}

TEST_CASE("reflection law: unit speed and equal angles") {
    DomainSpec spec = ellipse_like();
    BoundaryPoint p;
    p.side = 1;
    p.x = {0.05};
    p.eta = {0.08};
    BoundaryPoint q = billiard_step(spec, p);
    // the projected momentum of a unit covector satisfies the coball bound
    CHECK(std::abs(q.eta[0]) < 1.0);
    // quadratic-form energy of the projection: eta^T (I + grad f grad f^T)^{-1} eta < 1
    auto [fp2, fm2] = build_boundary_jets(spec, 6);
    const Jet& g = q.side > 0 ? fp2 : fm2;
    double df = g.eval_gradient(q.x)[0];
    double energy = q.eta[0] * q.eta[0] / (1.0 + df * df);
    CHECK(energy < 1.0);
    CHECK(energy > 0.0);
    // third step goes back through the second point (reversibility of the
    // reflected ray): step from q with flipped momentum returns near p.x
    BoundaryPoint qr = q;
    qr.eta[0] = -q.eta[0];
    BoundaryPoint back = billiard_step(spec, qr);
    CHECK(back.x[0] == doctest::Approx(p.x[0]).epsilon(1e-9));
}

TEST_CASE("ray leaving patch is reported") {
    DomainSpec spec = ellipse_like();
    BoundaryPoint p;
    p.side = 1;
    p.x = {0.0};
    p.eta = {0.9}; // strongly transverse
    CHECK_THROWS_AS(billiard_step(spec, p), NumericalError);
}

TEST_CASE("poincare eigenvalues match the Floquet prediction") {
    DomainSpec spec = ellipse_like();
    OrbitData orbit = floquet_from_curvature(spec);
    auto ev = poincare_eigenvalues_numeric(spec);
    // d=1: eigenvalues e^{+- i alpha} with alpha = 4 pi/3
    double alpha = orbit.alpha[0];
    std::complex<double> expected(std::cos(alpha), std::sin(alpha));
    double err = std::min(std::abs(ev[0] - expected) + std::abs(ev[1] - std::conj(expected)),
                          std::abs(ev[1] - expected) + std::abs(ev[0] - std::conj(expected)));
    CHECK(err < 1e-5);
    // symplecticity: product of the pair = 1
    CHECK(std::abs(ev[0] * ev[1] - 1.0) < 1e-8);
}

TEST_CASE("hyperbolic poincare pair") {
    Jet F(1, 2);
    F.set_coeff(MultiIndex{1}, -1.25); // nu = -2.5, a = 3, cosh(alpha/2) = 1.5
    DomainSpec spec = make_symmetric_domain(2, 1.0, F);
    OrbitData orbit = floquet_from_curvature(spec);
    auto ev = poincare_eigenvalues_numeric(spec);
    // real pair lambda, 1/lambda with lambda + 1/lambda = 2 cos... -> 2cosh(alpha)
    double tr = (ev[0] + ev[1]).real();
    CHECK(tr == doctest::Approx(2.0 * std::cosh(orbit.alpha[0])).epsilon(1e-5));
    CHECK(std::abs(ev[0] * ev[1] - 1.0) < 1e-8);
}

TEST_CASE("det(I - P^r) cross-check in d=2") {
    DomainSpec spec = verify::random_symmetric_domain(1234, 2, 2, 3);
    OrbitData orbit = floquet_from_curvature(spec);
    linalg::Matrix P = poincare_matrix_numeric(spec);
    for (int r = 1; r <= 3; ++r) {
        double predicted = 1.0;
        for (double a : orbit.alpha) predicted *= 2.0 - 2.0 * std::cos(r * a);
        CHECK(det_I_minus_Pr(P, r) == doctest::Approx(std::abs(predicted)).epsilon(1e-5));
    }
}

TEST_CASE("criticality of the bouncing-ball configuration") {
    DomainSpec spec = ellipse_like();
    CHECK(verify_critical_point(spec, 1) < 1e-10);
    DomainSpec spec2 = verify::random_symmetric_domain(77, 2, 2, 3);
    CHECK(verify_critical_point(spec2, 3) < 1e-10);

    // perturbed configuration has a visibly nonzero gradient
    std::vector<double> x(2 * 3 * spec2.d(), 0.0);
    x[0] = 0.05;
    CHECK(length_gradient_norm(spec2, 3, x) > 1e-4);
}
