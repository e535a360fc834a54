#include "wavinv/linalg.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace wavinv::linalg;

TEST_CASE("determinant, inverse, solve") {
    Matrix a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = -2;
    a(1, 0) = -2;
    a(1, 1) = 1;
    CHECK(determinant(a) == doctest::Approx(-3.0));
    Matrix inv = inverse(a);
    CHECK(inv(0, 0) == doctest::Approx(-1.0 / 3.0));
    CHECK(inv(0, 1) == doctest::Approx(-2.0 / 3.0));
    Matrix id = a * inv;
    CHECK(id(0, 0) == doctest::Approx(1.0));
    CHECK(id(0, 1) == doctest::Approx(0.0));

    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int n : {3, 6, 10}) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = u(rng) + (i == j ? 2.0 : 0.0);
        Matrix mi = inverse(m);
        Matrix prod = m * mi;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) CHECK(prod(i, j) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
}

TEST_CASE("symmetric eigenvalues") {
    Matrix a(2, 2);
    a(0, 0) = 2;
    a(1, 1) = 2;
    a(0, 1) = a(1, 0) = 1;
    auto ev = symmetric_eigenvalues(a);
    CHECK(ev[0] == doctest::Approx(1.0));
    CHECK(ev[1] == doctest::Approx(3.0));
}

TEST_CASE("general eigenvalues: rotation block") {
    double theta = 2.0 * std::numbers::pi / 3.0;
    Matrix rot(2, 2);
    rot(0, 0) = std::cos(theta);
    rot(0, 1) = -std::sin(theta);
    rot(1, 0) = std::sin(theta);
    rot(1, 1) = std::cos(theta);
    auto ev = eigenvalues(rot);
    CHECK(std::abs(ev[0] - std::complex<double>(std::cos(theta), -std::sin(theta))) < 1e-10);
    CHECK(std::abs(ev[1] - std::complex<double>(std::cos(theta), std::sin(theta))) < 1e-10);
}

TEST_CASE("least squares with condition number") {
    // overdetermined consistent system
    Matrix a(4, 2);
    std::vector<double> b(4);
    for (int i = 0; i < 4; ++i) {
        double t = i;
        a(i, 0) = 1.0;
        a(i, 1) = t;
        b[i] = 0.5 + 2.0 * t;
    }
    auto ls = least_squares(a, b);
    CHECK(ls.x[0] == doctest::Approx(0.5));
    CHECK(ls.x[1] == doctest::Approx(2.0));
    CHECK(ls.residual_norm == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(ls.condition < 10.0);
}

TEST_CASE("gauss-legendre integrates polynomials exactly") {
    const auto& q = gauss_legendre(8);
    // int_{-1}^{1} x^8 dx = 2/9 needs n >= 5
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * std::pow(q.nodes[i], 8);
    CHECK(s == doctest::Approx(2.0 / 9.0).epsilon(1e-13));
}

TEST_CASE("levenberg-marquardt recovers parameters") {
    auto f = [](const std::vector<double>& x) {
        std::vector<double> r(5);
        for (int i = 0; i < 5; ++i) {
            double t = 0.5 * i;
            r[i] = x[0] * std::exp(x[1] * t) - 2.0 * std::exp(-0.7 * t);
        }
        return r;
    };
    auto res = levenberg_marquardt(f, {1.0, -0.1}, {0.0, -5.0}, {10.0, 0.0});
    CHECK(res.x[0] == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(res.x[1] == doctest::Approx(-0.7).epsilon(1e-6));
}

TEST_CASE("matrix power") {
    Matrix a(2, 2);
    a(0, 0) = 1;
    a(0, 1) = 1;
    a(1, 1) = 1;
    Matrix p = matrix_power(a, 5);
    CHECK(p(0, 1) == doctest::Approx(5.0));
}
