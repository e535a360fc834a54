#pragma once

// Small dense linear algebra used across the library: LU determinant and
// inverse, symmetric Jacobi eigenvalues, one-sided Jacobi SVD, least
// squares, polynomial roots (Durand-Kerner) for small nonsymmetric
// eigenproblems, Gauss-Legendre nodes, and a Levenberg-Marquardt driver.
// Everything is deterministic and sized for desk-scale matrices.

#include <complex>
#include <functional>
#include <vector>

namespace wavinv::linalg {

// Row-major dense matrix.
class Matrix {
  public:
    Matrix() = default;
    Matrix(int rows, int cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, fill) {}
    static Matrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    double& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double operator()(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const std::vector<double>& data() const { return data_; }

    Matrix transposed() const;
    Matrix operator*(const Matrix& other) const;
    Matrix operator-(const Matrix& other) const;
    Matrix operator+(const Matrix& other) const;

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

// LU with partial pivoting.
double determinant(Matrix a);
Matrix inverse(Matrix a);
std::vector<double> solve(Matrix a, std::vector<double> b);

// Matrix power (non-negative exponent).
Matrix matrix_power(const Matrix& a, int p);

// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(Matrix a);

// Eigenvalues of a general real matrix via the characteristic polynomial
// (Leverrier-Faddeev) and Durand-Kerner root finding.  Intended for n <= 8.
std::vector<std::complex<double>> eigenvalues(const Matrix& a);

// Roots of a monic polynomial with complex coefficients c[0] + c[1] z + ... + z^n.
std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> coeffs);

struct LeastSquaresResult {
    std::vector<double> x;
    double residual_norm = 0.0; // ||Ax - b||_2
    double condition = 0.0;     // sigma_max / sigma_min of A
};

// Least squares via singular value decomposition (one-sided Jacobi).
LeastSquaresResult least_squares(const Matrix& a, const std::vector<double>& b);

std::vector<double> singular_values(const Matrix& a);

// Gauss-Legendre nodes/weights on [-1, 1].
struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const Quadrature& gauss_legendre(int n); // cached, thread-safe

struct LevenbergMarquardtOptions {
    int max_iterations = 200;
    double tol = 1e-14;
    double lambda0 = 1e-3;
};

struct LevenbergMarquardtResult {
    std::vector<double> x;
    double rms = 0.0;
    int iterations = 0;
};

// Minimizes ||f(x)||^2 with box constraints, numeric Jacobian.
LevenbergMarquardtResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> x0, const std::vector<double>& lo, const std::vector<double>& hi,
    const LevenbergMarquardtOptions& opts = {});

} // namespace wavinv::linalg
