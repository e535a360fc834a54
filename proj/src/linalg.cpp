#include "wavinv/linalg.hpp"

#include "wavinv/errors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <map>

namespace wavinv::linalg {

Matrix Matrix::identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::operator*(const Matrix& other) const {
    Matrix out(rows_, other.cols_);
    for (int r = 0; r < rows_; ++r)
        for (int k = 0; k < cols_; ++k) {
            double a = (*this)(r, k);
            if (a == 0.0) continue;
            for (int c = 0; c < other.cols_; ++c) out(r, c) += a * other(k, c);
        }
    return out;
}

Matrix Matrix::operator-(const Matrix& other) const {
    Matrix out(*this);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out(r, c) -= other(r, c);
    return out;
}

Matrix Matrix::operator+(const Matrix& other) const {
    Matrix out(*this);
    for (int r = 0; r < rows_; ++r)
        for (int c = 0; c < cols_; ++c) out(r, c) += other(r, c);
    return out;
}

// ---------------------------------------------------------------------------
// LU
// ---------------------------------------------------------------------------

namespace {

// Returns the pivoted LU in place; perm_sign is the permutation signature.
void lu_decompose(Matrix& a, std::vector<int>& piv, int& perm_sign) {
    int n = a.rows();
    piv.resize(n);
    perm_sign = 1;
    for (int i = 0; i < n; ++i) piv[i] = i;
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a(k, k));
        for (int i = k + 1; i < n; ++i)
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                p = i;
            }
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(a(k, c), a(p, c));
            std::swap(piv[k], piv[p]);
            perm_sign = -perm_sign;
        }
        if (a(k, k) == 0.0) continue; // singular; determinant will be 0
        for (int i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            double m = a(i, k);
            if (m == 0.0) continue;
            for (int c = k + 1; c < n; ++c) a(i, c) -= m * a(k, c);
        }
    }
}

} // namespace

double determinant(Matrix a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("determinant: not square");
    std::vector<int> piv;
    int sign;
    lu_decompose(a, piv, sign);
    double det = sign;
    for (int i = 0; i < a.rows(); ++i) det *= a(i, i);
    return det;
}

std::vector<double> solve(Matrix a, std::vector<double> b) {
    int n = a.rows();
    std::vector<int> piv;
    int sign;
    lu_decompose(a, piv, sign);
    std::vector<double> x(n);
    for (int i = 0; i < n; ++i) x[i] = b[piv[i]];
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < i; ++k) x[i] -= a(i, k) * x[k];
    for (int i = n - 1; i >= 0; --i) {
        for (int k = i + 1; k < n; ++k) x[i] -= a(i, k) * x[k];
        if (a(i, i) == 0.0) throw NumericalError("solve: singular matrix");
        x[i] /= a(i, i);
    }
    return x;
}

Matrix inverse(Matrix a) {
    int n = a.rows();
    std::vector<int> piv;
    int sign;
    lu_decompose(a, piv, sign);
    Matrix inv(n, n);
    std::vector<double> x(n);
    for (int col = 0; col < n; ++col) {
        for (int i = 0; i < n; ++i) x[i] = (piv[i] == col) ? 1.0 : 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < i; ++k) x[i] -= a(i, k) * x[k];
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) x[i] -= a(i, k) * x[k];
            if (a(i, i) == 0.0) throw NumericalError("inverse: singular matrix");
            x[i] /= a(i, i);
        }
        for (int i = 0; i < n; ++i) inv(i, col) = x[i];
    }
    return inv;
}

Matrix matrix_power(const Matrix& a, int p) {
    Matrix result = Matrix::identity(a.rows());
    Matrix base = a;
    while (p > 0) {
        if (p & 1) result = result * base;
        base = base * base;
        p >>= 1;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Symmetric eigenvalues (cyclic Jacobi)
// ---------------------------------------------------------------------------

std::vector<double> symmetric_eigenvalues(Matrix a) {
    int n = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-26) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int k = 0; k < n; ++k) {
                    double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
    }
    std::vector<double> ev(n);
    for (int i = 0; i < n; ++i) ev[i] = a(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

// ---------------------------------------------------------------------------
// General eigenvalues via characteristic polynomial
// ---------------------------------------------------------------------------

std::vector<std::complex<double>> poly_roots(std::vector<std::complex<double>> c) {
    using cplx = std::complex<double>;
    int n = static_cast<int>(c.size()); // degree
    std::vector<cplx> z(n);
    // Aberth-style fixed starting points on a spiral
    double radius = 1.0;
    for (const auto& ci : c) radius = std::max(radius, std::abs(ci));
    radius = 1.0 + radius;
    for (int i = 0; i < n; ++i)
        z[i] = radius * std::polar(0.7, 2.0 * std::numbers::pi * i / n + 0.4);
    auto eval = [&](cplx x) {
        cplx v = 1.0;
        for (int k = n - 1; k >= 0; --k) v = v * x + c[k];
        return v;
    };
    for (int iter = 0; iter < 500; ++iter) {
        double moved = 0.0;
        for (int i = 0; i < n; ++i) {
            cplx num = eval(z[i]);
            cplx den = 1.0;
            for (int jx = 0; jx < n; ++jx)
                if (jx != i) den *= (z[i] - z[jx]);
            if (std::abs(den) < 1e-300) den = 1e-300;
            cplx delta = num / den;
            z[i] -= delta;
            moved = std::max(moved, std::abs(delta));
        }
        if (moved < 1e-14 * radius) break;
    }
    std::sort(z.begin(), z.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return z;
}

std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    int n = a.rows();
    // Leverrier-Faddeev: char poly lambda^n + c[n-1] lambda^(n-1) + ... + c[0]
    Matrix m = a;
    std::vector<double> coef(n);
    double cn = 1.0;
    Matrix id = Matrix::identity(n);
    Matrix b = a;
    for (int k = 1; k <= n; ++k) {
        double tr = 0.0;
        for (int i = 0; i < n; ++i) tr += b(i, i);
        double ck = -tr / k;
        coef[n - k] = ck;
        if (k < n) {
            Matrix shifted = b;
            for (int i = 0; i < n; ++i) shifted(i, i) += ck;
            b = a * shifted;
        }
    }
    (void)cn;
    (void)m;
    std::vector<std::complex<double>> c(coef.begin(), coef.end());
    return poly_roots(std::move(c));
}

// ---------------------------------------------------------------------------
// SVD (one-sided Jacobi) and least squares
// ---------------------------------------------------------------------------

namespace {

// One-sided Jacobi on columns of A (rows >= cols assumed after padding).
// Returns singular values descending, and optionally U (rows x cols) and V (cols x cols).
void jacobi_svd(Matrix a, std::vector<double>& sigma, Matrix* u_out, Matrix* v_out) {
    int m = a.rows(), n = a.cols();
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool converged = true;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                double app = 0, aqq = 0, apq = 0;
                for (int i = 0; i < m; ++i) {
                    app += a(i, p) * a(i, p);
                    aqq += a(i, q) * a(i, q);
                    apq += a(i, p) * a(i, q);
                }
                if (std::abs(apq) > 1e-15 * std::sqrt(app * aqq) + 1e-300) {
                    converged = false;
                    double tau = (aqq - app) / (2.0 * apq);
                    double t = (tau >= 0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                    double c = 1.0 / std::sqrt(1.0 + t * t), s = t * c;
                    for (int i = 0; i < m; ++i) {
                        double aip = a(i, p), aiq = a(i, q);
                        a(i, p) = c * aip - s * aiq;
                        a(i, q) = s * aip + c * aiq;
                    }
                    for (int i = 0; i < n; ++i) {
                        double vip = v(i, p), viq = v(i, q);
                        v(i, p) = c * vip - s * viq;
                        v(i, q) = s * vip + c * viq;
                    }
                }
            }
        if (converged) break;
    }
    sigma.assign(n, 0.0);
    for (int c = 0; c < n; ++c) {
        double norm = 0.0;
        for (int i = 0; i < m; ++i) norm += a(i, c) * a(i, c);
        sigma[c] = std::sqrt(norm);
    }
    if (u_out) {
        *u_out = Matrix(m, n);
        for (int c = 0; c < n; ++c) {
            double inv = sigma[c] > 0 ? 1.0 / sigma[c] : 0.0;
            for (int i = 0; i < m; ++i) (*u_out)(i, c) = a(i, c) * inv;
        }
    }
    if (v_out) *v_out = v;
}

} // namespace

std::vector<double> singular_values(const Matrix& a) {
    std::vector<double> s;
    jacobi_svd(a, s, nullptr, nullptr);
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
}

LeastSquaresResult least_squares(const Matrix& a, const std::vector<double>& b) {
    std::vector<double> sigma;
    Matrix u, v;
    jacobi_svd(a, sigma, &u, &v);
    int n = a.cols(), m = a.rows();
    double smax = 0.0;
    for (double s : sigma) smax = std::max(smax, s);
    double cutoff = smax * 1e-14;
    LeastSquaresResult res;
    res.x.assign(n, 0.0);
    for (int c = 0; c < n; ++c) {
        if (sigma[c] <= cutoff) continue;
        double utb = 0.0;
        for (int i = 0; i < m; ++i) utb += u(i, c) * b[i];
        double coef = utb / sigma[c];
        for (int i = 0; i < n; ++i) res.x[i] += v(i, c) * coef;
    }
    double smin = smax;
    for (double s : sigma) smin = std::min(smin, s);
    res.condition = smin > 0 ? smax / smin : std::numeric_limits<double>::infinity();
    double rn = 0.0;
    for (int i = 0; i < m; ++i) {
        double ri = -b[i];
        for (int c = 0; c < n; ++c) ri += a(i, c) * res.x[c];
        rn += ri * ri;
    }
    res.residual_norm = std::sqrt(rn);
    return res;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre
// ---------------------------------------------------------------------------

const Quadrature& gauss_legendre(int n) {
    static std::mutex mtx;
    static std::map<int, Quadrature> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    Quadrature q;
    q.nodes.resize(n);
    q.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        // Newton from the Chebyshev-like initial guess
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        q.nodes[i] = x;
        q.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    // ascending nodes
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return q.nodes[a] < q.nodes[b]; });
    Quadrature sorted;
    sorted.nodes.resize(n);
    sorted.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        sorted.nodes[i] = q.nodes[idx[i]];
        sorted.weights[i] = q.weights[idx[i]];
    }
    return cache.emplace(n, std::move(sorted)).first->second;
}

// ---------------------------------------------------------------------------
// Levenberg-Marquardt with box constraints
// ---------------------------------------------------------------------------

LevenbergMarquardtResult levenberg_marquardt(
    const std::function<std::vector<double>(const std::vector<double>&)>& f,
    std::vector<double> x, const std::vector<double>& lo, const std::vector<double>& hi,
    const LevenbergMarquardtOptions& opts) {
    int n = static_cast<int>(x.size());
    auto clampx = [&](std::vector<double>& v) {
        for (int i = 0; i < n; ++i) v[i] = std::clamp(v[i], lo[i], hi[i]);
    };
    clampx(x);
    std::vector<double> r = f(x);
    int m = static_cast<int>(r.size());
    auto norm2 = [](const std::vector<double>& v) {
        double s = 0;
        for (double e : v) s += e * e;
        return s;
    };
    double cost = norm2(r);
    double lambda = opts.lambda0;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        // numeric Jacobian
        Matrix jac(m, n);
        for (int c = 0; c < n; ++c) {
            double h = 1e-7 * std::max(1.0, std::abs(x[c]));
            std::vector<double> xp = x, xm = x;
            xp[c] = std::min(x[c] + h, hi[c]);
            xm[c] = std::max(x[c] - h, lo[c]);
            double denom = xp[c] - xm[c];
            if (denom == 0.0) continue;
            std::vector<double> rp = f(xp), rm = f(xm);
            for (int i = 0; i < m; ++i) jac(i, c) = (rp[i] - rm[i]) / denom;
        }
        Matrix jtj(n, n);
        std::vector<double> jtr(n, 0.0);
        for (int i = 0; i < m; ++i)
            for (int a = 0; a < n; ++a) {
                jtr[a] += jac(i, a) * r[i];
                for (int b = 0; b < n; ++b) jtj(a, b) += jac(i, a) * jac(i, b);
            }
        bool stepped = false;
        for (int attempt = 0; attempt < 12; ++attempt) {
            Matrix damped = jtj;
            for (int a = 0; a < n; ++a) damped(a, a) += lambda * (jtj(a, a) + 1e-12);
            std::vector<double> neg_jtr(n);
            for (int a = 0; a < n; ++a) neg_jtr[a] = -jtr[a];
            std::vector<double> step;
            try {
                step = solve(damped, neg_jtr);
            } catch (const NumericalError&) {
                lambda *= 10;
                continue;
            }
            std::vector<double> xnew = x;
            for (int a = 0; a < n; ++a) xnew[a] += step[a];
            clampx(xnew);
            std::vector<double> rnew = f(xnew);
            double cnew = norm2(rnew);
            if (cnew < cost) {
                double delta = cost - cnew;
                x = std::move(xnew);
                r = std::move(rnew);
                cost = cnew;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (delta < opts.tol * (1.0 + cost)) iter = opts.max_iterations;
                break;
            }
            lambda *= 10;
        }
        if (!stepped) break;
        if (cost < opts.tol * opts.tol) break;
    }
    LevenbergMarquardtResult out;
    out.x = std::move(x);
    out.rms = std::sqrt(cost / std::max(1, m));
    out.iterations = iter;
    return out;
}

} // namespace wavinv::linalg
