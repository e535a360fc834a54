#include "wavinv/stationary_phase.hpp"

#include "wavinv/errors.hpp"

#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>

using namespace wavinv;

namespace {

// Independent brute-force multigraph generator: plain bounded recursion over
// the multiplicity cells, no pruning, canonicalized by explicit permutation.
int brute_force_class_count(int j) {
    if (j == 0) return 1;
    std::set<std::vector<int>> classes;
    for (int V = 0; V <= 2 * j; ++V) {
        int I = V + j;
        int cells = (V + 1) * (V + 2) / 2;
        std::vector<int> mult(cells, 0);
        std::function<void(int, int)> rec = [&](int cell, int rem) {
            if (cell == cells) {
                if (rem != 0) return;
                auto at = [&](int u, int v) {
                    if (u > v) std::swap(u, v);
                    // cell index of (u, v), u <= v, ordered by v then u
                    return v * (v + 1) / 2 + u;
                };
                for (int v = 1; v <= V; ++v) {
                    int val = 2 * mult[at(v, v)];
                    for (int u = 0; u <= V; ++u)
                        if (u != v) val += mult[at(u, v)];
                    if (val < 3) return;
                }
                // canonical form under closed-vertex permutations
                std::vector<int> perm(V);
                for (int i = 0; i < V; ++i) perm[i] = i + 1;
                std::vector<int> best;
                do {
                    std::vector<int> mapped(cells);
                    std::vector<int> map(V + 1);
                    map[0] = 0;
                    for (int i = 0; i < V; ++i) map[i + 1] = perm[i];
                    for (int v = 0; v <= V; ++v)
                        for (int u = 0; u <= v; ++u) {
                            int mu = std::min(map[u], map[v]), mv = std::max(map[u], map[v]);
                            mapped[mv * (mv + 1) / 2 + mu] = mult[at(u, v)];
                        }
                    if (best.empty() || mapped < best) best = mapped;
                } while (std::next_permutation(perm.begin(), perm.end()));
                best.push_back(V);
                classes.insert(best);
                return;
            }
            for (int m = 0; m <= rem; ++m) {
                mult[cell] = m;
                rec(cell + 1, rem - m);
            }
            mult[cell] = 0;
        };
        rec(0, I);
    }
    return static_cast<int>(classes.size());
}

PhaseData quartic_phase() {
    Jet S(1, 8);
    S.set_coeff(MultiIndex{2}, 0.5);
    S.set_coeff(MultiIndex{4}, 1.0);
    return PhaseData::from_jet(S);
}

// Brute-force Wick (Isserlis) oracle: expand a * exp(ik R) in moments of
// the formal Gaussian with covariance (i/k) h^{ab}.  Independent of graph
// enumeration and automorphism counting.
using Poly = std::map<std::vector<int>, double>;

Poly poly_mul_capped(const Poly& a, const Poly& b, int maxdeg) {
    Poly out;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            int deg = 0;
            for (std::size_t i = 0; i < e.size(); ++i) {
                e[i] = ea[i] + eb[i];
                deg += e[i];
            }
            if (deg > maxdeg) continue;
            out[e] += ca * cb;
        }
    return out;
}

cplx isserlis(std::vector<int> letters, const linalg::Matrix& h) {
    if (letters.empty()) return 1.0;
    if (letters.size() % 2) return 0.0;
    int a = letters[0];
    cplx sum = 0.0;
    for (std::size_t i = 1; i < letters.size(); ++i) {
        std::vector<int> rest;
        for (std::size_t j = 1; j < letters.size(); ++j)
            if (j != i) rest.push_back(letters[j]);
        sum += h(a, letters[i]) * isserlis(std::move(rest), h);
    }
    return sum;
}

cplx wick_cj(const Jet& S, const Poly& amp, int j) {
    PhaseData pd = PhaseData::from_jet(S);
    int N = S.dim();
    Poly R;
    S.for_each([&](const MultiIndex& g, double c) {
        if (g.order() >= 3) R[g.entries()] = c;
    });
    cplx total = 0.0;
    int maxdeg = 2 * (2 * j + j);
    Poly Rm;
    Rm[std::vector<int>(N, 0)] = 1.0;
    double factorial = 1.0;
    for (int m = 0; m <= 2 * j; ++m) {
        if (m > 0) {
            Rm = poly_mul_capped(Rm, R, maxdeg);
            factorial *= m;
        }
        Poly term = poly_mul_capped(Rm, amp, maxdeg);
        for (const auto& [e, c] : term) {
            int deg = 0;
            for (int x : e) deg += x;
            if (deg != 2 * (m + j)) continue; // k-power m - deg/2 must equal -j
            std::vector<int> letters;
            for (int v = 0; v < N; ++v)
                for (int rep = 0; rep < e[v]; ++rep) letters.push_back(v);
            cplx pairs = isserlis(letters, pd.inverse_hessian);
            cplx ipow = 1.0;
            for (int t = 0; t < m + deg / 2; ++t) ipow *= cplx(0, 1); // (ik)^m (i/k)^{deg/2}
            total += (c / factorial) * ipow * pairs;
        }
    }
    return total;
}

} // namespace

TEST_CASE("graph enumeration: j=0 and j=1 classes") {
    const auto& g0 = enumerate_graphs(0);
    REQUIRE(g0.size() == 1);
    CHECK(g0[0].empty());

    // j=1: open loop, two-loops vertex, loop+leg, theta, dumbbell
    const auto& g1 = enumerate_graphs(1);
    CHECK(g1.size() == 5);
    std::multiset<long long> autos;
    for (const auto& g : g1) autos.insert(g.automorphisms);
    // S(Gamma): open loop 2, two-loop vertex 8, loop+leg 2, theta 12, dumbbell 8
    CHECK(autos == std::multiset<long long>({2, 2, 8, 8, 12}));
    for (const auto& g : g1) {
        CHECK(g.euler_characteristic() == -1);
        for (int v = 1; v <= g.closed_vertices; ++v) CHECK(g.valency(v) >= 3);
    }
}

TEST_CASE("graph enumeration matches the independent brute-force generator") {
    for (int j = 0; j <= 2; ++j) CHECK(static_cast<int>(enumerate_graphs(j).size()) == brute_force_class_count(j));
}

TEST_CASE("pure gaussian: c_0 = 1, higher orders vanish") {
    Jet S(1, 6);
    S.set_coeff(MultiIndex{2}, 0.5);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(1, 4, 1.0);
    SPExpansion e = sp_expand(pd, amp, 2);
    CHECK(std::abs(e.coeffs[0] - 1.0) < 1e-14);
    CHECK(std::abs(e.coeffs[1]) < 1e-14);
    CHECK(std::abs(e.coeffs[2]) < 1e-14);
    CHECK(e.signature == 1);
    CHECK(e.sqrt_abs_det == doctest::Approx(1.0));
}

TEST_CASE("quartic benchmark: c_1 = -3i, c_2 = -105/2") {
    PhaseData pd = quartic_phase();
    AmplitudeData amp = AmplitudeData::constant(1, 6, 1.0);
    SPExpansion e = sp_expand(pd, amp, 2);
    CHECK(std::abs(e.coeffs[0] - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(e.coeffs[1] - cplx(0, -3)) < 1e-13);
    CHECK(std::abs(e.coeffs[2] - cplx(-52.5, 0)) < 1e-12);
}

TEST_CASE("cubic phase: theta and dumbbell sum to 15i/2") {
    Jet S(1, 8);
    S.set_coeff(MultiIndex{2}, 0.5);
    S.set_coeff(MultiIndex{3}, 1.0);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(1, 6, 1.0);
    SPExpansion e = sp_expand(pd, amp, 1);
    // Wick: (ik)^2/2 x^6 moment = 15 i / (2k)
    CHECK(std::abs(e.coeffs[1] - cplx(0, 7.5)) < 1e-13);
}

TEST_CASE("open vertex conventions: amplitude derivatives without i") {
    // S = x^2/2, a = 1 + x^2 + x^4: Z_A = 1 + i/k - 3/k^2
    Jet S(1, 6);
    S.set_coeff(MultiIndex{2}, 0.5);
    PhaseData pd = PhaseData::from_jet(S);
    Jet a(1, 4);
    a.set_coeff(MultiIndex{0}, 1.0);
    a.set_coeff(MultiIndex{2}, 1.0);
    a.set_coeff(MultiIndex{4}, 1.0);
    AmplitudeData amp;
    amp.families.push_back(ComplexJet::from_real(a));
    SPExpansion e = sp_expand(pd, amp, 2);
    CHECK(std::abs(e.coeffs[0] - cplx(1, 0)) < 1e-14);
    CHECK(std::abs(e.coeffs[1] - cplx(0, 1)) < 1e-13);
    CHECK(std::abs(e.coeffs[2] - cplx(-3, 0)) < 1e-13);

    // S = x^2/2 + x^3, a = x: c_1 = -3i (loop+leg diagram only)
    Jet S3(1, 8);
    S3.set_coeff(MultiIndex{2}, 0.5);
    S3.set_coeff(MultiIndex{3}, 1.0);
    PhaseData pd3 = PhaseData::from_jet(S3);
    Jet ax(1, 6);
    ax.set_coeff(MultiIndex{1}, 1.0);
    AmplitudeData ampx;
    ampx.families.push_back(ComplexJet::from_real(ax));
    SPExpansion e3 = sp_expand(pd3, ampx, 1);
    CHECK(std::abs(e3.coeffs[0]) < 1e-14); // a(0) = 0
    CHECK(std::abs(e3.coeffs[1] - cplx(0, -3)) < 1e-13);
}

TEST_CASE("amplitude family linearity in k powers") {
    PhaseData pd = quartic_phase();
    Jet a0(1, 6), a1(1, 6);
    a0.set_coeff(MultiIndex{0}, 1.0);
    a1.set_coeff(MultiIndex{0}, 2.0);
    AmplitudeData fam;
    fam.families.push_back(ComplexJet::from_real(a0));
    fam.families.push_back(ComplexJet::from_real(a1));
    // c_j(family) = c_j(A_0) + c_{j-1}(A_1)
    AmplitudeData only0;
    only0.families.push_back(ComplexJet::from_real(a0));
    AmplitudeData only1;
    only1.families.push_back(ComplexJet::from_real(a1));
    for (int j = 0; j <= 2; ++j) {
        cplx got = feynman_sum(pd, fam, j);
        cplx want = feynman_sum(pd, only0, j);
        if (j >= 1) {
            AmplitudeData shifted;
            shifted.families.push_back(ComplexJet::from_real(a1));
            want += feynman_sum(pd, shifted, j - 1);
        }
        CHECK(std::abs(got - want) < 1e-13);
    }
}

TEST_CASE("separable 2D phase: inert sector does not change c_1") {
    Jet S(2, 8);
    S.set_coeff(MultiIndex{2, 0}, 0.5);
    S.set_coeff(MultiIndex{0, 2}, 0.5);
    S.set_coeff(MultiIndex{4, 0}, 1.0);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(2, 6, 1.0);
    SPExpansion e = sp_expand(pd, amp, 1);
    CHECK(std::abs(e.coeffs[1] - cplx(0, -3)) < 1e-12);
}

TEST_CASE("affine linearity in a single top phase tensor") {
    // at fixed j, c_j is affine-linear in the order-(2j+2) coefficient
    auto cj_with_quartic = [&](double q) {
        Jet S(1, 8);
        S.set_coeff(MultiIndex{2}, 0.5);
        S.set_coeff(MultiIndex{3}, 0.4);
        S.set_coeff(MultiIndex{4}, q);
        PhaseData pd = PhaseData::from_jet(S);
        AmplitudeData amp = AmplitudeData::constant(1, 6, 1.0);
        return sp_expand(pd, amp, 1).coeffs[1];
    };
    cplx f0 = cj_with_quartic(0.0), f1 = cj_with_quartic(0.5), f2 = cj_with_quartic(1.0);
    CHECK(std::abs(f2 - 2.0 * f1 + f0) < 1e-13);
}

TEST_CASE("engine matches the Wick/Isserlis oracle on coupled phases") {
    // N=3 with a genuine triple coupling; exercises multi-vertex labelings
    // with a dense inverse Hessian
    Jet S(3, 8);
    S.set_coeff(MultiIndex{2, 0, 0}, 0.5);
    S.set_coeff(MultiIndex{0, 2, 0}, 0.6);
    S.set_coeff(MultiIndex{0, 0, 2}, -0.45);
    S.set_coeff(MultiIndex{1, 1, 1}, 0.12);
    S.set_coeff(MultiIndex{3, 0, 0}, 0.08);
    S.set_coeff(MultiIndex{0, 4, 0}, 0.08);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(3, 6, 1.0);
    SPExpansion e = sp_expand(pd, amp, 2);
    Poly one = {{{0, 0, 0}, 1.0}};
    for (int j = 0; j <= 2; ++j) CHECK(std::abs(e.coeffs[j] - wick_cj(S, one, j)) < 1e-12);

    // N=2 with a polynomial amplitude and a k^{-1} family member
    Jet S2(2, 8);
    S2.set_coeff(MultiIndex{2, 0}, 0.5);
    S2.set_coeff(MultiIndex{0, 2}, 0.65);
    S2.set_coeff(MultiIndex{2, 1}, 0.2);
    S2.set_coeff(MultiIndex{1, 3}, 0.1);
    S2.set_coeff(MultiIndex{4, 0}, 0.12);
    Jet a0(2, 6);
    a0.set_coeff(MultiIndex{0, 0}, 1.0);
    a0.set_coeff(MultiIndex{1, 1}, 0.3);
    Jet a1(2, 6);
    a1.set_coeff(MultiIndex{0, 0}, 0.4);
    a1.set_coeff(MultiIndex{2, 0}, 0.2);
    AmplitudeData fam;
    fam.families.push_back(ComplexJet::from_real(a0));
    fam.families.push_back(ComplexJet::from_real(a1));
    SPExpansion e2 = sp_expand(PhaseData::from_jet(S2), fam, 2);
    Poly p0 = {{{0, 0}, 1.0}, {{1, 1}, 0.3}};
    Poly p1 = {{{0, 0}, 0.4}, {{2, 0}, 0.2}};
    for (int j = 0; j <= 2; ++j) {
        cplx w = wick_cj(S2, p0, j);
        if (j >= 1) w += wick_cj(S2, p1, j - 1);
        CHECK(std::abs(e2.coeffs[j] - w) < 1e-12);
    }
}

TEST_CASE("oscillatory oracle on the pure gaussian") {
    Jet S(1, 6);
    S.set_coeff(MultiIndex{2}, 0.5);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(1, 4, 1.0);
    SPExpansion e = sp_expand(pd, amp, 2);
    auto integrand = [](const double* x, double k) {
        double s = 0.5 * x[0] * x[0];
        return cplx(std::cos(k * s), std::sin(k * s));
    };
    OracleOptions opts;
    for (int i = 0; i < 14; ++i) {
        double t = 0.5 * (1.0 / 1500 + 1.0 / 250) + 0.5 * (1.0 / 250 - 1.0 / 1500) * std::cos(std::numbers::pi * i / 13.0);
        opts.k_grid.push_back(1.0 / t);
    }
    opts.nodes_per_dim = 1000;
    // a pure gaussian has no genuine tail, so degree 5 covers the cutoff's
    // k^-4 correction and leaves c_1 well determined
    opts.fit_degree = 5;
    OracleResult res = oscillatory_oracle(1, integrand, e, {0.9}, opts);
    CHECK(std::abs(res.coeffs[0] - 1.0) < 1e-6);
    CHECK(std::abs(res.coeffs[1]) < 1e-4);
}

TEST_CASE("sharp cutoff breaks the fit (smooth cutoff is mandatory)") {
    // cutoff_power = 0 is a hard box window; its boundary terms decay only
    // like 1/k and oscillate, so the 1/k fit residual blows up
    Jet S(1, 6);
    S.set_coeff(MultiIndex{2}, 0.5);
    PhaseData pd = PhaseData::from_jet(S);
    AmplitudeData amp = AmplitudeData::constant(1, 4, 1.0);
    SPExpansion e = sp_expand(pd, amp, 2);
    auto integrand = [](const double* x, double k) {
        double s = 0.5 * x[0] * x[0];
        return cplx(std::cos(k * s), std::sin(k * s));
    };
    OracleOptions opts;
    for (int i = 0; i < 14; ++i) {
        double t = 0.5 * (1.0 / 1500 + 1.0 / 250) + 0.5 * (1.0 / 250 - 1.0 / 1500) * std::cos(std::numbers::pi * i / 13.0);
        opts.k_grid.push_back(1.0 / t);
    }
    opts.nodes_per_dim = 1000;
    opts.cutoff_power = 0;
    opts.residual_threshold = 1e-5;
    CHECK_THROWS_AS(oscillatory_oracle(1, integrand, e, {0.9}, opts), NumericalError);
}
