#include "wavinv/stationary_phase.hpp"

#include "wavinv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

namespace wavinv {

// ---------------------------------------------------------------------------
// ComplexJet
// ---------------------------------------------------------------------------

ComplexJet cjet_add(const ComplexJet& a, const ComplexJet& b) { return {a.re + b.re, a.im + b.im}; }

ComplexJet cjet_mul(const ComplexJet& a, const ComplexJet& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

ComplexJet cjet_mul(const ComplexJet& a, const Jet& b) { return {a.re * b, a.im * b}; }

ComplexJet cjet_scale(const ComplexJet& a, cplx s) {
    return {a.re * s.real() - a.im * s.imag(), a.re * s.imag() + a.im * s.real()};
}

// ---------------------------------------------------------------------------
// PhaseData / AmplitudeData
// ---------------------------------------------------------------------------

namespace {

std::vector<std::vector<PhaseData::TensorEntry>> bucket_tensors(const Jet& phase) {
    std::vector<std::vector<PhaseData::TensorEntry>> buckets(phase.trunc() + 1);
    phase.for_each([&](const MultiIndex& gamma, double coeff) {
        int order = gamma.order();
        if (order < 3) return;
        PhaseData::TensorEntry e;
        e.value = gamma.factorial() * coeff;
        for (int i = 0; i < gamma.dim(); ++i)
            for (int k = 0; k < gamma[i]; ++k) e.vars.push_back(i);
        buckets[order].push_back(std::move(e));
    });
    return buckets;
}

} // namespace

const std::vector<PhaseData::TensorEntry>& PhaseData::tensors(int order) const {
    static const std::vector<TensorEntry> empty;
    if (order < 0 || order >= static_cast<int>(tensors_by_order.size())) return empty;
    return tensors_by_order[order];
}

PhaseData PhaseData::from_parts(const Jet& phase, linalg::Matrix inverse_hessian, int signature,
                                double sqrt_abs_det) {
    PhaseData pd;
    pd.n_vars = phase.dim();
    pd.critical_value = phase.constant_term();
    pd.inverse_hessian = std::move(inverse_hessian);
    pd.signature = signature;
    pd.sqrt_abs_det = sqrt_abs_det;
    pd.tensors_by_order = bucket_tensors(phase);
    return pd;
}

PhaseData PhaseData::from_jet(const Jet& phase) {
    int n = phase.dim();
    linalg::Matrix hess(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            MultiIndex idx = (i == j) ? MultiIndex::unit(n, i, 2)
                                      : MultiIndex::unit(n, i) + MultiIndex::unit(n, j);
            double v = phase.coeff(idx) * ((i == j) ? 2.0 : 1.0);
            hess(i, j) = v;
            hess(j, i) = v;
        }
    std::vector<double> eig = linalg::symmetric_eigenvalues(hess);
    int signature = 0;
    double logdet = 0.0;
    for (double e : eig) {
        if (std::abs(e) < 1e-12) throw NumericalError("PhaseData: degenerate critical point");
        signature += e > 0 ? 1 : -1;
        logdet += std::log(std::abs(e));
    }
    return from_parts(phase, linalg::inverse(std::move(hess)), signature, std::exp(0.5 * logdet));
}

AmplitudeData AmplitudeData::constant(int dim, int trunc, cplx value) {
    AmplitudeData amp;
    ComplexJet cj = ComplexJet::zero(dim, trunc);
    cj.re = Jet::constant(dim, trunc, value.real());
    cj.im = Jet::constant(dim, trunc, value.imag());
    amp.families.push_back(std::move(cj));
    return amp;
}

// ---------------------------------------------------------------------------
// Graph enumeration
// ---------------------------------------------------------------------------

int DiagramGraph::edges() const {
    int total = 0;
    int n = static_cast<int>(multiplicity.size());
    for (int u = 0; u < n; ++u)
        for (int v = u; v < n; ++v) total += multiplicity[u][v];
    return total;
}

int DiagramGraph::valency(int v) const {
    int n = static_cast<int>(multiplicity.size());
    int val = 2 * multiplicity[v][v];
    for (int u = 0; u < n; ++u)
        if (u != v) val += multiplicity[std::min(u, v)][std::max(u, v)];
    return val;
}

namespace {

using Flat = std::vector<int>;

Flat flatten(const std::vector<std::vector<int>>& m) {
    Flat f;
    int n = static_cast<int>(m.size());
    for (int u = 0; u < n; ++u)
        for (int v = u; v < n; ++v) f.push_back(m[u][v]);
    return f;
}

// Canonical form of an adjacency under permutations of the closed vertices
// (vertex 0, the open vertex, stays fixed).
Flat canonical_form(const std::vector<std::vector<int>>& m, int V) {
    std::vector<int> perm(V);
    for (int i = 0; i < V; ++i) perm[i] = i + 1;
    Flat best;
    do {
        std::vector<std::vector<int>> pm(V + 1, std::vector<int>(V + 1, 0));
        std::vector<int> map(V + 1);
        map[0] = 0;
        for (int i = 0; i < V; ++i) map[i + 1] = perm[i];
        for (int u = 0; u <= V; ++u)
            for (int v = u; v <= V; ++v) {
                int mu = map[u], mv = map[v];
                pm[std::min(mu, mv)][std::max(mu, mv)] = m[u][v];
            }
        Flat f = flatten(pm);
        if (best.empty() || f < best) best = f;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

long long count_automorphisms(const std::vector<std::vector<int>>& m, int V) {
    auto factorial = [](int n) {
        long long f = 1;
        for (int k = 2; k <= n; ++k) f *= k;
        return f;
    };
    // per-sigma half-edge symmetries: parallel-edge permutations and loop
    // permutations/flips have the same count for every adjacency-preserving sigma
    long long per_sigma = 1;
    for (int u = 0; u <= V; ++u) {
        per_sigma *= factorial(m[u][u]) * (1LL << m[u][u]);
        for (int v = u + 1; v <= V; ++v) per_sigma *= factorial(m[u][v]);
    }
    std::vector<int> perm(V);
    for (int i = 0; i < V; ++i) perm[i] = i + 1;
    long long sigma_count = 0;
    do {
        std::vector<int> map(V + 1);
        map[0] = 0;
        for (int i = 0; i < V; ++i) map[i + 1] = perm[i];
        bool ok = true;
        for (int u = 0; u <= V && ok; ++u)
            for (int v = u; v <= V && ok; ++v) {
                int mu = map[u], mv = map[v];
                if (m[u][v] != m[std::min(mu, mv)][std::max(mu, mv)]) ok = false;
            }
        if (ok) ++sigma_count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return sigma_count * per_sigma;
}

std::vector<DiagramGraph> build_graphs(int j) {
    std::vector<DiagramGraph> out;
    if (j == 0) {
        DiagramGraph g;
        g.closed_vertices = 0;
        g.multiplicity = {{0}};
        g.automorphisms = 1;
        out.push_back(std::move(g));
        return out;
    }
    for (int V = 0; V <= 2 * j; ++V) {
        int I = V + j;
        // cells ordered so that all cells touching vertex k are decided
        // before vertex k+1 appears: (0,0), (0,1),(1,1), (0,2),(1,2),(2,2), ...
        std::vector<std::pair<int, int>> cells;
        for (int v = 0; v <= V; ++v)
            for (int u = 0; u <= v; ++u) cells.emplace_back(u, v);
        std::set<Flat> seen;
        std::vector<std::vector<int>> m(V + 1, std::vector<int>(V + 1, 0));
        std::function<void(int, int)> rec = [&](int cell, int remaining) {
            if (cell == static_cast<int>(cells.size())) {
                if (remaining != 0) return;
                DiagramGraph g;
                g.closed_vertices = V;
                g.multiplicity = m;
                for (int v = 1; v <= V; ++v)
                    if (g.valency(v) < 3) return;
                Flat canon = canonical_form(m, V);
                if (seen.insert(canon).second) {
                    g.automorphisms = count_automorphisms(m, V);
                    out.push_back(std::move(g));
                }
                return;
            }
            auto [u, v] = cells[cell];
            bool group_done = (u == v); // all cells with max vertex <= v decided
            for (int mult = 0; mult <= remaining; ++mult) {
                m[u][v] = m[v][u] = mult;
                int rem = remaining - mult;
                if (group_done) {
                    // closed vertices still below valency 3 need ends from
                    // future edges; each future edge supplies at most two
                    int needed = 3 * (V - v);
                    for (int w = 1; w <= v; ++w) {
                        int val = 2 * m[w][w];
                        for (int x = 0; x <= V; ++x)
                            if (x != w) val += m[std::min(x, w)][std::max(x, w)];
                        needed += std::max(0, 3 - val);
                    }
                    if (2 * rem < needed) continue;
                }
                rec(cell + 1, rem);
            }
            m[u][v] = m[v][u] = 0;
        };
        rec(0, I);
    }
    return out;
}

} // namespace

const std::vector<DiagramGraph>& enumerate_graphs(int j) {
    if (j < 0) throw std::invalid_argument("enumerate_graphs: negative order");
    static std::mutex mtx;
    static std::map<int, std::vector<DiagramGraph>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(j);
    if (it == cache.end()) it = cache.emplace(j, build_graphs(j)).first;
    return it->second;
}

// ---------------------------------------------------------------------------
// Labeling sums
// ---------------------------------------------------------------------------

namespace {

struct HalfEdge {
    int vertex, slot;
};

struct Wiring {
    std::vector<std::pair<HalfEdge, HalfEdge>> edges;
    std::vector<int> valency; // per vertex (0 = open)
};

Wiring wire(const DiagramGraph& g) {
    Wiring w;
    int n = g.closed_vertices + 1;
    w.valency.resize(n);
    std::vector<int> next_slot(n, 0);
    for (int v = 0; v < n; ++v) w.valency[v] = g.valency(v);
    for (int u = 0; u < n; ++u) {
        for (int rep = 0; rep < g.multiplicity[u][u]; ++rep) {
            HalfEdge a{u, next_slot[u]++};
            HalfEdge b{u, next_slot[u]++};
            w.edges.push_back({a, b});
        }
        for (int v = u + 1; v < n; ++v)
            for (int rep = 0; rep < g.multiplicity[u][v]; ++rep) {
                HalfEdge a{u, next_slot[u]++};
                HalfEdge b{v, next_slot[v]++};
                w.edges.push_back({a, b});
            }
    }
    return w;
}

// Amplitude derivative tensor entries of a fixed order.
std::vector<std::pair<std::vector<int>, cplx>> amp_entries(const ComplexJet& amp, int order) {
    std::map<std::vector<int>, cplx> acc;
    auto visit = [&](const Jet& part, bool imag) {
        part.for_each([&](const MultiIndex& gamma, double coeff) {
            if (gamma.order() != order) return;
            std::vector<int> vars;
            for (int i = 0; i < gamma.dim(); ++i)
                for (int k = 0; k < gamma[i]; ++k) vars.push_back(i);
            cplx v = gamma.factorial() * coeff * (imag ? cplx(0, 1) : cplx(1, 0));
            acc[vars] += v;
        });
    };
    visit(amp.re, false);
    visit(amp.im, true);
    return {acc.begin(), acc.end()};
}

} // namespace

cplx feynman_graph_sum(const PhaseData& phase, const ComplexJet& amp, const DiagramGraph& g) {
    int V = g.closed_vertices;
    Wiring w = wire(g);
    int I = g.edges();

    if (g.empty()) return amp.value_at_zero();

    // candidate tensor entries per vertex
    std::vector<std::pair<std::vector<int>, cplx>> open_entries = amp_entries(amp, w.valency[0]);
    if (w.valency[0] == 0) open_entries = {{{}, amp.value_at_zero()}};
    if (open_entries.empty()) return 0.0;
    for (int v = 1; v <= V; ++v)
        if (phase.tensors(w.valency[v]).empty()) return 0.0;

    // i^{I+V}
    cplx i_pow = 1.0;
    for (int k = 0; k < I + V; ++k) i_pow *= cplx(0, 1);

    const linalg::Matrix& h = phase.inverse_hessian;
    // assignment[v] = variable ids at the slots of vertex v
    std::vector<std::vector<int>> assignment(V + 1);
    // edges grouped by the vertex at which they become fully assigned
    std::vector<std::vector<std::pair<HalfEdge, HalfEdge>>> edges_ready(V + 1);
    for (const auto& e : w.edges) edges_ready[std::max(e.first.vertex, e.second.vertex)].push_back(e);

    cplx total = 0.0;

    // DFS over vertices 0..V; at each vertex iterate tensor entries and the
    // distinct permutations of their variable multisets.
    std::function<void(int, cplx)> dfs = [&](int v, cplx partial) {
        if (v > V) {
            total += partial;
            return;
        }
        auto process_arrangements = [&](std::vector<int> vars, cplx weight) {
            std::sort(vars.begin(), vars.end());
            do {
                assignment[v] = vars;
                double edge_factor = 1.0;
                for (const auto& e : edges_ready[v]) {
                    int a = assignment[e.first.vertex][e.first.slot];
                    int b = assignment[e.second.vertex][e.second.slot];
                    edge_factor *= h(a, b);
                    if (edge_factor == 0.0) break;
                }
                if (edge_factor != 0.0) dfs(v + 1, partial * weight * edge_factor);
            } while (std::next_permutation(vars.begin(), vars.end()));
        };
        if (v == 0) {
            for (const auto& [vars, value] : open_entries) {
                if (value == 0.0) continue;
                process_arrangements(vars, value);
            }
        } else {
            for (const auto& entry : phase.tensors(w.valency[v])) {
                if (entry.value == 0.0) continue;
                process_arrangements(entry.vars, entry.value);
            }
        }
    };
    dfs(0, 1.0);
    return total * i_pow / static_cast<double>(g.automorphisms);
}

cplx feynman_sum(const PhaseData& phase, const AmplitudeData& amp, int j) {
    cplx total = 0.0;
    for (int m = 0; m <= j && m < static_cast<int>(amp.families.size()); ++m) {
        const ComplexJet& family = amp.families[m];
        for (const DiagramGraph& g : enumerate_graphs(j - m)) total += feynman_graph_sum(phase, family, g);
    }
    return total;
}

SPExpansion sp_expand(const PhaseData& phase, const AmplitudeData& amp, int J) {
    SPExpansion e;
    e.critical_value = phase.critical_value;
    e.signature = phase.signature;
    e.sqrt_abs_det = phase.sqrt_abs_det;
    e.n_vars = phase.n_vars;
    e.coeffs.resize(J + 1);
    for (int j = 0; j <= J; ++j) e.coeffs[j] = feynman_sum(phase, amp, j);
    return e;
}

cplx sp_prefactor(const SPExpansion& e, double k) {
    double amp = std::pow(2.0 * std::numbers::pi / k, 0.5 * e.n_vars) / e.sqrt_abs_det;
    double phase = k * e.critical_value + 0.25 * std::numbers::pi * e.signature;
    return amp * cplx(std::cos(phase), std::sin(phase));
}

// ---------------------------------------------------------------------------
// Oscillatory oracle
// ---------------------------------------------------------------------------

double cutoff_profile(double t, double flat_fraction, int cutoff_power) {
    if (cutoff_power <= 0) return 1.0; // hard window
    double s = std::abs(t) / flat_fraction;
    return std::exp(-std::pow(s, cutoff_power));
}

namespace {

cplx integrate_one_k(int n_vars, const std::function<cplx(const double*, double)>& integrand,
                     const std::vector<double>& half_width, double k, int nodes, double flat,
                     int cutoff_power) {
    const auto& quad = linalg::gauss_legendre(nodes);
    // per-dimension scaled nodes, weights, cutoff values
    std::vector<std::vector<double>> xs(n_vars), ws(n_vars), bs(n_vars);
    for (int d = 0; d < n_vars; ++d) {
        xs[d].resize(nodes);
        ws[d].resize(nodes);
        bs[d].resize(nodes);
        for (int i = 0; i < nodes; ++i) {
            xs[d][i] = quad.nodes[i] * half_width[d];
            ws[d][i] = quad.weights[i] * half_width[d];
            bs[d][i] = cutoff_profile(quad.nodes[i], flat, cutoff_power);
        }
    }
    std::vector<int> idx(n_vars, 0);
    std::vector<double> x(n_vars);
    cplx sum = 0.0;
    bool done = false;
    while (!done) {
        double wb = 1.0;
        for (int d = 0; d < n_vars; ++d) {
            x[d] = xs[d][idx[d]];
            wb *= ws[d][idx[d]] * bs[d][idx[d]];
        }
        if (wb != 0.0) sum += wb * integrand(x.data(), k);
        int d = n_vars - 1;
        while (d >= 0) {
            if (++idx[d] < nodes) break;
            idx[d] = 0;
            --d;
        }
        done = d < 0;
    }
    return sum;
}

} // namespace

InverseKFit fit_inverse_k(const std::vector<double>& k_grid, const std::vector<cplx>& values, int degree) {
    // Fit in t = 1/k.  A monomial Vandermonde at degree ~8 loses several
    // digits in the low-order coefficients, so the least squares runs in a
    // Chebyshev basis on the t-range and is converted to monomials after.
    int nk = static_cast<int>(k_grid.size());
    int ncoef = degree + 1;
    double tmin = 1.0 / k_grid.front(), tmax = tmin;
    for (double k : k_grid) {
        tmin = std::min(tmin, 1.0 / k);
        tmax = std::max(tmax, 1.0 / k);
    }
    double center = 0.5 * (tmin + tmax), half = 0.5 * (tmax - tmin);

    linalg::Matrix a(nk, ncoef);
    std::vector<double> bre(nk), bim(nk);
    for (int i = 0; i < nk; ++i) {
        double u = (1.0 / k_grid[i] - center) / half;
        double t0 = 1.0, t1 = u;
        for (int j = 0; j < ncoef; ++j) {
            double tj = (j == 0) ? 1.0 : (j == 1 ? u : 2.0 * u * t1 - t0);
            if (j >= 2) {
                t0 = t1;
                t1 = tj;
            }
            a(i, j) = tj;
        }
        bre[i] = values[i].real();
        bim[i] = values[i].imag();
    }
    auto sol_re = linalg::least_squares(a, bre);
    auto sol_im = linalg::least_squares(a, bim);

    // Chebyshev -> monomial in u (T_{n+1} = 2u T_n - T_{n-1})
    std::vector<std::vector<double>> cheb(ncoef);
    cheb[0] = {1.0};
    if (ncoef > 1) cheb[1] = {0.0, 1.0};
    for (int n = 2; n < ncoef; ++n) {
        cheb[n].assign(n + 1, 0.0);
        for (int i = 0; i <= n - 1; ++i) cheb[n][i + 1] += 2.0 * cheb[n - 1][i];
        for (int i = 0; i <= n - 2; ++i) cheb[n][i] -= cheb[n - 2][i];
    }
    std::vector<cplx> mono_u(ncoef, 0.0);
    for (int n = 0; n < ncoef; ++n) {
        cplx c(sol_re.x[n], sol_im.x[n]);
        for (int i = 0; i <= n; ++i) mono_u[i] += c * cheb[n][i];
    }
    // substitute u = (t - center)/half: monomials in t via binomial expansion
    std::vector<cplx> mono_t(ncoef, 0.0);
    for (int j = 0; j < ncoef; ++j) {
        if (mono_u[j] == 0.0) continue;
        // ((t - center)/half)^j
        double binom = 1.0;
        for (int i = 0; i <= j; ++i) {
            if (i > 0) binom = binom * (j - i + 1) / i;
            mono_t[i] += mono_u[j] * binom * std::pow(1.0 / half, i) * std::pow(-center / half, j - i);
        }
    }
    InverseKFit fit;
    fit.coeffs = mono_t; // coefficient of t^j = c_j (t = 1/k)
    double vmax = 0.0;
    for (const cplx& v : values) vmax = std::max(vmax, std::abs(v));
    for (int i = 0; i < nk; ++i) {
        cplx predicted = 0.0;
        double u = (1.0 / k_grid[i] - center) / half;
        double t0 = 1.0, t1 = u;
        for (int j = 0; j < ncoef; ++j) {
            double tj = (j == 0) ? 1.0 : (j == 1 ? u : 2.0 * u * t1 - t0);
            if (j >= 2) {
                t0 = t1;
                t1 = tj;
            }
            predicted += cplx(sol_re.x[j], sol_im.x[j]) * tj;
        }
        fit.residual = std::max(fit.residual, std::abs(predicted - values[i]) / std::max(vmax, 1e-300));
    }
    return fit;
}

OracleResult oscillatory_oracle(int n_vars, const std::function<cplx(const double*, double)>& integrand,
                                const SPExpansion& prefactor_record, const std::vector<double>& half_width,
                                const OracleOptions& opts) {
    if (opts.k_grid.empty()) throw std::invalid_argument("oscillatory_oracle: empty k grid");
    int nk = static_cast<int>(opts.k_grid.size());
    std::vector<cplx> values(nk);

    int nthreads = opts.threads > 0 ? opts.threads : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min(nthreads, nk));
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= nk) return;
            try {
                double k = opts.k_grid[i];
                cplx raw = integrate_one_k(n_vars, integrand, half_width, k, opts.nodes_per_dim,
                                           opts.flat_fraction, opts.cutoff_power);
                values[i] = raw / sp_prefactor(prefactor_record, k) * std::pow(k, opts.k_power_offset);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    InverseKFit fit = fit_inverse_k(opts.k_grid, values, opts.fit_degree);
    OracleResult res;
    res.normalized = values;
    res.coeffs = fit.coeffs;
    res.fit_residual = fit.residual;
    if (res.fit_residual > opts.residual_threshold)
        throw NumericalError("oscillatory_oracle: fit residual " + std::to_string(res.fit_residual) +
                             " exceeds threshold (insufficient k range or quadrature nodes)");
    return res;
}

} // namespace wavinv
