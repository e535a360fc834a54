#include "wavinv/inversion.hpp"

#include "wavinv/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

namespace wavinv {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double det_model(const std::vector<double>& alpha, int r) {
    double v = 1.0;
    for (double a : alpha) {
        double s = std::sin(0.5 * r * a);
        v *= 4.0 * s * s;
    }
    return v;
}

bool resonant(const std::vector<double>& alpha, int r) {
    for (double a : alpha) {
        double t = std::fmod(r * a, kTwoPi);
        double dist = std::min(std::abs(t), kTwoPi - std::abs(t));
        if (dist <= kDegeneracyTol) return true;
    }
    return false;
}

// Parallel map over an index range (results written by index); the first
// worker exception is rethrown on the calling thread after the join.
void parallel_for(int count, const std::function<void(int)>& fn) {
    int nthreads = std::max(1u, std::thread::hardware_concurrency());
    nthreads = std::min<int>(nthreads, count);
    if (nthreads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= count || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

// ---------------------------------------------------------------------------
// Floquet recovery
// ---------------------------------------------------------------------------

FloquetRecovery recover_floquet(const std::map<int, double>& det_values, int d, int r_max) {
    if (d > 3) throw SpecError("recover_floquet: d > 3 unsupported (search-space cap)");
    if (r_max < 2 * d + 2)
        throw InconsistentDataError("recover_floquet: table truncated; need det values for r = 1..2d+2");
    std::vector<int> rows;
    std::vector<double> vals;
    for (int r = 1; r <= r_max; ++r) {
        auto it = det_values.find(r);
        if (it == det_values.end()) continue;
        if (it->second <= 1e-12) {
            std::ostringstream msg;
            msg << "recover_floquet: vanishing determinant invariant at r=" << r
                << " (parabolic/resonant orbit, inconsistent with an all-elliptic orbit)";
            throw InconsistentDataError(msg.str());
        }
        rows.push_back(r);
        vals.push_back(it->second);
    }
    double scale = 0.0;
    for (double v : vals) scale = std::max(scale, std::abs(v));

    auto residual_fn = [&](const std::vector<double>& alpha) {
        std::vector<double> res(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) res[i] = (det_model(alpha, rows[i]) - vals[i]) / scale;
        return res;
    };

    // Multi-start over the canonical fold (0, pi)^d, alpha ascending.
    const double lo_b = 1e-4, hi_b = std::numbers::pi - 1e-6;
    std::vector<double> lo(d, lo_b), hi(d, hi_b);
    int grid = d == 1 ? 64 : (d == 2 ? 28 : 12);
    std::vector<std::vector<double>> starts;
    std::vector<int> idx(d, 0);
    for (;;) {
        std::vector<double> start(d);
        bool ascending = true;
        for (int i = 0; i < d; ++i) {
            start[i] = lo_b + (hi_b - lo_b) * (idx[i] + 0.5) / grid;
            if (i > 0 && start[i] < start[i - 1]) ascending = false;
        }
        if (ascending) starts.push_back(start);
        int p = d - 1;
        while (p >= 0 && ++idx[p] == grid) idx[p--] = 0;
        if (p < 0) break;
    }

    std::vector<linalg::LevenbergMarquardtResult> fits(starts.size());
    parallel_for(static_cast<int>(starts.size()), [&](int i) {
        linalg::LevenbergMarquardtOptions lm;
        lm.max_iterations = 120;
        fits[i] = linalg::levenberg_marquardt(residual_fn, starts[i], lo, hi, lm);
    });
    const linalg::LevenbergMarquardtResult* best = nullptr;
    for (const auto& f : fits)
        if (!best || f.rms < best->rms) best = &f;

    FloquetRecovery out;
    out.alpha = best->x;
    std::sort(out.alpha.begin(), out.alpha.end());
    out.residual = best->rms;
    if (out.residual > 1e-6)
        throw InconsistentDataError("recover_floquet: residual " + std::to_string(out.residual) +
                                    " above 1e-6; data inconsistent with an all-elliptic orbit");
    return out;
}

double curvature_from_alpha(double alpha, double L, bool hyperbolic) {
    double c = hyperbolic ? std::cosh(0.5 * alpha) : std::cos(0.5 * alpha);
    return -(1.0 + c) / L;
}

// ---------------------------------------------------------------------------
// Probe matrix
// ---------------------------------------------------------------------------

namespace {

DomainSpec candidate_domain(const Jet& F, double L, int n) {
    DomainSpec spec;
    spec.n = n;
    spec.L = L;
    spec.symmetric = true;
    spec.F = F;
    return spec;
}

} // namespace

ProbeMatrix probe_matrix(const Jet& lower_F, const std::vector<double>& alpha, double L, int n, int j,
                         const std::vector<int>& r_list) {
    int d = n - 1;
    ProbeMatrix pm;
    for (int r : r_list) {
        if (resonant(alpha, r)) continue; // row dropped
        pm.r_list.push_back(r);
    }
    pm.columns = multi_indices_of_order(d, j + 1);
    int rows = static_cast<int>(pm.r_list.size());
    int cols = static_cast<int>(pm.columns.size());
    pm.base.resize(rows);
    pm.response.assign(cols, std::vector<cplx>(rows));

    // forward evaluations: (cols + 1) configurations x rows, all independent
    Jet base_F = lower_F.truncated(std::max(lower_F.trunc(), j + 1));
    std::vector<Jet> configs;
    configs.push_back(base_F);
    for (const MultiIndex& gamma : pm.columns) {
        Jet F = base_F;
        F.set_coeff(gamma, 1.0);
        configs.push_back(std::move(F));
    }
    std::vector<std::vector<cplx>> bhat(configs.size(), std::vector<cplx>(rows));
    parallel_for(static_cast<int>(configs.size()) * rows, [&](int t) {
        int cfg = t / rows, row = t % rows;
        DomainSpec spec = candidate_domain(configs[cfg], L, n);
        bhat[cfg][row] = wave_invariants_row(spec, pm.r_list[row], j).bhat[j];
    });
    for (int row = 0; row < rows; ++row) pm.base[row] = bhat[0][row];
    for (int c = 0; c < cols; ++c)
        for (int row = 0; row < rows; ++row) pm.response[c][row] = bhat[c + 1][row] - bhat[0][row];
    return pm;
}

// ---------------------------------------------------------------------------
// Jet recovery
// ---------------------------------------------------------------------------

namespace {

struct LevelSolve {
    std::vector<double> coeffs;
    double condition = 0.0;
    double residual_rms = 0.0;
};

LevelSolve solve_level(const WaveInvariantTable& table, const Jet& lower_F, const std::vector<double>& alpha,
                       double L, int n, int j) {
    int d = n - 1;
    int cols = static_cast<int>(multi_indices_of_order(d, j + 1).size());
    std::vector<int> r_list;
    for (int r = 1; r <= table.r_max(); ++r) {
        if (!table.has_row(r) || resonant(alpha, r)) continue;
        r_list.push_back(r);
        if (static_cast<int>(r_list.size()) >= cols + 2) break;
    }
    if (static_cast<int>(r_list.size()) < cols) {
        std::ostringstream msg;
        msg << "recover_jet: level " << j << " needs " << cols << " rows, table provides "
            << r_list.size() << " non-resonant rows";
        throw InconsistentDataError(msg.str());
    }
    ProbeMatrix pm = probe_matrix(lower_F, alpha, L, n, j, r_list);
    int rows = static_cast<int>(pm.r_list.size());
    linalg::Matrix a(2 * rows, cols);
    std::vector<double> b(2 * rows);
    for (int row = 0; row < rows; ++row) {
        cplx obs = table.at(pm.r_list[row], j);
        cplx rhs = obs - pm.base[row];
        b[row] = rhs.real();
        b[rows + row] = rhs.imag();
        for (int c = 0; c < cols; ++c) {
            a(row, c) = pm.response[c][row].real();
            a(rows + row, c) = pm.response[c][row].imag();
        }
    }
    auto ls = linalg::least_squares(a, b);
    LevelSolve out;
    out.coeffs = ls.x;
    out.condition = ls.condition;
    out.residual_rms = ls.residual_norm / std::sqrt(2.0 * rows);
    return out;
}

Jet level_zero_candidate(int d, const std::vector<double>& alpha, double L,
                         const std::vector<bool>& hyperbolic_mask) {
    Jet F(d, kMaxTrunc / 2);
    for (int i = 0; i < d; ++i) {
        bool hyp = i < static_cast<int>(hyperbolic_mask.size()) && hyperbolic_mask[i];
        double nu = curvature_from_alpha(alpha[i], L, hyp);
        F.set_coeff(MultiIndex::unit(d, i), 0.5 * nu);
    }
    return F;
}

} // namespace

RecoveredJet recover_jet(const WaveInvariantTable& table, const std::vector<double>& alpha, double L, int n,
                         int J_max, const RecoverOptions& opts) {
    int d = n - 1;
    if (static_cast<int>(alpha.size()) != d) throw SpecError("recover_jet: alpha size must be n-1");
    if (!table.symmetric) throw SpecError("recover_jet: symmetric-mode tables only");
    RecoveredJet out;
    out.d = d;
    out.alpha = alpha;
    out.experimental_mixed = opts.experimental_mixed;
    out.F = level_zero_candidate(d, alpha, L, opts.hyperbolic_mask);
    out.order = 2;
    for (int j = 1; j <= J_max; ++j) {
        LevelSolve level = solve_level(table, out.F, alpha, L, n, j);
        out.condition_numbers.push_back(level.condition);
        out.residuals.push_back(level.residual_rms);
        if (level.condition > opts.condition_threshold) {
            out.ill_conditioned = true; // partial result
            break;
        }
        // residual scale: largest observed entry at this level
        double scale = 0.0;
        for (const auto& [key, val] : table.entries)
            if (key.second == j) scale = std::max(scale, std::abs(val));
        if (level.residual_rms > opts.residual_threshold * std::max(1.0, scale))
            throw InconsistentDataError("recover_jet: level " + std::to_string(j) + " residual " +
                                        std::to_string(level.residual_rms) + " above threshold");
        const auto columns = multi_indices_of_order(d, j + 1);
        for (std::size_t c = 0; c < columns.size(); ++c) out.F.set_coeff(columns[c], level.coeffs[c]);
        out.order = 2 * j + 2;
    }
    return out;
}

RecoveredJet invert_pipeline(const WaveInvariantTable& table, const RecoverOptions& opts) {
    int n = table.n, d = n - 1;
    double L = table.L;

    std::vector<double> alpha;
    double floquet_residual = 0.0;
    if (!opts.alpha_override.empty()) {
        alpha = opts.alpha_override;
        RecoveredJet out = recover_jet(table, alpha, L, n, opts.j_max, opts);
        out.floquet_residual = 0.0;
        out.branch.assign(d, -1); // caller-fixed
        return out;
    }

    std::map<int, double> det_values;
    for (int r = 1; r <= table.r_max(); ++r)
        if (table.has_row(r)) det_values[r] = table.det_invariant(r);
    FloquetRecovery fl = recover_floquet(det_values, d, table.r_max());
    floquet_residual = fl.residual;

    // Branch disambiguation: sin^2(r alpha/2) cannot distinguish alpha from
    // 2 pi - alpha; test every fold combination at the first level.
    std::vector<std::vector<double>> combos;
    std::vector<std::vector<int>> combo_bits;
    for (int mask = 0; mask < (1 << d); ++mask) {
        std::vector<double> a(d);
        std::vector<int> bits(d);
        for (int i = 0; i < d; ++i) {
            bits[i] = (mask >> i) & 1;
            a[i] = bits[i] ? kTwoPi - fl.alpha[i] : fl.alpha[i];
        }
        combos.push_back(std::move(a));
        combo_bits.push_back(std::move(bits));
    }
    int best = -1;
    double best_residual = 0.0;
    if (opts.j_max >= 1 && table.j_max >= 1) {
        for (std::size_t ci = 0; ci < combos.size(); ++ci) {
            Jet F0 = level_zero_candidate(d, combos[ci], L, {});
            double res;
            try {
                res = solve_level(table, F0, combos[ci], L, n, 1).residual_rms;
            } catch (const InconsistentDataError&) {
                continue;
            }
            if (best < 0 || res < best_residual) {
                best = static_cast<int>(ci);
                best_residual = res;
            }
        }
        if (best < 0) throw InconsistentDataError("invert_pipeline: no branch combination fits the level-1 data");
    } else {
        best = 0; // nothing above level 0: keep the canonical fold
    }

    RecoveredJet out = recover_jet(table, combos[best], L, n, opts.j_max, opts);
    out.floquet_residual = floquet_residual;
    out.branch = combo_bits[best];
    return out;
}

} // namespace wavinv
