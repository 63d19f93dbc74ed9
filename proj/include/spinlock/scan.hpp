#pragma once

#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "spinlock/conditions.hpp"
#include "spinlock/solver.hpp"

namespace spinlock::scan {

/// Two-parameter families of systems used for stability diagrams, both with
/// equal flattening and oblateness ratios (qhat = dhat per body, the
/// coupling-dominant choice).
enum class Geometry {
    /// identical bodies: C_j = 1/2, lambda_j = lambda, qhat_j = qhat
    EqualBodies,
    /// body 1 twice the size of body 2 at equal density: the scan parameter
    /// is lambda_2, with lambda_1 = lambda_2 / 8 and qhat_2 = qhat_1 / 32,
    /// which pins the inertia ratio C2/C1 = 2^-8
    TwoToOne,
};

/// Outcome of one (e, lambda) cell.
enum class CellStatus {
    Stable,    ///< unit-circle multipliers, none near +1 or -1 (undamped);
               ///< all strictly inside the unit circle (damped)
    Marginal,  ///< unit-circle multipliers with one near +1 or -1 (undamped);
               ///< not attracting but not expanding (damped)
    Unstable,  ///< a multiplier modulus exceeds 1 beyond tolerance
    Failed,    ///< the solver or the parameter construction threw
};

inline const char* to_string(CellStatus s) {
    switch (s) {
        case CellStatus::Stable: return "stable";
        case CellStatus::Marginal: return "marginal";
        case CellStatus::Unstable: return "unstable";
        default: return "failed";
    }
}

struct DiagramRequest {
    Geometry geometry = Geometry::EqualBodies;
    double qhat = 0.0;
    std::vector<double> e_values;
    std::vector<double> lambda_values;
    dynamics::Dissipation delta;  ///< zero pair = undamped diagram
    solver::SolverOptions solver_options;
    solver::FloquetOptions floquet_options;
    solver::ContinuationOptions continuation_options;
    int threads = 0;  ///< 0 = hardware concurrency
};

struct CellResult {
    double e = 0.0;
    double lambda = 0.0;
    CellStatus status = CellStatus::Failed;
    double max_multiplier_modulus = std::numeric_limits<double>::quiet_NaN();
    bool analytic_unique = false;
    bool analytic_stable = false;
    double amplitude = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    std::string error;  ///< non-empty iff status == Failed
};

struct DiagramResult {
    DiagramRequest request;
    /// row-major over lambda (outer) and e (inner):
    /// cells[i_lambda * e_values.size() + i_e]
    std::vector<CellResult> cells;
};

inline std::vector<double> make_grid(double lo, double hi, int n) {
    if (n < 1 || (n == 1 && hi != lo) || hi < lo)
        throw DomainError("grid: need lo <= hi and a consistent point count");
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

/// System parameters of one scan cell. The reference orbit size does not
/// enter the resonant-chart dynamics; it is chosen so the derived mass split
/// matches the family exactly (equal masses, or the 8:1 split of two bodies
/// with a 2:1 size ratio at equal density).
inline potential::SystemParams cell_params(Geometry g, double e, double lambda,
                                           double qhat) {
    double C1, l1, l2, mu;
    switch (g) {
        case Geometry::EqualBodies:
            C1 = 0.5;
            l1 = l2 = lambda;
            mu = 0.25;  // M1 = M2 = 1/2
            break;
        default:
            C1 = 256.0 / 257.0;
            l2 = lambda;
            l1 = lambda / 8.0;
            mu = 8.0 / 81.0;  // M1 = 8/9, M2 = 1/9
            break;
    }
    double a = 10.0;
    if (qhat > 0.0 && l1 > 0.0) a = std::sqrt(l1 * C1 / (3.0 * qhat * mu));
    return potential::SystemParams::from_parameters(e, a, C1, l1, l2, qhat, qhat);
}

/// Status of a located solution given its Floquet data.
inline CellStatus classify(const solver::FloquetResult& f, bool damped,
                           const solver::FloquetOptions& opts) {
    if (damped) {
        if (f.dissipative_attracting) return CellStatus::Stable;
        if (f.max_modulus <= 1.0 + opts.unit_modulus_tol) return CellStatus::Marginal;
        return CellStatus::Unstable;
    }
    if (!f.conservative_stable) return CellStatus::Unstable;
    return f.strong_candidate ? CellStatus::Stable : CellStatus::Marginal;
}

namespace detail {

inline CellResult compute_cell(const DiagramRequest& req, double e, double lambda) {
    CellResult cell;
    cell.e = e;
    cell.lambda = lambda;
    try {
        const auto p = cell_params(req.geometry, e, lambda, req.qhat);
        const auto ls = potential::build_lambda_set(p);
        cell.analytic_unique = conditions::check_uniqueness(p, ls).holds;
        cell.analytic_stable = conditions::check_linear_stability(p, ls).all;

        auto sopts = req.solver_options;
        sopts.integrator = req.solver_options.integrator;
        const auto solved = solver::solve_periodic_conservative(p, ls, sopts);

        const bool damped = req.delta.delta1 != 0.0 || req.delta.delta2 != 0.0;
        solver::PeriodicSolution sol = solved.primary;
        if (damped)
            sol = solver::continue_dissipative(p, ls, solved.primary, req.delta,
                                               req.continuation_options);
        const auto flo = solver::monodromy(p, ls, sol.delta, sol, req.floquet_options);
        cell.status = classify(flo, damped, req.floquet_options);
        cell.max_multiplier_modulus = flo.max_modulus;
        cell.amplitude = sol.amplitude;
        cell.residual = sol.residual;
    } catch (const std::exception& ex) {
        cell.status = CellStatus::Failed;
        cell.error = ex.what();
    }
    return cell;
}

}  // namespace detail

/// Compute a stability diagram over the (e, lambda) grid. Cells are
/// distributed over a thread pool; the result order is deterministic
/// (lambda-major) regardless of scheduling.
inline DiagramResult compute_diagram(const DiagramRequest& req) {
    if (req.e_values.empty() || req.lambda_values.empty())
        throw DomainError("diagram: empty grid");
    const std::size_t ne = req.e_values.size(), nl = req.lambda_values.size();
    DiagramResult result;
    result.request = req;
    result.cells.resize(ne * nl);

    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const unsigned n_threads = std::min<std::size_t>(
        req.threads > 0 ? static_cast<unsigned>(req.threads) : hw, ne * nl);

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t k; (k = next.fetch_add(1)) < ne * nl;) {
            const std::size_t il = k / ne, ie = k % ne;
            result.cells[k] = detail::compute_cell(req, req.e_values[ie],
                                                   req.lambda_values[il]);
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return result;
}

}  // namespace spinlock::scan
