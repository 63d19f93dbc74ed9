#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "spinlock/conditions.hpp"
#include "spinlock/dynamics.hpp"
#include "spinlock/integrate.hpp"

namespace spinlock::solver {

using Vec2 = Eigen::Vector2d;
using Vec4 = Eigen::Vector4d;
using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

/// Periodic orbit of the resonant chart, evaluable for every t. Orbits of
/// the undamped system are stored on [0, pi] and extended by oddness; damped
/// orbits are stored over a full period.
class PeriodicOrbit {
  public:
    PeriodicOrbit() = default;

    static PeriodicOrbit odd_half_period(integrate::Trajectory<4> half) {
        PeriodicOrbit o;
        o.traj_ = std::move(half);
        o.odd_ = true;
        return o;
    }
    static PeriodicOrbit full_period(integrate::Trajectory<4> full) {
        PeriodicOrbit o;
        o.traj_ = std::move(full);
        o.odd_ = false;
        return o;
    }

    bool odd_symmetric() const { return odd_; }
    const integrate::Trajectory<4>& data() const { return traj_; }

    /// (Theta1, Theta2, dTheta1, dTheta2) at any time.
    Vec4 state(double t) const {
        if (odd_) {
            const double tau = std::remainder(t, two_pi);
            if (tau >= 0.0) return traj_(tau);
            Vec4 s = traj_(-tau);
            s[0] = -s[0];
            s[1] = -s[1];
            return s;
        }
        double tau = std::fmod(t, two_pi);
        if (tau < 0.0) tau += two_pi;
        return traj_(tau);
    }

  private:
    integrate::Trajectory<4> traj_;
    bool odd_ = false;
};

/// A located periodic solution together with its verification data.
struct PeriodicSolution {
    Vec2 x0 = Vec2::Zero();  ///< Theta(0)
    Vec2 v0 = Vec2::Zero();  ///< Theta_dot(0)
    dynamics::Dissipation delta;
    double amplitude = 0.0;  ///< max over the period of max_j |Theta_j|
    double residual = 0.0;   ///< ||z(2 pi) - z(0)||_inf from a fresh integration
    PeriodicOrbit orbit;
};

enum class Multistart { Auto, Always, Never };

struct SolverOptions {
    integrate::IntegratorConfig integrator;
    double newton_tol = 1e-12;     ///< target for the shooting residual
    double newton_soft_tol = 1e-9; ///< acceptable when damping stalls at noise level
    int max_newton_iter = 30;
    Multistart multistart = Multistart::Auto;
    int multistart_grid = 5;       ///< grid points per velocity component
    double dedupe_tol = 1e-8;
};

struct ConservativeSolveResult {
    PeriodicSolution primary;                  ///< smallest amplitude
    std::vector<PeriodicSolution> alternates;  ///< further roots, by amplitude
    int starts_tried = 0;
    int starts_converged = 0;
    /// Infinity-norm shooting residual before the first Newton step and after
    /// each accepted step, for the start that converged to the primary root.
    std::vector<double> newton_residuals;
};

namespace detail {

/// Half-period shooting state: (Theta, Theta_dot) plus the 2x2 sensitivity
/// of (Theta) and (Theta_dot) with respect to the initial velocity.
struct ShootingRhs {
    const potential::SystemParams& p;
    const potential::LambdaSet& ls;

    Eigen::Matrix<double, 12, 1> operator()(double t,
                                            const Eigen::Matrix<double, 12, 1>& y) const {
        const dynamics::OrbitFactors of(p, t);
        const Vec2 Th(y[0], y[1]);
        const Vec2 F = dynamics::f_theta_chart(p, ls, of, Th);
        const Mat2 J = dynamics::df_dTheta(p, ls, of, Th);
        Eigen::Map<const Mat2> X(y.data() + 4), Xd(y.data() + 8);

        Eigen::Matrix<double, 12, 1> dy;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = -F[0] / p.C1;
        dy[3] = -F[1] / p.C2;
        Mat2 Xdd;
        Xdd.row(0) = -(J.row(0) * X) / p.C1;
        Xdd.row(1) = -(J.row(1) * X) / p.C2;
        Eigen::Map<Mat2>(dy.data() + 4) = Xd;
        Eigen::Map<Mat2>(dy.data() + 8) = Xdd;
        return dy;
    }
};

/// Plain chart dynamics, used for verification and trajectory storage.
struct ChartRhs {
    const potential::SystemParams& p;
    const potential::LambdaSet& ls;
    dynamics::Dissipation delta;

    Vec4 operator()(double t, const Vec4& y) const {
        const dynamics::OrbitFactors of(p, t);
        const Vec2 acc = dynamics::rhs_Theta_chart(p, ls, delta, of, Vec2(y[0], y[1]),
                                                   Vec2(y[2], y[3]));
        return Vec4(y[2], y[3], acc[0], acc[1]);
    }
};

/// Chart dynamics augmented with a 4x4 fundamental matrix. In the undamped
/// case (`scaled`) the variational block evolves in the symmetrized
/// coordinates C^{1/2} Theta, which makes the fundamental matrix symplectic;
/// with damping the plain chart coordinates are kept.
struct VariationalRhs {
    const potential::SystemParams& p;
    const potential::LambdaSet& ls;
    dynamics::Dissipation delta;
    bool scaled;

    Eigen::Matrix<double, 20, 1> operator()(double t,
                                            const Eigen::Matrix<double, 20, 1>& y) const {
        const dynamics::OrbitFactors of(p, t);
        const Vec2 Th(y[0], y[1]), Thd(y[2], y[3]);
        const Vec2 acc = dynamics::rhs_Theta_chart(p, ls, delta, of, Th, Thd);

        Mat2 K;
        if (scaled) {
            K = dynamics::jacobian_A(p, ls, of, Th);
        } else {
            const Mat2 J = dynamics::df_dTheta(p, ls, of, Th);
            K.row(0) = J.row(0) / p.C1;
            K.row(1) = J.row(1) / p.C2;
        }
        Eigen::Map<const Mat4> M(y.data() + 4);

        Eigen::Matrix<double, 20, 1> dy;
        dy[0] = y[2];
        dy[1] = y[3];
        dy[2] = acc[0];
        dy[3] = acc[1];
        Mat4 B = Mat4::Zero();
        B(0, 2) = B(1, 3) = 1.0;
        B.block<2, 2>(2, 0) = -K;
        B(2, 2) = -delta.delta1 * of.ar6;
        B(3, 3) = -delta.delta2 * of.ar6;
        Eigen::Map<Mat4>(dy.data() + 4) = B * M;
        return dy;
    }
};

struct ShotResult {
    Vec2 G;      ///< Theta(pi)
    Mat2 J;      ///< dTheta(pi)/dv0
    bool finite;
};

inline ShotResult shoot_half_period(const potential::SystemParams& p,
                                    const potential::LambdaSet& ls, const Vec2& v0,
                                    const integrate::IntegratorConfig& cfg) {
    Eigen::Matrix<double, 12, 1> y0 = Eigen::Matrix<double, 12, 1>::Zero();
    y0[2] = v0[0];
    y0[3] = v0[1];
    y0[8] = 1.0;  // dTheta_dot/dv0 = identity (column-major 2x2 at offset 8)
    y0[11] = 1.0;
    ShootingRhs rhs{p, ls};
    const auto y = integrate::integrate_to<12>(rhs, 0.0, y0, pi, cfg);
    ShotResult r;
    r.G = Vec2(y[0], y[1]);
    r.J = Eigen::Map<const Mat2>(y.data() + 4);
    r.finite = r.G.allFinite() && r.J.allFinite();
    return r;
}

/// Damped Newton iteration for the half-period boundary condition
/// Theta(pi; v0) = 0. Returns the converged velocity, or nothing. When
/// `history` is given it receives the residual norm before the first step and
/// after each accepted step.
inline std::optional<Vec2> newton_half_period(const potential::SystemParams& p,
                                              const potential::LambdaSet& ls, Vec2 v,
                                              const SolverOptions& opts,
                                              std::vector<double>* history = nullptr) {
    ShotResult s;
    try {
        s = shoot_half_period(p, ls, v, opts.integrator);
    } catch (const Error&) {
        return std::nullopt;
    }
    if (!s.finite) return std::nullopt;
    double gnorm = s.G.lpNorm<Eigen::Infinity>();
    if (history) history->push_back(gnorm);
    for (int it = 0; it < opts.max_newton_iter; ++it) {
        if (gnorm < opts.newton_tol) return v;
        const Eigen::PartialPivLU<Mat2> lu(s.J);
        const Vec2 dv = lu.solve(s.G);
        if (!dv.allFinite()) return std::nullopt;
        bool improved = false;
        for (double step = 1.0; step >= 1.0 / 64.0; step *= 0.5) {
            const Vec2 v_try = v - step * dv;
            ShotResult s_try;
            try {
                s_try = shoot_half_period(p, ls, v_try, opts.integrator);
            } catch (const Error&) {
                continue;
            }
            if (!s_try.finite) continue;
            const double g_try = s_try.G.lpNorm<Eigen::Infinity>();
            if (g_try < gnorm) {
                v = v_try;
                s = s_try;
                gnorm = g_try;
                improved = true;
                if (history) history->push_back(gnorm);
                break;
            }
        }
        if (!improved) break;  // stalled, usually at the integrator noise floor
    }
    if (gnorm < opts.newton_soft_tol) return v;
    return std::nullopt;
}

/// Amplitude max_t max_j |Theta_j(t)| sampled on the dense trajectory.
inline double orbit_amplitude(const integrate::Trajectory<4>& traj, int samples = 512) {
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    double amp = 0.0;
    for (int i = 0; i <= samples; ++i) {
        const Vec4 s = traj(t0 + (t1 - t0) * i / samples);
        amp = std::max({amp, std::abs(s[0]), std::abs(s[1])});
    }
    return amp;
}

inline PeriodicSolution package_conservative(const potential::SystemParams& p,
                                             const potential::LambdaSet& ls, const Vec2& v0,
                                             const integrate::IntegratorConfig& cfg) {
    PeriodicSolution sol;
    sol.x0 = Vec2::Zero();
    sol.v0 = v0;
    sol.delta = dynamics::Dissipation{0.0, 0.0};

    ChartRhs rhs{p, ls, sol.delta};
    const Vec4 z0(0.0, 0.0, v0[0], v0[1]);
    sol.orbit =
        PeriodicOrbit::odd_half_period(integrate::integrate_dense<4>(rhs, 0.0, z0, pi, cfg));
    sol.amplitude = orbit_amplitude(sol.orbit.data());

    // independent verification over the full period
    const Vec4 z_end = integrate::integrate_to<4>(rhs, 0.0, z0, two_pi, cfg);
    sol.residual = (z_end - z0).lpNorm<Eigen::Infinity>();
    return sol;
}

}  // namespace detail

/// Locate odd 2 pi-periodic solutions of the undamped resonant chart by
/// shooting on the half-period boundary problem Theta(0) = Theta(pi) = 0.
/// The primary solution is the one of smallest amplitude; further distinct
/// roots found by the multistart grid are reported as alternates.
inline ConservativeSolveResult solve_periodic_conservative(
    const potential::SystemParams& p, const potential::LambdaSet& ls,
    const SolverOptions& opts = {}) {
    std::vector<Vec2> starts{Vec2::Zero()};
    const bool multi = opts.multistart == Multistart::Always ||
                       (opts.multistart == Multistart::Auto &&
                        !conditions::check_uniqueness(p, ls).holds);
    if (multi && opts.multistart_grid > 1) {
        const double half = 0.5 * pi * conditions::m_bound(p, ls);
        const int g = opts.multistart_grid;
        for (int i = 0; i < g; ++i)
            for (int j = 0; j < g; ++j) {
                const Vec2 v(-half + 2.0 * half * i / (g - 1),
                             -half + 2.0 * half * j / (g - 1));
                if (v.norm() > 0.0) starts.push_back(v);
            }
    }

    ConservativeSolveResult result;
    std::vector<Vec2> roots;
    std::vector<std::vector<double>> histories;
    for (const Vec2& start : starts) {
        ++result.starts_tried;
        std::vector<double> history;
        const auto root = detail::newton_half_period(p, ls, start, opts, &history);
        if (!root) continue;
        ++result.starts_converged;
        const bool dup = std::any_of(roots.begin(), roots.end(), [&](const Vec2& r) {
            return (r - *root).lpNorm<Eigen::Infinity>() <
                   opts.dedupe_tol * std::max(1.0, r.lpNorm<Eigen::Infinity>());
        });
        if (!dup) {
            roots.push_back(*root);
            histories.push_back(std::move(history));
        }
    }
    if (roots.empty())
        throw NoConvergenceError("periodic solver: no shooting start converged",
                                 std::numeric_limits<double>::quiet_NaN());

    std::vector<std::size_t> order(roots.size());
    std::vector<PeriodicSolution> sols;
    sols.reserve(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) {
        order[i] = i;
        sols.push_back(detail::package_conservative(p, ls, roots[i], opts.integrator));
    }
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return sols[a].amplitude < sols[b].amplitude;
    });
    result.primary = std::move(sols[order.front()]);
    result.newton_residuals = std::move(histories[order.front()]);
    for (std::size_t k = 1; k < order.size(); ++k)
        result.alternates.push_back(std::move(sols[order[k]]));
    return result;
}

/// Floquet data of a periodic solution.
struct FloquetResult {
    Mat4 monodromy;
    Eigen::Vector4cd multipliers;
    double max_modulus = 0.0;
    bool conservative_stable = false;   ///< every | |phi| - 1 | within tolerance
    bool strong_candidate = false;      ///< no phi within tolerance of +1 or -1
    bool dissipative_attracting = false;///< every |phi| < 1 - attract_tol
    double det_defect = 0.0;            ///< |det M - Liouville prediction|
    double symplectic_defect = 0.0;     ///< ||M^T J M - J||, meaningful if scaled
    bool scaled = false;                ///< monodromy taken in C^{1/2} Theta coordinates
};

struct FloquetOptions {
    integrate::IntegratorConfig integrator;
    double unit_modulus_tol = 1e-6;
    double root_distance_tol = 1e-6;
    double attract_tol = 1e-9;
};

/// Monodromy matrix and Floquet multipliers of a periodic solution under the
/// given damping. Undamped systems are analyzed in the symmetrized
/// coordinates, where the monodromy is symplectic.
inline FloquetResult monodromy(const potential::SystemParams& p,
                               const potential::LambdaSet& ls,
                               const dynamics::Dissipation& delta,
                               const PeriodicSolution& sol, const FloquetOptions& opts = {}) {
    const bool damped = delta.delta1 != 0.0 || delta.delta2 != 0.0;
    detail::VariationalRhs rhs{p, ls, delta, !damped};
    Eigen::Matrix<double, 20, 1> y0 = Eigen::Matrix<double, 20, 1>::Zero();
    y0[0] = sol.x0[0];
    y0[1] = sol.x0[1];
    y0[2] = sol.v0[0];
    y0[3] = sol.v0[1];
    Eigen::Map<Mat4>(y0.data() + 4) = Mat4::Identity();
    const auto y = integrate::integrate_to<20>(rhs, 0.0, y0, two_pi, opts.integrator);

    FloquetResult r;
    r.scaled = !damped;
    r.monodromy = Eigen::Map<const Mat4>(y.data() + 4);
    const Eigen::EigenSolver<Mat4> es(r.monodromy);
    r.multipliers = es.eigenvalues();

    r.max_modulus = 0.0;
    bool unit = true, strong = true, attract = true;
    for (int i = 0; i < 4; ++i) {
        const std::complex<double> phi = r.multipliers[i];
        const double mod = std::abs(phi);
        r.max_modulus = std::max(r.max_modulus, mod);
        if (std::abs(mod - 1.0) > opts.unit_modulus_tol) unit = false;
        if (std::abs(phi - 1.0) <= opts.root_distance_tol ||
            std::abs(phi + 1.0) <= opts.root_distance_tol)
            strong = false;
        if (mod >= 1.0 - opts.attract_tol) attract = false;
    }
    r.conservative_stable = unit;
    r.strong_candidate = strong;
    r.dissipative_attracting = attract;

    // Liouville: det M = exp(-(d1 + d2) int_0^{2pi} (a/r)^6 dt)
    double expected_det = 1.0;
    if (damped) {
        auto d_rhs = [&](double t, const Eigen::Matrix<double, 1, 1>& /*unused*/) {
            return Eigen::Matrix<double, 1, 1>(dynamics::OrbitFactors(p, t).ar6);
        };
        const double I6 = integrate::integrate_to<1>(
            d_rhs, 0.0, Eigen::Matrix<double, 1, 1>::Zero(), two_pi, opts.integrator)[0];
        expected_det = std::exp(-(delta.delta1 + delta.delta2) * I6);
    }
    r.det_defect = std::abs(r.monodromy.determinant() - expected_det);

    Mat4 Jsym = Mat4::Zero();
    Jsym.block<2, 2>(0, 2) = Mat2::Identity();
    Jsym.block<2, 2>(2, 0) = -Mat2::Identity();
    r.symplectic_defect = (r.monodromy.transpose() * Jsym * r.monodromy - Jsym).norm();
    return r;
}

struct ContinuationOptions {
    integrate::IntegratorConfig integrator;
    double newton_tol = 1e-11;
    int max_newton_iter = 20;
    int steps = 10;                  ///< initial number of friction increments
    double min_step_fraction = 1e-6; ///< smallest admissible increment
    double block_tol = 1e-6;         ///< multiplier distance to 1 that blocks continuation
};

namespace detail {

/// One full-period map with fundamental matrix; z = (Theta, Theta_dot)(0).
inline std::pair<Vec4, Mat4> period_map(const potential::SystemParams& p,
                                        const potential::LambdaSet& ls,
                                        const dynamics::Dissipation& delta, const Vec4& z,
                                        const integrate::IntegratorConfig& cfg) {
    VariationalRhs rhs{p, ls, delta, false};
    Eigen::Matrix<double, 20, 1> y0 = Eigen::Matrix<double, 20, 1>::Zero();
    y0.head<4>() = z;
    Eigen::Map<Mat4>(y0.data() + 4) = Mat4::Identity();
    const auto y = integrate::integrate_to<20>(rhs, 0.0, y0, two_pi, cfg);
    return {y.head<4>(), Eigen::Map<const Mat4>(y.data() + 4)};
}

/// Newton iteration for the fixed point of the full-period map at fixed
/// damping. Returns the fixed point, or nothing if it did not converge.
inline std::optional<Vec4> newton_fixed_point(const potential::SystemParams& p,
                                              const potential::LambdaSet& ls,
                                              const dynamics::Dissipation& delta, Vec4 z,
                                              const ContinuationOptions& opts) {
    for (int it = 0; it < opts.max_newton_iter; ++it) {
        Vec4 Pz;
        Mat4 M;
        try {
            std::tie(Pz, M) = period_map(p, ls, delta, z, opts.integrator);
        } catch (const Error&) {
            return std::nullopt;
        }
        const Vec4 R = Pz - z;
        const double rnorm = R.lpNorm<Eigen::Infinity>();
        if (rnorm < opts.newton_tol) return z;
        const Vec4 dz = (M - Mat4::Identity()).partialPivLu().solve(R);
        if (!dz.allFinite()) return std::nullopt;
        z -= dz;
    }
    // final residual check after the last update
    try {
        const auto [Pz, M] = period_map(p, ls, delta, z, opts.integrator);
        (void)M;
        if ((Pz - z).lpNorm<Eigen::Infinity>() < opts.newton_tol) return z;
    } catch (const Error&) {
    }
    return std::nullopt;
}

}  // namespace detail

/// Continue an undamped periodic solution to a target friction pair by
/// stepwise Newton iteration on the full-period return map. Refuses to start
/// when a Floquet multiplier sits at 1 (the return-map Jacobian would be
/// singular); reduces the friction increment when an intermediate fixed
/// point is lost, and reports the last reachable friction level if the
/// increment underflows.
inline PeriodicSolution continue_dissipative(const potential::SystemParams& p,
                                             const potential::LambdaSet& ls,
                                             const PeriodicSolution& conservative,
                                             const dynamics::Dissipation& target,
                                             const ContinuationOptions& opts = {}) {
    if (target.delta1 < 0.0 || target.delta2 < 0.0)
        throw DomainError("continuation: friction coefficients must be non-negative");
    if (target.delta1 == 0.0 && target.delta2 == 0.0) return conservative;

    FloquetOptions fopts;
    fopts.integrator = opts.integrator;
    const FloquetResult f0 =
        monodromy(p, ls, dynamics::Dissipation{0.0, 0.0}, conservative, fopts);
    for (int i = 0; i < 4; ++i)
        if (std::abs(f0.multipliers[i] - 1.0) <= opts.block_tol)
            throw ContinuationBlockedError(
                "continuation: a Floquet multiplier of the undamped solution lies at 1");

    Vec4 z;
    z << conservative.x0, conservative.v0;
    double s = 0.0;
    double step = 1.0 / opts.steps;
    while (s < 1.0) {
        const double s_try = std::min(1.0, s + step);
        const dynamics::Dissipation d_try{s_try * target.delta1, s_try * target.delta2};
        const auto fixed = detail::newton_fixed_point(p, ls, d_try, z, opts);
        if (fixed) {
            z = *fixed;
            s = s_try;
        } else {
            step *= 0.5;
            if (step < opts.min_step_fraction)
                throw ContinuationStalledError(
                    "continuation: friction increment underflow before reaching target",
                    s * target.delta1, s * target.delta2);
        }
    }

    PeriodicSolution sol;
    sol.x0 = z.head<2>();
    sol.v0 = z.tail<2>();
    sol.delta = target;
    detail::ChartRhs rhs{p, ls, target};
    sol.orbit = PeriodicOrbit::full_period(
        integrate::integrate_dense<4>(rhs, 0.0, z, two_pi, opts.integrator));
    sol.amplitude = detail::orbit_amplitude(sol.orbit.data());
    const Vec4 z_end = integrate::integrate_to<4>(rhs, 0.0, z, two_pi, opts.integrator);
    sol.residual = (z_end - z).lpNorm<Eigen::Infinity>();
    return sol;
}

}  // namespace spinlock::solver
