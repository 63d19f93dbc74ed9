#pragma once

#include <cmath>

#include "spinlock/errors.hpp"

namespace spinlock::kepler {

/// Fixed Keplerian orbit in model units: the period is 2*pi and the mean
/// motion is 1, so time and mean anomaly coincide.
struct Orbit {
    double a = 1.0;  ///< semi-major axis
    double e = 0.0;  ///< eccentricity, 0 <= e < 1

    Orbit(double a, double e) : a(a), e(e) {
        if (!(a > 0.0)) throw DomainError("orbit: semi-major axis must be positive");
        if (!(e >= 0.0 && e < 1.0)) throw DomainError("orbit: eccentricity must lie in [0,1)");
    }
};

/// Orbital kinematics at one instant.
struct OrbitState {
    double t;       ///< time = mean anomaly
    double u;       ///< eccentric anomaly, u - e*sin(u) = t
    double r;       ///< radius
    double f;       ///< true anomaly, unwrapped so f(t + 2*pi) = f(t) + 2*pi
    double f_dot;   ///< df/dt
    double f_ddot;  ///< d2f/dt2
};

namespace detail {

/// Eccentric anomaly split into a reduced value in [-pi, pi] and whole turns.
struct ReducedAnomaly {
    double u0;
    double turns;
};

/// Solve u - e*sin(u) = t with t reduced to [-pi, pi]. Reduction makes the
/// result exactly 2*pi-periodic and exactly odd in t; both properties are
/// inherited bitwise because every Newton iterate mirrors under t -> -t.
inline ReducedAnomaly solve_kepler_reduced(double e, double t) {
    if (!(e >= 0.0 && e < 1.0)) throw DomainError("solve_kepler: eccentricity must lie in [0,1)");
    const double two_pi = 2.0 * M_PI;
    const double t0 = std::remainder(t, two_pi);  // [-pi, pi]
    const double turns = (t - t0) / two_pi;

    double u = t0 + e * std::sin(t0);
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
        const double g = u - e * std::sin(u) - t0;
        const double dg = 1.0 - e * std::cos(u);
        const double du = g / dg;
        u -= du;
        if (std::abs(du) < 5e-15) {
            converged = true;
            break;
        }
    }
    if (!converged || std::abs(u - e * std::sin(u) - t0) > 1e-12) {
        // g(u) = u - e*sin(u) - t0 is strictly increasing, so [t0-e, t0+e]
        // always brackets the root.
        double lo = t0 - e, hi = t0 + e;
        for (int it = 0; it < 200 && hi - lo > 2e-16; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (mid - e * std::sin(mid) - t0 > 0.0)
                hi = mid;
            else
                lo = mid;
        }
        u = 0.5 * (lo + hi);
        const double res = std::abs(u - e * std::sin(u) - t0);
        if (res > 1e-10) throw NoConvergenceError("solve_kepler: no convergence", res);
    }
    return {u, turns};
}

}  // namespace detail

/// Solve u - e*sin(u) = t for the eccentric anomaly.
inline double solve_kepler(double e, double t) {
    const auto [u0, turns] = detail::solve_kepler_reduced(e, t);
    return u0 + 2.0 * M_PI * turns;
}

/// Full orbital kinematics at time t.
///
/// r and f follow from the eccentric anomaly; the derivatives use the
/// closed forms f_dot = sqrt(1-e^2)/(1-e*cos u)^2 and
/// f_ddot = -2 e sqrt(1-e^2) sin u / (1-e*cos u)^4.
inline OrbitState orbit_state(const Orbit& orb, double t) {
    const double e = orb.e;
    const auto [u0, turns] = detail::solve_kepler_reduced(e, t);
    const double two_pi = 2.0 * M_PI;
    const double cu = std::cos(u0), su = std::sin(u0);
    const double om = 1.0 - e * cu;
    const double b = std::sqrt(1.0 - e * e);

    OrbitState s;
    s.t = t;
    s.u = u0 + two_pi * turns;
    s.r = orb.a * om;
    // u and f sweep each revolution together, so unwrapping f with the turn
    // count of u keeps f continuous.
    s.f = std::atan2(b * su, cu - e) + two_pi * turns;
    s.f_dot = b / (om * om);
    s.f_ddot = -2.0 * e * b * su / (om * om * om * om);
    return s;
}

}  // namespace spinlock::kepler
