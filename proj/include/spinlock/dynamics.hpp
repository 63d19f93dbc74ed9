#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "spinlock/bodies.hpp"
#include "spinlock/kepler.hpp"
#include "spinlock/potential.hpp"

namespace spinlock::dynamics {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// MacDonald friction coefficients delta_j >= 0; zero means conservative.
struct Dissipation {
    double delta1 = 0.0;
    double delta2 = 0.0;
};

/// Powers of a/r shared by every torque expression at one instant.
struct OrbitFactors {
    kepler::OrbitState os;
    double ar3, ar5, ar6;

    OrbitFactors(const potential::SystemParams& p, double t) {
        os = kepler::orbit_state(kepler::Orbit(p.a, p.e), t);
        const double ar = p.a / os.r;
        ar3 = ar * ar * ar;
        ar5 = ar3 * ar * ar;
        ar6 = ar5 * ar;
    }
};

/// Conservative torques acting on the two spins at time t (theta chart).
inline Vec2 torque_conservative(const potential::SystemParams& p,
                                const potential::LambdaSet& ls, double t, double theta1,
                                double theta2) {
    const OrbitFactors of(p, t);
    const double f = of.os.f;
    Vec2 tq;
    tq[0] = -of.ar3 * 0.5 * ls.Lambda1 * std::sin(2.0 * theta1 - 2.0 * f);
    tq[1] = -of.ar3 * 0.5 * ls.Lambda2 * std::sin(2.0 * theta2 - 2.0 * f);
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double s =
            std::sin(2.0 * m1 * (theta1 - f) + 2.0 * m2 * (theta2 - f)) * ls.coupling(m1, m2);
        tq[0] -= of.ar5 * 0.5 * m1 * s;
        tq[1] -= of.ar5 * 0.5 * m2 * s;
    }
    return tq;
}

/// Spin accelerations in the theta chart, including the linearized MacDonald
/// torque -delta_j C_j (a/r)^6 (theta_dot_j - f_dot).
inline Vec2 rhs_theta_chart(const potential::SystemParams& p, const potential::LambdaSet& ls,
                            const Dissipation& dis, double t, const Vec2& theta,
                            const Vec2& theta_dot) {
    const OrbitFactors of(p, t);
    const double f = of.os.f;
    Vec2 tq;
    tq[0] = -of.ar3 * 0.5 * ls.Lambda1 * std::sin(2.0 * theta[0] - 2.0 * f);
    tq[1] = -of.ar3 * 0.5 * ls.Lambda2 * std::sin(2.0 * theta[1] - 2.0 * f);
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double s = std::sin(2.0 * m1 * (theta[0] - f) + 2.0 * m2 * (theta[1] - f)) *
                         ls.coupling(m1, m2);
        tq[0] -= of.ar5 * 0.5 * m1 * s;
        tq[1] -= of.ar5 * 0.5 * m2 * s;
    }
    tq[0] -= dis.delta1 * p.C1 * of.ar6 * (theta_dot[0] - of.os.f_dot);
    tq[1] -= dis.delta2 * p.C2 * of.ar6 * (theta_dot[1] - of.os.f_dot);
    return Vec2(tq[0] / p.C1, tq[1] / p.C2);
}

/// Restoring term F(t, Theta) of the resonant chart Theta_j = 2(theta_j - f):
/// C Theta_ddot + diag(delta) C D(t) Theta_dot + F = 0 with D = (a/r)^6.
inline Vec2 f_theta_chart(const potential::SystemParams& p, const potential::LambdaSet& ls,
                          const OrbitFactors& of, const Vec2& Theta) {
    Vec2 F;
    F[0] = of.ar3 * ls.Lambda1 * std::sin(Theta[0]);
    F[1] = of.ar3 * ls.Lambda2 * std::sin(Theta[1]);
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double s = std::sin(m1 * Theta[0] + m2 * Theta[1]) * ls.coupling(m1, m2);
        F[0] += of.ar5 * m1 * s;
        F[1] += of.ar5 * m2 * s;
    }
    F[0] += 2.0 * of.os.f_ddot * p.C1;
    F[1] += 2.0 * of.os.f_ddot * p.C2;
    return F;
}

inline Vec2 f_theta_chart(const potential::SystemParams& p, const potential::LambdaSet& ls,
                          double t, const Vec2& Theta) {
    return f_theta_chart(p, ls, OrbitFactors(p, t), Theta);
}

/// Accelerations in the resonant chart.
inline Vec2 rhs_Theta_chart(const potential::SystemParams& p, const potential::LambdaSet& ls,
                            const Dissipation& dis, const OrbitFactors& of, const Vec2& Theta,
                            const Vec2& Theta_dot) {
    const Vec2 F = f_theta_chart(p, ls, of, Theta);
    return Vec2(-dis.delta1 * of.ar6 * Theta_dot[0] - F[0] / p.C1,
                -dis.delta2 * of.ar6 * Theta_dot[1] - F[1] / p.C2);
}

inline Vec2 rhs_Theta_chart(const potential::SystemParams& p, const potential::LambdaSet& ls,
                            const Dissipation& dis, double t, const Vec2& Theta,
                            const Vec2& Theta_dot) {
    return rhs_Theta_chart(p, ls, dis, OrbitFactors(p, t), Theta, Theta_dot);
}

/// Symmetrized Jacobian A~(t, Theta) = C^{-1/2} dF/dTheta C^{-1/2}, built
/// directly from its symmetric form.
inline Mat2 jacobian_A(const potential::SystemParams& p, const potential::LambdaSet& ls,
                       const OrbitFactors& of, const Vec2& Theta) {
    const double root12 = std::sqrt(p.C1 * p.C2);
    Mat2 A;
    A(0, 0) = of.ar3 * ls.Lambda1 / p.C1 * std::cos(Theta[0]);
    A(1, 1) = of.ar3 * ls.Lambda2 / p.C2 * std::cos(Theta[1]);
    A(0, 1) = A(1, 0) = 0.0;
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double c = std::cos(m1 * Theta[0] + m2 * Theta[1]) * ls.coupling(m1, m2);
        A(0, 0) += of.ar5 * m1 * m1 / p.C1 * c;
        A(1, 1) += of.ar5 * m2 * m2 / p.C2 * c;
        const double off = of.ar5 * m1 * m2 / root12 * c;
        A(0, 1) += off;
        A(1, 0) += off;
    }
    return A;
}

inline Mat2 jacobian_A(const potential::SystemParams& p, const potential::LambdaSet& ls,
                       double t, const Vec2& Theta) {
    return jacobian_A(p, ls, OrbitFactors(p, t), Theta);
}

/// Unscaled Jacobian dF/dTheta = C^{1/2} A~ C^{1/2}.
inline Mat2 df_dTheta(const potential::SystemParams& p, const potential::LambdaSet& ls,
                      const OrbitFactors& of, const Vec2& Theta) {
    const Mat2 A = jacobian_A(p, ls, of, Theta);
    const double s1 = std::sqrt(p.C1), s2 = std::sqrt(p.C2);
    Mat2 J;
    J(0, 0) = A(0, 0) * p.C1;
    J(0, 1) = A(0, 1) * s1 * s2;
    J(1, 0) = A(1, 0) * s1 * s2;
    J(1, 1) = A(1, 1) * p.C2;
    return J;
}

inline Mat2 df_dTheta(const potential::SystemParams& p, const potential::LambdaSet& ls,
                      double t, const Vec2& Theta) {
    return df_dTheta(p, ls, OrbitFactors(p, t), Theta);
}

/// Hamiltonian of the conservative spin dynamics with canonical momenta
/// p_j = C_j theta_dot_j. The time-dependent potential keeps the
/// angle-independent 1/r^5 constant but not the 1/r^3 one.
inline double hamiltonian(const potential::SystemParams& p, const potential::LambdaSet& ls,
                          double t, double theta1, double theta2, double p1, double p2) {
    const OrbitFactors of(p, t);
    const double f = of.os.f;
    double V = -0.25 * of.ar3 *
               (ls.Lambda1 * std::cos(2.0 * theta1 - 2.0 * f) +
                ls.Lambda2 * std::cos(2.0 * theta2 - 2.0 * f));
    double s = 0.0;
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs)
        s += ls.coupling(m1, m2) * std::cos(2.0 * m1 * (theta1 - f) + 2.0 * m2 * (theta2 - f));
    V -= 0.25 * of.ar5 * s;
    return 0.5 * p1 * p1 / p.C1 + 0.5 * p2 * p2 / p.C2 + V;
}

/// Two ellipsoids with free planar orbit and spins: the four-degree model
/// from which the Keplerian spin dynamics is derived by decoupling.
struct FullModel {
    bodies::BodyShape b1, b2;
    double G;  ///< gravitational constant, a_ref^3 in model units
    /// keep only the point-mass term in the orbital equations; the spins
    /// still feel the full truncated potential
    bool keplerian_orbital_part = false;

    FullModel(const bodies::BodyShape& b1, const bodies::BodyShape& b2, double a_ref,
              bool keplerian_orbital_part = false)
        : b1(b1), b2(b2), G(a_ref * a_ref * a_ref),
          keplerian_orbital_part(keplerian_orbital_part) {
        if (!(a_ref > 0.0)) throw DomainError("full model: reference length must be positive");
        if (std::abs(b1.mass + b2.mass - 1.0) > 1e-9 || std::abs(b1.C + b2.C - 1.0) > 1e-9)
            throw InconsistentParametersError(
                "full model: bodies must be in model units (see normalize_pair)");
    }
};

/// State (r, f, theta1, theta2) with velocities.
struct FullState {
    double r, r_dot;
    double f, f_dot;
    double theta1, theta1_dot;
    double theta2, theta2_dot;
};

namespace detail {

/// Gradient of the truncated potential V0 + V2 + V4 in (r, f, theta1,
/// theta2), using the closed-angle form of the 1/r^5 term.
struct PotentialGradient {
    double value;
    double d_r, d_f, d_theta1, d_theta2;
};

inline PotentialGradient potential_gradient(const FullModel& m, double r, double f,
                                            double th1, double th2) {
    if (!(r > 0.0)) throw DomainError("full model: separation collapsed to zero");
    const double M1 = m.b1.mass, M2 = m.b2.mass;
    const double d1 = m.b1.d(), q1 = m.b1.q(), d2 = m.b2.d(), q2 = m.b2.q();
    const double G = m.G;
    const double r3 = r * r * r, r5 = r3 * r * r;

    const double c1 = std::cos(2.0 * (th1 - f)), s1 = std::sin(2.0 * (th1 - f));
    const double c2 = std::cos(2.0 * (th2 - f)), s2 = std::sin(2.0 * (th2 - f));
    const double c11 = std::cos(4.0 * (th1 - f)), s11 = std::sin(4.0 * (th1 - f));
    const double c22 = std::cos(4.0 * (th2 - f)), s22 = std::sin(4.0 * (th2 - f));
    const double cd = std::cos(2.0 * (th1 - th2)), sd = std::sin(2.0 * (th1 - th2));
    const double cs = std::cos(2.0 * th1 + 2.0 * th2 - 4.0 * f);
    const double ss = std::sin(2.0 * th1 + 2.0 * th2 - 4.0 * f);

    const double V0 = -G * M1 * M2 / r;

    const double k2 = -G / 4.0 * (M2 * (q1 + 3.0 * d1 * c1) + M1 * (q2 + 3.0 * d2 * c2));
    const double V2 = k2 / r3;
    const double V2_th1 = G / (4.0 * r3) * M2 * 6.0 * d1 * s1;
    const double V2_th2 = G / (4.0 * r3) * M1 * 6.0 * d2 * s2;

    const double kconst = 12.0 * q1 * q2 +
                          (15.0 / 7.0) * (M2 / M1 * d1 * d1 + 2.0 * M2 / M1 * q1 * q1 +
                                          M1 / M2 * d2 * d2 + 2.0 * M1 / M2 * q2 * q2);
    const double kA = d1 * M2 * (20.0 * q2 / M2 + (100.0 / 7.0) * q1 / M1);
    const double kB = 25.0 * d1 * d1 * M2 / M1;
    const double kC = d2 * M1 * (20.0 * q1 / M1 + (100.0 / 7.0) * q2 / M2);
    const double kD = 25.0 * d2 * d2 * M1 / M2;
    const double kE = 6.0 * d1 * d2;
    const double kF = 70.0 * d1 * d2;
    const double pref = -3.0 * G / 64.0;
    const double k4 =
        pref * (kconst + kA * c1 + kB * c11 + kC * c2 + kD * c22 + kE * cd + kF * cs);
    const double V4 = k4 / r5;
    const double V4_th1 =
        pref / r5 * (-2.0 * kA * s1 - 4.0 * kB * s11 - 2.0 * kE * sd - 2.0 * kF * ss);
    const double V4_th2 =
        pref / r5 * (-2.0 * kC * s2 - 4.0 * kD * s22 + 2.0 * kE * sd - 2.0 * kF * ss);

    PotentialGradient g;
    g.value = V0 + V2 + V4;
    g.d_r = G * M1 * M2 / (r * r) - 3.0 * k2 / (r3 * r) - 5.0 * k4 / (r5 * r);
    g.d_theta1 = V2_th1 + V4_th1;
    g.d_theta2 = V2_th2 + V4_th2;
    // V depends on f only through the differences theta_j - f
    g.d_f = -(g.d_theta1 + g.d_theta2);
    return g;
}

}  // namespace detail

/// Time derivative of the full planar state. When keplerian_orbital_part is
/// set, the orbital pair evolves under the point-mass potential alone and the
/// system reduces to the Keplerian spin dynamics.
inline FullState rhs_full_lagrangian(const FullModel& m, const FullState& st) {
    const auto g = detail::potential_gradient(m, st.r, st.f, st.theta1, st.theta2);
    const double mu = m.b1.mass * m.b2.mass;
    const double dVr =
        m.keplerian_orbital_part ? m.G * m.b1.mass * m.b2.mass / (st.r * st.r) : g.d_r;
    const double dVf = m.keplerian_orbital_part ? 0.0 : g.d_f;

    FullState d;
    d.r = st.r_dot;
    d.r_dot = st.r * st.f_dot * st.f_dot - dVr / mu;
    d.f = st.f_dot;
    d.f_dot = -dVf / (mu * st.r * st.r) - 2.0 * st.r_dot * st.f_dot / st.r;
    d.theta1 = st.theta1_dot;
    d.theta1_dot = -g.d_theta1 / m.b1.C;
    d.theta2 = st.theta2_dot;
    d.theta2_dot = -g.d_theta2 / m.b2.C;
    return d;
}

/// Total energy of the full model (conserved when the orbital part is not
/// forced Keplerian).
inline double full_energy(const FullModel& m, const FullState& st) {
    const auto g = detail::potential_gradient(m, st.r, st.f, st.theta1, st.theta2);
    const double mu = m.b1.mass * m.b2.mass;
    const double T_orb =
        0.5 * mu * (st.r_dot * st.r_dot + st.r * st.r * st.f_dot * st.f_dot);
    const double T_rot = 0.5 * m.b1.C * st.theta1_dot * st.theta1_dot +
                         0.5 * m.b2.C * st.theta2_dot * st.theta2_dot;
    return T_orb + T_rot + g.value;
}

/// Total angular momentum mu r^2 f_dot + C1 theta1_dot + C2 theta2_dot
/// (conserved by rotational invariance).
inline double full_angular_momentum(const FullModel& m, const FullState& st) {
    const double mu = m.b1.mass * m.b2.mass;
    return mu * st.r * st.r * st.f_dot + m.b1.C * st.theta1_dot + m.b2.C * st.theta2_dot;
}

}  // namespace spinlock::dynamics
