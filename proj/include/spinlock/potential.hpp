#pragma once

#include <array>
#include <cmath>
#include <functional>

#include "spinlock/bodies.hpp"
#include "spinlock/errors.hpp"
#include "spinlock/kepler.hpp"

namespace spinlock::potential {

/// Parameters of the planar two-ellipsoid system in model units
/// (M1 + M2 = 1, C1 + C2 = 1, orbital period 2*pi, G = a^3).
///
/// The independent set is (e, a, C1, lambda1, lambda2, dhat1, qhat1); the
/// remaining quantities follow from the coupling identities
/// Lambda1*dhat2 = Lambda2*dhat1 and Lambda1*qhat2 = Lambda2*qhat1 and from
/// the mass equation mu = M1*M2 = Lambda1/(3*dhat1*a^2). Construction from
/// a pair of ellipsoids keeps the bodies' own dhat2/qhat2 instead.
struct SystemParams {
    double e = 0.0;        ///< orbital eccentricity
    double a = 1.0;        ///< semi-major axis
    double C1 = 0.5;       ///< spin moment of inertia of body 1; C2 = 1 - C1
    double C2 = 0.5;
    double lambda1 = 0.0;  ///< Lambda1 / C1
    double lambda2 = 0.0;  ///< Lambda2 / C2
    double dhat1 = 0.0, qhat1 = 0.0;  ///< d1/(M1 a^2), q1/(M1 a^2)
    double dhat2 = 0.0, qhat2 = 0.0;
    double M1 = 0.5, M2 = 0.5;  ///< masses; defaults used when undetermined

    double Lambda1() const { return lambda1 * C1; }
    double Lambda2() const { return lambda2 * C2; }
    double d1() const { return dhat1 * M1 * a * a; }
    double d2() const { return dhat2 * M2 * a * a; }
    double q1() const { return qhat1 * M1 * a * a; }
    double q2() const { return qhat2 * M2 * a * a; }

    /// Build from the independent parameter set. When dhat1 = 0 the coupled
    /// terms vanish and the masses are undetermined; they default to 1/2 and
    /// dhat2/qhat2 are copied so that degenerate systems stay well formed.
    static SystemParams from_parameters(double e, double a, double C1, double lambda1,
                                        double lambda2, double dhat1, double qhat1) {
        if (!(e >= 0.0 && e < 1.0)) throw DomainError("params: eccentricity must lie in [0,1)");
        if (!(a > 0.0)) throw DomainError("params: semi-major axis must be positive");
        if (!(C1 > 0.0 && C1 < 1.0)) throw DomainError("params: C1 must lie in (0,1)");
        if (lambda1 < 0.0 || lambda2 < 0.0 || dhat1 < 0.0 || qhat1 < 0.0)
            throw DomainError("params: lambda_j, dhat1, qhat1 must be nonnegative");
        if (lambda1 >= 3.0 || lambda2 >= 3.0)
            throw DomainError("params: lambda_j = Lambda_j/C_j must stay below 3");
        if (qhat1 < dhat1)
            throw DomainError("params: ordered moments A <= B <= C require qhat1 >= dhat1");
        if (dhat1 > 0.0 && lambda1 == 0.0)
            throw InconsistentParametersError(
                "params: dhat1 > 0 implies d1 > 0 and hence lambda1 > 0");
        SystemParams p;
        p.e = e;
        p.a = a;
        p.C1 = C1;
        p.C2 = 1.0 - C1;
        p.lambda1 = lambda1;
        p.lambda2 = lambda2;
        p.dhat1 = dhat1;
        p.qhat1 = qhat1;
        const double L1 = p.Lambda1(), L2 = p.Lambda2();
        if (dhat1 > 0.0 && L1 > 0.0) {
            p.dhat2 = dhat1 * L2 / L1;
            p.qhat2 = qhat1 * L2 / L1;
            const double mu = L1 / (3.0 * dhat1 * a * a);  // = M1*M2
            if (mu > 0.25 * (1.0 + 1e-12))
                throw InconsistentParametersError(
                    "params: Lambda1/(3*dhat1*a^2) exceeds 1/4, no mass split exists");
            const double disc = std::sqrt(std::max(0.0, 1.0 - 4.0 * mu));
            // the body with the larger spin moment of inertia gets the
            // larger mass
            p.M1 = C1 >= p.C2 ? 0.5 * (1.0 + disc) : 0.5 * (1.0 - disc);
            p.M2 = 1.0 - p.M1;
        } else {
            // Decoupled limit (a -> infinity at fixed Lambda_j): the hats and
            // the mass split are undetermined, so mirror body 1 and leave the
            // default masses. All 1/r^5 couplings then follow from the hats.
            p.dhat2 = dhat1;
            p.qhat2 = qhat1;
        }
        return p;
    }

    /// Build from two ellipsoids on a fixed orbit. The bodies must already be
    /// in model units (masses summing to 1, spin moments summing to 1).
    static SystemParams from_bodies(const kepler::Orbit& orbit, const bodies::BodyShape& b1,
                                    const bodies::BodyShape& b2) {
        if (std::abs(b1.mass + b2.mass - 1.0) > 1e-9)
            throw InconsistentParametersError(
                "params: masses must sum to 1 in model units (see normalize_pair)");
        if (std::abs(b1.C + b2.C - 1.0) > 1e-9)
            throw InconsistentParametersError(
                "params: spin moments must sum to 1 in model units (see normalize_pair)");
        SystemParams p;
        p.e = orbit.e;
        p.a = orbit.a;
        p.C1 = b1.C;
        p.C2 = b2.C;
        p.M1 = b1.mass;
        p.M2 = b2.mass;
        const double a2 = orbit.a * orbit.a;
        p.dhat1 = b1.d() / (b1.mass * a2);
        p.qhat1 = b1.q() / (b1.mass * a2);
        p.dhat2 = b2.d() / (b2.mass * a2);
        p.qhat2 = b2.q() / (b2.mass * a2);
        p.lambda1 = 3.0 * b1.d() * b2.mass / b1.C;
        p.lambda2 = 3.0 * b2.d() * b1.mass / b2.C;
        return p;
    }
};

/// Coupling coefficients of the truncated potential. The first-order pair
/// (Lambda1, Lambda2) drives the pendulum terms; the index set
/// Xi = {|m1| + |m2| <= 2} collects the second-order couplings, with the
/// (0,0) slot holding the angle-independent constant of the 1/r^5 term.
/// Lambda0 is the angle-independent constant of the 1/r^3 term.
struct LambdaSet {
    double Lambda0 = 0.0;
    double Lambda1 = 0.0, Lambda2 = 0.0;

    /// Member pairs of Xi, the (0,0) entry first.
    static constexpr std::array<std::array<int, 2>, 13> xi_pairs = {{{0, 0},
                                                                     {1, 0},
                                                                     {-1, 0},
                                                                     {0, 1},
                                                                     {0, -1},
                                                                     {2, 0},
                                                                     {-2, 0},
                                                                     {0, 2},
                                                                     {0, -2},
                                                                     {1, 1},
                                                                     {-1, -1},
                                                                     {1, -1},
                                                                     {-1, 1}}};

    static bool in_xi(int m1, int m2) { return std::abs(m1) + std::abs(m2) <= 2; }

    double coupling(int m1, int m2) const {
        if (!in_xi(m1, m2)) throw DomainError("lambda set: index outside Xi");
        return xi_[(m1 + 2) * 5 + (m2 + 2)];
    }
    double& coupling(int m1, int m2) {
        if (!in_xi(m1, m2)) throw DomainError("lambda set: index outside Xi");
        return xi_[(m1 + 2) * 5 + (m2 + 2)];
    }

private:
    std::array<double, 25> xi_{};  // dense (m1+2)*5+(m2+2) table over Xi
};

/// Assemble the coupling coefficients from the system parameters.
inline LambdaSet build_lambda_set(const SystemParams& p) {
    LambdaSet ls;
    const double L1 = p.Lambda1(), L2 = p.Lambda2();
    ls.Lambda1 = L1;
    ls.Lambda2 = L2;
    ls.Lambda0 = p.q1() * p.M2 + p.q2() * p.M1;
    ls.coupling(1, 0) = ls.coupling(-1, 0) = (5.0 / 56.0) * (7.0 * p.qhat2 + 5.0 * p.qhat1) * L1;
    ls.coupling(0, 1) = ls.coupling(0, -1) = (5.0 / 56.0) * (7.0 * p.qhat1 + 5.0 * p.qhat2) * L2;
    ls.coupling(2, 0) = ls.coupling(-2, 0) = (25.0 / 32.0) * p.dhat1 * L1;
    ls.coupling(0, 2) = ls.coupling(0, -2) = (25.0 / 32.0) * p.dhat2 * L2;
    // Lambda1*dhat2 = Lambda2*dhat1 = 3 d1 d2 / a^2 holds for any body pair,
    // so either side serves; the mean keeps both construction paths exact.
    const double cross = 0.5 * (p.dhat1 * L2 + p.dhat2 * L1);
    ls.coupling(1, 1) = ls.coupling(-1, -1) = (35.0 / 16.0) * cross;
    ls.coupling(1, -1) = ls.coupling(-1, 1) = (3.0 / 16.0) * cross;
    ls.coupling(0, 0) =
        (9.0 / 4.0) * p.qhat1 * p.q2() * p.M1 +
        (15.0 / 112.0) * (L1 * p.dhat1 + 6.0 * p.qhat1 * p.q1() * p.M2 + L2 * p.dhat2 +
                          6.0 * p.qhat2 * p.q2() * p.M1);
    return ls;
}

/// Truncated potential split by multipole order.
struct PotentialValue {
    double V0;     ///< point-mass part, -G M1 M2 / r with G = a^3
    double V2;     ///< 1/r^3 part (spin-orbit)
    double V4;     ///< 1/r^5 part (spin-spin)
    double total;  ///< V0 + V2 + V4
};

/// Evaluate the truncated potential at time t and spin angles theta1, theta2.
inline PotentialValue eval_potential(const SystemParams& p, const LambdaSet& ls, double t,
                                     double theta1, double theta2) {
    const auto os = kepler::orbit_state(kepler::Orbit(p.a, p.e), t);
    const double ar = p.a / os.r;
    const double ar3 = ar * ar * ar, ar5 = ar3 * ar * ar;
    PotentialValue v;
    v.V0 = -p.a * p.a * p.a * p.M1 * p.M2 / os.r;
    v.V2 = -0.25 * ar3 *
           (ls.Lambda0 + ls.Lambda1 * std::cos(2.0 * theta1 - 2.0 * os.f) +
            ls.Lambda2 * std::cos(2.0 * theta2 - 2.0 * os.f));
    double s = 0.0;
    for (const auto& [m1, m2] : LambdaSet::xi_pairs)
        s += ls.coupling(m1, m2) *
             std::cos(2.0 * m1 * (theta1 - os.f) + 2.0 * m2 * (theta2 - os.f));
    v.V4 = -0.25 * ar5 * s;
    v.total = v.V0 + v.V2 + v.V4;
    return v;
}

namespace detail {

/// Normalization constant of the product of two even solid harmonics in the
/// planar expansion. l = l1 + l2 and m = m1 + m2 refer to the half-degrees.
inline double gamma_coefficient(int l1, int m1, int l2, int m2) {
    using bodies::detail::factorial;
    const int l = l1 + l2, m = m1 + m2;
    const double num = factorial(2 * (l - m)) * factorial(2 * (l + m));
    double four_l = 1.0;
    for (int i = 0; i < l; ++i) four_l *= 4.0;
    const double den =
        four_l * std::sqrt(factorial(2 * (l1 - m1)) * factorial(2 * (l1 + m1)) *
                           factorial(2 * (l2 - m2)) * factorial(2 * (l2 + m2)));
    const double sign = (l - m) % 2 == 0 ? 1.0 : -1.0;
    return sign * num / (den * factorial(l - m) * factorial(l + m));
}

}  // namespace detail

/// Evaluate the untruncated planar potential of two ellipsoids at separation
/// r, true anomaly f and spin angles theta1, theta2, keeping every harmonic
/// pair with combined degree 2*(l1+l2) <= max_degree. G is the gravitational
/// constant of the surrounding model (a^3 in model units).
///
/// Degrees up to 4 per body use the closed-form Stokes coefficients; higher
/// degrees require use_quadrature = true, otherwise UnsupportedDegreeError.
inline double eval_potential_full(const bodies::BodyShape& b1, const bodies::BodyShape& b2,
                                  double G, double r, double f, double theta1, double theta2,
                                  int max_degree = 4, bool use_quadrature = false) {
    if (!(r > 0.0)) throw DomainError("eval_potential_full: separation must be positive");
    if (max_degree < 0 || max_degree % 2 != 0)
        throw DomainError("eval_potential_full: max_degree must be even and nonnegative");
    const int L = max_degree / 2;

    auto stokes = [&](const bodies::BodyShape& b, int l, int m) {
        if (l <= 4 && !use_quadrature) return bodies::stokes_closed_form(b, l, m);
        if (!use_quadrature)
            throw UnsupportedDegreeError(
                l, m, "eval_potential_full: degree above 4 requires use_quadrature");
        return bodies::stokes_quadrature(b, l, m);
    };

    const double R1 = b1.mean_radius(), R2 = b2.mean_radius();
    double total = 0.0;
    for (int l1 = 0; l1 <= L; ++l1) {
        for (int l2 = 0; l2 + l1 <= L; ++l2) {
            double pow1 = 1.0, pow2 = 1.0;
            for (int i = 0; i < 2 * l1; ++i) pow1 *= R1 / r;
            for (int i = 0; i < 2 * l2; ++i) pow2 *= R2 / r;
            for (int m1 = -l1; m1 <= l1; ++m1) {
                const double z1 = stokes(b1, 2 * l1, 2 * m1);
                if (z1 == 0.0) continue;
                for (int m2 = -l2; m2 <= l2; ++m2) {
                    const double z2 = stokes(b2, 2 * l2, 2 * m2);
                    if (z2 == 0.0) continue;
                    total += detail::gamma_coefficient(l1, m1, l2, m2) * pow1 * pow2 * z1 *
                             z2 *
                             std::cos(2.0 * m1 * (theta1 - f) + 2.0 * m2 * (theta2 - f));
                }
            }
        }
    }
    return -G * b1.mass * b2.mass / r * total;
}

}  // namespace spinlock::potential
