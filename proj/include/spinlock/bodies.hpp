#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "spinlock/errors.hpp"

namespace spinlock::bodies {

/// Homogeneous triaxial ellipsoid. Principal moments satisfy A <= B <= C and
/// the triangle inequality A + B >= C; the spin axis is the C axis.
struct BodyShape {
    double mass = 1.0;
    double A = 0.0, B = 0.0, C = 0.0;  ///< principal moments of inertia
    double sa = 0.0, sb = 0.0, sc = 0.0;  ///< semi-axes, sa >= sb >= sc

    double d() const { return B - A; }            ///< equatorial asymmetry
    double q() const { return 2.0 * C - A - B; }  ///< polar flattening
    double mean_radius() const { return std::cbrt(sa * sb * sc); }

    /// Build from mass and principal moments [A, B, C].
    static BodyShape from_moments(double mass, double A, double B, double C) {
        if (!(mass > 0.0)) throw DomainError("body: mass must be positive");
        if (!(A > 0.0 && B > 0.0 && C > 0.0))
            throw DomainError("body: moments of inertia must be positive");
        if (!(A <= B && B <= C))
            throw DomainError("body: moments must be ordered A <= B <= C");
        if (A + B < C)
            throw DomainError("body: moments violate the triangle inequality A + B >= C");
        BodyShape b;
        b.mass = mass;
        b.A = A;
        b.B = B;
        b.C = C;
        // For a homogeneous ellipsoid A = m(sb^2+sc^2)/5 and cyclic, which
        // inverts to sa^2 = 5(-A+B+C)/(2m) and cyclic.
        b.sa = std::sqrt(5.0 * (-A + B + C) / (2.0 * mass));
        b.sb = std::sqrt(5.0 * (A - B + C) / (2.0 * mass));
        b.sc = std::sqrt(5.0 * (A + B - C) / (2.0 * mass));
        return b;
    }

    /// Build from mass and semi-axes [sa, sb, sc].
    static BodyShape from_semi_axes(double mass, double sa, double sb, double sc) {
        if (!(mass > 0.0)) throw DomainError("body: mass must be positive");
        if (!(sc > 0.0)) throw DomainError("body: semi-axes must be positive");
        if (!(sa >= sb && sb >= sc))
            throw DomainError("body: semi-axes must be ordered sa >= sb >= sc");
        BodyShape b;
        b.mass = mass;
        b.sa = sa;
        b.sb = sb;
        b.sc = sc;
        b.A = mass * (sb * sb + sc * sc) / 5.0;
        b.B = mass * (sa * sa + sc * sc) / 5.0;
        b.C = mass * (sa * sa + sb * sb) / 5.0;
        return b;
    }
};

/// Rescale a body pair to model units: total mass 1 and total spin moment
/// of inertia C1 + C2 = 1 (masses scaled jointly, lengths jointly).
inline std::pair<BodyShape, BodyShape> normalize_pair(const BodyShape& b1, const BodyShape& b2) {
    const double msum = b1.mass + b2.mass;
    const double m1 = b1.mass / msum, m2 = b2.mass / msum;
    const double csum = b1.C / msum + b2.C / msum;
    const double ls = 1.0 / std::sqrt(csum);  // length scale
    return {BodyShape::from_semi_axes(m1, b1.sa * ls, b1.sb * ls, b1.sc * ls),
            BodyShape::from_semi_axes(m2, b2.sa * ls, b2.sb * ls, b2.sc * ls)};
}

namespace detail {

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre polynomial with the asymptotic root estimate as the start.
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
    x.assign(n, 0.0);
    w.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

/// Polynomial part of the associated Legendre function: P_{l,m}(x) divided by
/// (1-x^2)^{m/2}, in the convention P_{l,m} = (1-x^2)^{m/2} d^{l+m}/dx^{l+m}
/// (x^2-1)^l / (2^l l!) with no Condon-Shortley sign.
inline double legendre_poly_part(int l, int m, double x) {
    double pmm = 1.0;
    for (int i = 1; i <= m; ++i) pmm *= 2.0 * i - 1.0;
    if (l == m) return pmm;
    double pm1 = x * (2.0 * m + 1.0) * pmm;
    if (l == m + 1) return pm1;
    double p = 0.0;
    for (int ll = m + 2; ll <= l; ++ll) {
        p = (x * (2.0 * ll - 1.0) * pm1 - (ll + m - 1.0) * pmm) / (ll - m);
        pmm = pm1;
        pm1 = p;
    }
    return p;
}

inline double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

}  // namespace detail

/// Closed-form Stokes coefficient of a homogeneous ellipsoid in its body
/// frame, Schmidt semi-normalized. Zero for odd l or odd |m| and for |m| > l;
/// degrees l > 4 have no closed form here and raise UnsupportedDegreeError.
inline double stokes_closed_form(const BodyShape& body, int l, int m) {
    if (l < 0) throw DomainError("stokes: degree l must be nonnegative");
    m = std::abs(m);  // mirror symmetry Z_{l,-m} = Z_{l,m}
    if (m > l) return 0.0;
    if (l % 2 != 0 || m % 2 != 0) return 0.0;
    if (l > 4)
        throw UnsupportedDegreeError(
            l, m, "stokes_closed_form: degree above 4 requires quadrature");
    const double M = body.mass, d = body.d(), q = body.q();
    const double R2 = body.mean_radius() * body.mean_radius();
    if (l == 0) return 1.0;
    if (l == 2) {
        if (m == 0) return -0.5 * q / (M * R2);
        return std::sqrt(3.0 / 8.0) * d / (M * R2);  // m == 2
    }
    const double M2R4 = M * M * R2 * R2;
    if (m == 0) return (15.0 / 56.0) * (d * d + 2.0 * q * q) / M2R4;
    if (m == 2) return -(15.0 / 56.0) * std::sqrt(10.0) * d * q / M2R4;
    return (15.0 / 8.0) * std::sqrt(5.0 / 14.0) * d * d / M2R4;  // m == 4
}

/// Raw unit-ball integral behind the Stokes coefficients, by tensor-product
/// Gauss-Legendre quadrature in spherical coordinates (radius,
/// cos(colatitude), longitude) with `nodes` points per axis. The integrand is
/// the degree-l solid harmonic evaluated at (sa*X, sb*Y, sc*Z). No parity
/// shortcut is applied, so probing odd (l, m) returns the near-zero value the
/// integral actually takes; only 0 <= |m| <= l is required.
inline double stokes_integral(const BodyShape& body, int l, int m, int nodes) {
    if (l < 0) throw DomainError("stokes: degree l must be nonnegative");
    m = std::abs(m);
    if (m > l) throw DomainError("stokes: order |m| must not exceed the degree l");
    if (nodes < 2) throw DomainError("stokes: need at least 2 quadrature nodes per axis");
    const double R = body.mean_radius();

    std::vector<double> x, w;
    detail::gauss_legendre(nodes, x, w);
    double total = 0.0;
    for (int i = 0; i < nodes; ++i) {
        const double s = 0.5 * (x[i] + 1.0);  // radius in [0, 1]
        const double ws = 0.5 * w[i] * s * s;
        for (int j = 0; j < nodes; ++j) {
            const double mu = x[j];  // cos(colatitude)
            const double st = std::sqrt(1.0 - mu * mu);
            for (int p = 0; p < nodes; ++p) {
                const double phi = M_PI * (x[p] + 1.0);
                const double wp = M_PI * w[p];
                const double X = s * st * std::cos(phi);
                const double Y = s * st * std::sin(phi);
                const double Z = s * mu;
                const double v1 = body.sa * X, v2 = body.sb * Y, v3 = body.sc * Z;
                const double vn = std::sqrt(v1 * v1 + v2 * v2 + v3 * v3);
                // real part of (v1 - i v2)^m by repeated multiplication
                double re = 1.0, im = 0.0;
                for (int q = 0; q < m; ++q) {
                    const double re2 = re * v1 + im * v2;
                    im = im * v1 - re * v2;
                    re = re2;
                }
                double radial = 1.0;
                for (int q = 0; q < l - m; ++q) radial *= vn;
                const double leg =
                    detail::legendre_poly_part(l, m, vn > 0.0 ? v3 / vn : 0.0);
                total += ws * w[j] * wp * re * radial * leg;
            }
        }
    }
    double fac = std::sqrt(detail::factorial(l - m) / detail::factorial(l + m));
    double Rl = 1.0;
    for (int q = 0; q < l; ++q) Rl *= R;
    return 3.0 / (4.0 * M_PI * Rl) * fac * total;
}

/// Stokes coefficient from stokes_integral, doubling the per-axis node count
/// from 24 until two successive evaluations agree to 1e-12 relative, with a
/// 1e-14 absolute floor so coefficients that vanish (degenerate shapes)
/// converge onto quadrature noise. Odd degrees or orders return exactly 0
/// (the integral vanishes by the parity of the ellipsoid); any even degree is
/// supported, unlike the closed forms.
inline double stokes_quadrature(const BodyShape& body, int l, int m) {
    if (l < 0) throw DomainError("stokes: degree l must be nonnegative");
    m = std::abs(m);
    if (m > l) return 0.0;
    if (l % 2 != 0 || m % 2 != 0) return 0.0;

    int nodes = 24;
    double prev = stokes_integral(body, l, m, nodes);
    for (int round = 0; round < 4; ++round) {
        nodes *= 2;
        const double next = stokes_integral(body, l, m, nodes);
        if (std::abs(next - prev) <= 1e-12 * std::abs(next) + 1e-14) return next;
        prev = next;
    }
    throw NoConvergenceError("stokes_quadrature: node doubling did not converge",
                             std::abs(prev));
}

/// Physical-unit scales of a binary: orbital period, total mass, total spin
/// moment of inertia. Model units make these 2*pi, 1 and 1.
struct UnitSystem {
    double period;         ///< orbital period in physical units
    double total_mass;     ///< M1 + M2 in physical units
    double total_inertia;  ///< C1 + C2 in physical units

    UnitSystem(double period, double total_mass, double total_inertia)
        : period(period), total_mass(total_mass), total_inertia(total_inertia) {
        if (!(period > 0.0 && total_mass > 0.0 && total_inertia > 0.0))
            throw DomainError("units: period, total mass and total inertia must be positive");
    }
};

enum class Unit { Time, Mass, Length, MomentOfInertia };

/// Quantity tagged with its dimension, for unit conversion.
struct Quantity {
    double value;
    Unit unit;
};

/// Convert a physical quantity to model units.
inline Quantity to_model_units(const UnitSystem& us, const Quantity& qt) {
    switch (qt.unit) {
        case Unit::Time:
            return {qt.value * 2.0 * M_PI / us.period, qt.unit};
        case Unit::Mass:
            return {qt.value / us.total_mass, qt.unit};
        case Unit::Length:
            return {qt.value * std::sqrt(us.total_mass / us.total_inertia), qt.unit};
        case Unit::MomentOfInertia:
            return {qt.value / us.total_inertia, qt.unit};
    }
    throw DomainError("to_model_units: unknown unit tag");
}

/// Convert a model-unit quantity back to physical units.
inline Quantity from_model_units(const UnitSystem& us, const Quantity& qt) {
    switch (qt.unit) {
        case Unit::Time:
            return {qt.value * us.period / (2.0 * M_PI), qt.unit};
        case Unit::Mass:
            return {qt.value * us.total_mass, qt.unit};
        case Unit::Length:
            return {qt.value / std::sqrt(us.total_mass / us.total_inertia), qt.unit};
        case Unit::MomentOfInertia:
            return {qt.value * us.total_inertia, qt.unit};
    }
    throw DomainError("from_model_units: unknown unit tag");
}

}  // namespace spinlock::bodies
