#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "spinlock/potential.hpp"

namespace spinlock::conditions {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

/// Weighted sums of the coupling family over the index set Xi that enter all
/// analytic estimates:
///   s1_j  = sum m_j^2 / C_j * L(m1, m2)
///   s2    = sum |m1 m2| / sqrt(C1 C2) * L(m1, m2)
///   s3_j  = sum |m_j| / C_j * L(m1, m2)
///   s_max = sum max{|m1|/C1, |m2|/C2} * L(m1, m2)
struct XiSums {
    double s1_1, s1_2, s2, s3_1, s3_2, s_max;
};

/// Direct summation over the 13 index pairs.
inline XiSums xi_index_sums(const potential::SystemParams& p,
                            const potential::LambdaSet& ls) {
    XiSums s{0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    const double root12 = std::sqrt(p.C1 * p.C2);
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double L = ls.coupling(m1, m2);
        s.s1_1 += m1 * m1 / p.C1 * L;
        s.s1_2 += m2 * m2 / p.C2 * L;
        s.s2 += std::abs(m1 * m2) / root12 * L;
        s.s3_1 += std::abs(m1) / p.C1 * L;
        s.s3_2 += std::abs(m2) / p.C2 * L;
        s.s_max += std::max(std::abs(m1) / p.C1, std::abs(m2) / p.C2) * L;
    }
    return s;
}

/// The sums with a per-index weight, written in the shape parameters
/// (lambda_j, dhat_j, qhat_j); an independent route used to cross-check
/// xi_index_sums. The per-pair maximum s_max has no such closed form and is
/// left NaN here.
inline XiSums xi_closed_form_sums(const potential::SystemParams& p) {
    XiSums s;
    s.s_max = std::numeric_limits<double>::quiet_NaN();
    s.s1_1 = p.lambda1 * (25.0 / 4.0 * p.dhat1 + 25.0 / 28.0 * p.qhat1 +
                          19.0 / 4.0 * p.dhat2 + 5.0 / 4.0 * p.qhat2);
    s.s1_2 = p.lambda2 * (25.0 / 4.0 * p.dhat2 + 25.0 / 28.0 * p.qhat2 +
                          19.0 / 4.0 * p.dhat1 + 5.0 / 4.0 * p.qhat1);
    s.s2 = 19.0 / 4.0 * std::sqrt(p.C1 / p.C2) * p.lambda1 * p.dhat2;
    s.s3_1 = p.lambda1 * (25.0 / 8.0 * p.dhat1 + 25.0 / 28.0 * p.qhat1 +
                          19.0 / 4.0 * p.dhat2 + 5.0 / 4.0 * p.qhat2);
    s.s3_2 = p.lambda2 * (25.0 / 8.0 * p.dhat2 + 25.0 / 28.0 * p.qhat2 +
                          19.0 / 4.0 * p.dhat1 + 5.0 / 4.0 * p.qhat1);
    return s;
}

/// Coupling strengths alpha_j, defined through
///   alpha_j lambda_j = (1-e)^{-2} sum (m_j^2/C_j + |m1 m2|/sqrt(C1 C2)) L.
/// The products alpha_j lambda_j are always finite; alpha_j itself is
/// +infinity for a degenerate body with lambda_j = 0.
struct AlphaResult {
    double alpha_lambda1, alpha_lambda2;
    double alpha1, alpha2;
};

inline AlphaResult compute_alpha(const potential::SystemParams& p,
                                 const potential::LambdaSet& ls) {
    const XiSums s = xi_index_sums(p, ls);
    const double om = 1.0 - p.e;
    AlphaResult a;
    a.alpha_lambda1 = (s.s1_1 + s.s2) / (om * om);
    a.alpha_lambda2 = (s.s1_2 + s.s2) / (om * om);
    constexpr double inf = std::numeric_limits<double>::infinity();
    a.alpha1 = p.lambda1 > 0.0 ? a.alpha_lambda1 / p.lambda1
                               : (a.alpha_lambda1 > 0.0 ? inf : 0.0);
    a.alpha2 = p.lambda2 > 0.0 ? a.alpha_lambda2 / p.lambda2
                               : (a.alpha_lambda2 > 0.0 ? inf : 0.0);
    return a;
}

/// Sufficient condition for existence and uniqueness of the small odd
/// periodic solution: 1 > (1-e)^{-3} max_j lambda_j (1 + alpha_j).
struct UniquenessResult {
    bool holds;
    double margin;  ///< 1 - rhs; positive iff the condition holds
    double rhs;
    AlphaResult alpha;
};

inline UniquenessResult check_uniqueness(const potential::SystemParams& p,
                                         const potential::LambdaSet& ls) {
    UniquenessResult r;
    r.alpha = compute_alpha(p, ls);
    const double om3 = std::pow(1.0 - p.e, 3);
    r.rhs = std::max(p.lambda1 + r.alpha.alpha_lambda1,
                     p.lambda2 + r.alpha.alpha_lambda2) /
            om3;
    r.margin = 1.0 - r.rhs;
    r.holds = r.margin > 0.0;
    return r;
}

/// A priori bound M on ||C^{-1} F|| along solutions; controls the amplitude
/// bounds |Theta_j| <= 2 pi^2 M and |Theta_dot_j| <= 2 pi M.
inline double m_bound(const potential::SystemParams& p, const potential::LambdaSet& ls) {
    const XiSums s = xi_index_sums(p, ls);
    const double om = 1.0 - p.e;
    const double om3 = om * om * om, om4 = om3 * om, om5 = om4 * om;
    return std::max(p.lambda1, p.lambda2) / om3 + s.s_max / om5 +
           4.0 * p.e * std::sqrt(1.0 - p.e * p.e) / om4;
}

/// Sufficient conditions for strong linear stability of the small periodic
/// solution. The third test is only meaningful when the second holds (it
/// needs cos(2 pi^2 M) evaluated inside the first quarter period); when the
/// second fails, est3 is reported false with margin -infinity.
struct LinearStabilityResult {
    bool est1, est2, est3;
    bool all;
    double margin1;  ///< 1/pi^2 - trace-type sum
    double margin2;  ///< 1/(4 pi) - M
    double margin3;  ///< cos(2 pi^2 M) min lambda_j - max alpha_j lambda_j
    double m;        ///< the bound M
};

inline LinearStabilityResult check_linear_stability(const potential::SystemParams& p,
                                                    const potential::LambdaSet& ls) {
    const XiSums s = xi_index_sums(p, ls);
    const AlphaResult a = compute_alpha(p, ls);
    const double om = 1.0 - p.e;
    const double om3 = om * om * om, om5 = om3 * om * om;
    constexpr double pi = 3.14159265358979323846;

    LinearStabilityResult r;
    r.margin1 = 1.0 / (pi * pi) - ((p.lambda1 + p.lambda2) / om3 + (s.s1_1 + s.s1_2) / om5);
    r.est1 = r.margin1 > 0.0;

    r.m = m_bound(p, ls);
    r.margin2 = 1.0 / (4.0 * pi) - r.m;
    r.est2 = r.margin2 > 0.0;

    if (r.est2) {
        r.margin3 = std::cos(2.0 * pi * pi * r.m) * std::min(p.lambda1, p.lambda2) -
                    std::max(a.alpha_lambda1, a.alpha_lambda2);
        r.est3 = r.margin3 > 0.0;
    } else {
        r.margin3 = -std::numeric_limits<double>::infinity();
        r.est3 = false;
    }
    r.all = r.est1 && r.est2 && r.est3;
    return r;
}

/// Constant stiffness matrix of the circular-orbit equilibrium Theta = 0,
///   A = diag(lambda_1, lambda_2)
///     + sum [[m1^2/C1, m1 m2/sqrt(C1 C2)], [., m2^2/C2]] L(m1, m2).
inline Mat2 constant_matrix_A(const potential::SystemParams& p,
                              const potential::LambdaSet& ls) {
    Mat2 A;
    A(0, 0) = p.lambda1;
    A(1, 1) = p.lambda2;
    A(0, 1) = A(1, 0) = 0.0;
    const double root12 = std::sqrt(p.C1 * p.C2);
    for (const auto& [m1, m2] : potential::LambdaSet::xi_pairs) {
        const double L = ls.coupling(m1, m2);
        A(0, 0) += m1 * m1 / p.C1 * L;
        A(1, 1) += m2 * m2 / p.C2 * L;
        A(0, 1) += m1 * m2 / root12 * L;
    }
    A(1, 0) = A(0, 1);
    return A;
}

/// First-order matrix of the damped circular-orbit linearization
/// y_ddot + diag(delta) y_dot + A y = 0.
inline Mat4 linearized_matrix_circular(const potential::SystemParams& p,
                                       const potential::LambdaSet& ls, double delta1,
                                       double delta2) {
    const Mat2 A = constant_matrix_A(p, ls);
    Mat4 B = Mat4::Zero();
    B(0, 2) = B(1, 3) = 1.0;
    B.block<2, 2>(2, 0) = -A;
    B(2, 2) = -delta1;
    B(3, 3) = -delta2;
    return B;
}

/// Routh-Hurwitz test for asymptotic stability of the circular-orbit
/// equilibrium under damping. The characteristic polynomial of the damped
/// linearization is
///   w^4 + (d1+d2) w^3 + (xi1+xi2+d1 d2) w^2 + (xi1 d2 + xi2 d1) w + det A,
/// and stability holds iff the four Hurwitz determinants are positive.
struct RouthHurwitzResult {
    double xi1, xi2, sigma;
    double det_A;
    double D1, D2, D3, D4;
    bool asymptotically_stable;
};

inline RouthHurwitzResult routh_hurwitz(const potential::SystemParams& p,
                                        const potential::LambdaSet& ls, double delta1,
                                        double delta2) {
    if (delta1 < 0.0 || delta2 < 0.0)
        throw DomainError("friction coefficients must be non-negative");
    const Mat2 A = constant_matrix_A(p, ls);
    RouthHurwitzResult r;
    r.xi1 = A(0, 0);
    r.xi2 = A(1, 1);
    r.sigma = A(0, 1);
    r.det_A = r.xi1 * r.xi2 - r.sigma * r.sigma;
    const double a3 = r.xi1 * delta2 + r.xi2 * delta1;
    r.D1 = delta1 + delta2;
    r.D2 = delta1 * delta1 * delta2 + delta2 * delta2 * delta1 + r.xi1 * delta1 +
           r.xi2 * delta2;
    r.D3 = r.D1 * r.D1 * r.sigma * r.sigma +
           delta1 * delta2 * (r.D1 * a3 + (r.xi1 - r.xi2) * (r.xi1 - r.xi2));
    r.D4 = r.D3 * r.det_A;
    r.asymptotically_stable = r.D1 > 0.0 && r.D2 > 0.0 && r.D3 > 0.0 && r.D4 > 0.0;
    return r;
}

}  // namespace spinlock::conditions
