#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "spinlock/errors.hpp"

namespace spinlock::integrate {

struct IntegratorConfig {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double max_step = 0.0;       ///< 0 = no restriction
    std::int64_t max_steps = 2'000'000;
    double initial_step = 0.0;   ///< 0 = automatic
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                        a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// b - bhat, the embedded error weights
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// weights of the extra interpolation polynomial term
inline constexpr double d1 = -12715105075.0 / 11282082432.0,
                        d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0,
                        d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace detail

/// One accepted step with its quartic interpolation polynomial.
template <int N>
struct DenseStep {
    using Vec = Eigen::Matrix<double, N, 1>;
    double t0, h;
    std::array<Vec, 5> r;

    /// Solution value at t in [t0, t0 + h].
    Vec eval(double t) const {
        const double th = (t - t0) / h, th1 = 1.0 - th;
        return r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
    }
};

/// Continuous solution on [t_begin, t_end]; evaluation is a binary search
/// over the accepted steps.
template <int N>
class Trajectory {
  public:
    using Vec = Eigen::Matrix<double, N, 1>;

    Trajectory() = default;
    Trajectory(std::vector<DenseStep<N>> steps, double t_end)
        : steps_(std::move(steps)), t_end_(t_end) {}

    double t_begin() const { return steps_.empty() ? t_end_ : steps_.front().t0; }
    double t_end() const { return t_end_; }
    const std::vector<DenseStep<N>>& steps() const { return steps_; }

    Vec operator()(double t) const {
        const double slack = 1e-9 * (1.0 + std::abs(t_begin()) + std::abs(t_end_));
        if (steps_.empty() || t < t_begin() - slack || t > t_end_ + slack)
            throw DomainError("trajectory evaluated outside its time span");
        t = std::clamp(t, t_begin(), t_end_);
        // last step whose start lies at or before t
        auto it = std::upper_bound(steps_.begin(), steps_.end(), t,
                                   [](double v, const DenseStep<N>& s) { return v < s.t0; });
        if (it != steps_.begin()) --it;
        return it->eval(t);
    }

  private:
    std::vector<DenseStep<N>> steps_;
    double t_end_ = 0.0;
};

namespace detail {

template <int N, class RHS>
class Dopri5 {
  public:
    using Vec = Eigen::Matrix<double, N, 1>;

    Dopri5(RHS& f, const IntegratorConfig& cfg) : f_(f), cfg_(cfg) {}

    /// Advance from (t0, y0) to t1 > t0. If `store` is non-null, every
    /// accepted step's interpolant is appended to it.
    Vec run(double t0, Vec y0, double t1, std::vector<DenseStep<N>>* store) {
        if (!(t1 > t0)) throw DomainError("integration span must be forward and nonempty");
        if (!(cfg_.abs_tol > 0.0 && cfg_.abs_tol <= 1e-3) ||
            !(cfg_.rel_tol > 0.0 && cfg_.rel_tol <= 1e-3))
            throw DomainError("integrator tolerances must lie in (0, 1e-3]");
        const double span = t1 - t0;
        double hmax = cfg_.max_step > 0.0 ? std::min(cfg_.max_step, span) : span;
        double t = t0;
        Vec y = y0;
        Vec k1 = f_(t, y);
        double h = cfg_.initial_step > 0.0 ? std::min(cfg_.initial_step, hmax)
                                           : initial_step(t, y, k1, hmax);
        std::int64_t steps = 0;
        bool rejected = false;
        while (t < t1) {
            if (++steps > cfg_.max_steps)
                throw StiffnessError("integrator exceeded the step budget", t, h);
            if (!(h > std::abs(t) * 1e-15 + 1e-300))
                throw StiffnessError("integrator step size underflow", t, h);
            const bool last = t + h >= t1;
            if (last) h = t1 - t;

            const Vec k2 = f_(t + c2 * h, y + h * (a21 * k1));
            const Vec k3 = f_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
            const Vec k4 = f_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
            const Vec k5 =
                f_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Vec k6 = f_(
                t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Vec ynew =
                y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const Vec k7 = f_(t + h, ynew);

            const Vec errv =
                h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    cfg_.abs_tol +
                    cfg_.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double q = errv[i] / sc;
                err += q * q;
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                if (store) {
                    DenseStep<N> s;
                    s.t0 = t;
                    s.h = h;
                    const Vec ydiff = ynew - y;
                    const Vec bspl = h * k1 - ydiff;
                    s.r[0] = y;
                    s.r[1] = ydiff;
                    s.r[2] = bspl;
                    s.r[3] = ydiff - h * k7 - bspl;
                    s.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 +
                                  d7 * k7);
                    store->push_back(std::move(s));
                }
                t = last ? t1 : t + h;
                y = ynew;
                k1 = k7;  // first-same-as-last
                double fac = 0.9 * std::pow(std::max(err, 1e-50), -0.2);
                fac = std::clamp(fac, 0.2, rejected ? 1.0 : 10.0);
                h = std::min(h * fac, hmax);
                rejected = false;
            } else {
                const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
                h *= fac;
                rejected = true;
            }
        }
        return y;
    }

  private:
    double initial_step(double t0, const Vec& y0, const Vec& f0, double hmax) const {
        auto rms = [&](const Vec& v, const Vec& ref) {
            double s = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(ref[i]);
                const double q = v[i] / sc;
                s += q * q;
            }
            return std::sqrt(s / N);
        };
        const double d0 = rms(y0, y0), d1 = rms(f0, y0);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h0 = std::min(h0, hmax);
        const Vec y1 = y0 + h0 * f0;
        const Vec f1 = f_(t0 + h0, y1);
        const double d2 = rms(f1 - f0, y0) / h0;
        double h1;
        if (std::max(d1, d2) <= 1e-15)
            h1 = std::max(1e-6, h0 * 1e-3);
        else
            h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
        return std::min({100.0 * h0, h1, hmax});
    }

    RHS& f_;
    const IntegratorConfig& cfg_;
};

}  // namespace detail

/// Integrate y' = f(t, y) from t0 to t1 > t0 and return only the endpoint.
template <int N, class RHS>
Eigen::Matrix<double, N, 1> integrate_to(RHS&& f, double t0,
                                         const Eigen::Matrix<double, N, 1>& y0, double t1,
                                         const IntegratorConfig& cfg = {}) {
    detail::Dopri5<N, std::remove_reference_t<RHS>> stepper(f, cfg);
    return stepper.run(t0, y0, t1, nullptr);
}

/// Integrate and keep every accepted step's interpolant, giving a
/// continuously evaluable solution on [t0, t1].
template <int N, class RHS>
Trajectory<N> integrate_dense(RHS&& f, double t0, const Eigen::Matrix<double, N, 1>& y0,
                              double t1, const IntegratorConfig& cfg = {}) {
    detail::Dopri5<N, std::remove_reference_t<RHS>> stepper(f, cfg);
    std::vector<DenseStep<N>> steps;
    stepper.run(t0, y0, t1, &steps);
    return Trajectory<N>(std::move(steps), t1);
}

}  // namespace spinlock::integrate
