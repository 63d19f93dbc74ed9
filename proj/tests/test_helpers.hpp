#pragma once

#include <random>
#include <utility>

#include <spinlock/spinlock.hpp>

namespace testutil {

/// Random system in the weak-coupling regime where the periodic solver is
/// guaranteed to converge from the zero start.
inline spinlock::potential::SystemParams random_params(std::mt19937& rng,
                                                       double e_max = 0.3,
                                                       double lambda_max = 0.15) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double e = e_max * U(rng);
    const double C1 = 0.2 + 0.6 * U(rng);
    const double l1 = 1e-3 + (lambda_max - 1e-3) * U(rng);
    const double l2 = 1e-3 + (lambda_max - 1e-3) * U(rng);
    const double dhat1 = 1e-4 + 4e-3 * U(rng);
    const double qhat1 = dhat1 * (1.0 + 3.0 * U(rng));
    // choose the orbit size so the derived mass product lands in (0, 1/4)
    const double mu = 0.05 + 0.18 * U(rng);
    const double a = std::sqrt(l1 * C1 / (3.0 * dhat1 * mu));
    return spinlock::potential::SystemParams::from_parameters(e, a, C1, l1, l2, dhat1,
                                                              qhat1);
}

/// Random normalized body pair (masses and spin moments each summing to 1).
inline std::pair<spinlock::bodies::BodyShape, spinlock::bodies::BodyShape> random_pair(
    std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto draw_axes = [&](double scale) {
        double s[3];
        for (double& v : s) v = scale * (0.6 + 0.8 * U(rng));
        if (s[0] < s[1]) std::swap(s[0], s[1]);
        if (s[1] < s[2]) std::swap(s[1], s[2]);
        if (s[0] < s[1]) std::swap(s[0], s[1]);
        return spinlock::bodies::BodyShape::from_semi_axes(1.0 + U(rng), s[0], s[1], s[2]);
    };
    const auto b1 = draw_axes(1.0);
    const auto b2 = draw_axes(0.5 + 0.5 * U(rng));
    return spinlock::bodies::normalize_pair(b1, b2);
}

}  // namespace testutil
