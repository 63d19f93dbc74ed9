#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <spinlock/errors.hpp>
#include <spinlock/integrate.hpp>

using namespace spinlock;
using Vec1 = Eigen::Matrix<double, 1, 1>;
using Vec2 = Eigen::Vector2d;

namespace {

Vec2 oscillator(double, const Vec2& y) { return Vec2(y[1], -y[0]); }
Vec2 pendulum(double, const Vec2& y) { return Vec2(y[1], -std::sin(y[0])); }

}  // namespace

TEST_CASE("harmonic oscillator endpoint accuracy", "[integrate]") {
    const Vec2 y0(1.0, 0.0);
    const double T = 20.0 * M_PI;
    const Vec2 yT = integrate::integrate_to<2>(oscillator, 0.0, y0, T);
    REQUIRE(std::abs(yT[0] - std::cos(T)) < 1e-9);
    REQUIRE(std::abs(yT[1] + std::sin(T)) < 1e-9);
}

TEST_CASE("exponential growth in one dimension", "[integrate]") {
    Vec1 y0;
    y0[0] = 0.7;
    const auto y = integrate::integrate_to<1>(
        [](double, const Vec1& v) { return v; }, 0.0, y0, 2.0);
    REQUIRE(std::abs(y[0] - 0.7 * std::exp(2.0)) < 1e-9);
}

TEST_CASE("dense output matches the analytic solution everywhere", "[integrate]") {
    const Vec2 y0(1.0, 0.0);
    const double T = 20.0 * M_PI;
    const auto traj = integrate::integrate_dense<2>(oscillator, 0.0, y0, T);
    REQUIRE(traj.t_begin() == 0.0);
    REQUIRE(traj.t_end() == T);
    REQUIRE(!traj.steps().empty());
    for (int i = 0; i <= 400; ++i) {
        const double t = T * i / 400.0;
        const auto y = traj(t);
        REQUIRE(std::abs(y[0] - std::cos(t)) < 1e-8);
        REQUIRE(std::abs(y[1] + std::sin(t)) < 1e-8);
    }
}

TEST_CASE("dense output agrees with restarted endpoint integrations", "[integrate]") {
    const Vec2 y0(0.9, 0.3);
    const auto traj = integrate::integrate_dense<2>(pendulum, 0.0, y0, 10.0);
    for (int i = 1; i <= 20; ++i) {
        const double t = 10.0 * i / 20.0;
        const Vec2 ref = integrate::integrate_to<2>(pendulum, 0.0, y0, t);
        REQUIRE((traj(t) - ref).norm() < 1e-9);
    }
}

TEST_CASE("pendulum energy drift over one hundred swings", "[integrate]") {
    const Vec2 y0(0.0, 1.5);
    auto energy = [](const Vec2& y) { return 0.5 * y[1] * y[1] - std::cos(y[0]); };
    const double E0 = energy(y0);
    integrate::IntegratorConfig cfg;
    cfg.abs_tol = cfg.rel_tol = 1e-12;
    const auto yT = integrate::integrate_to<2>(pendulum, 0.0, y0, 100.0 * 2.0 * M_PI, cfg);
    REQUIRE(std::abs(energy(yT) - E0) < 1e-9);
}

TEST_CASE("quiescent system is propagated exactly", "[integrate]") {
    const Vec2 y0(1.25, -0.5);
    auto rhs = [](double, const Vec2&) { return Vec2(0.0, 0.0); };
    const auto traj = integrate::integrate_dense<2>(rhs, 0.0, y0, 5.0);
    REQUIRE(traj(3.3)[0] == y0[0]);
    REQUIRE(traj(3.3)[1] == y0[1]);
    const auto yT = integrate::integrate_to<2>(rhs, 0.0, y0, 5.0);
    REQUIRE(yT[0] == y0[0]);
    REQUIRE(yT[1] == y0[1]);
}

TEST_CASE("step budget exhaustion is reported", "[integrate]") {
    integrate::IntegratorConfig cfg;
    cfg.max_steps = 5;
    const Vec2 y0(1.0, 0.0);
    REQUIRE_THROWS_AS(integrate::integrate_to<2>(oscillator, 0.0, y0, 1000.0, cfg),
                      StiffnessError);
}

TEST_CASE("finite-time blow-up is reported instead of looping", "[integrate]") {
    Vec1 y0;
    y0[0] = 1.0;
    auto rhs = [](double, const Vec1& y) { return Vec1(y[0] * y[0]); };
    REQUIRE_THROWS_AS(integrate::integrate_to<1>(rhs, 0.0, y0, 2.0), StiffnessError);
}

TEST_CASE("integration argument validation", "[integrate]") {
    const Vec2 y0(1.0, 0.0);
    REQUIRE_THROWS_AS(integrate::integrate_to<2>(oscillator, 1.0, y0, 0.5), DomainError);
    REQUIRE_THROWS_AS(integrate::integrate_to<2>(oscillator, 1.0, y0, 1.0), DomainError);

    integrate::IntegratorConfig cfg;
    cfg.abs_tol = 0.0;
    REQUIRE_THROWS_AS(integrate::integrate_to<2>(oscillator, 0.0, y0, 1.0, cfg),
                      DomainError);
    cfg.abs_tol = 1e-11;
    cfg.rel_tol = 2e-3;
    REQUIRE_THROWS_AS(integrate::integrate_to<2>(oscillator, 0.0, y0, 1.0, cfg),
                      DomainError);
}

TEST_CASE("trajectory evaluation outside its span is rejected", "[integrate]") {
    const Vec2 y0(1.0, 0.0);
    const auto traj = integrate::integrate_dense<2>(oscillator, 0.0, y0, 2.0);
    REQUIRE_THROWS_AS(traj(-0.5), DomainError);
    REQUIRE_THROWS_AS(traj(2.5), DomainError);
    REQUIRE_NOTHROW(traj(2.0 + 1e-12));  // within the evaluation slack

    const integrate::Trajectory<2> empty;
    REQUIRE_THROWS_AS(empty(0.0), DomainError);
}

TEST_CASE("step-size caps are honored", "[integrate]") {
    integrate::IntegratorConfig cfg;
    cfg.max_step = 0.05;
    cfg.initial_step = 1e-4;
    const Vec2 y0(1.0, 0.0);
    const auto traj = integrate::integrate_dense<2>(oscillator, 0.0, y0, 3.0, cfg);
    REQUIRE(traj.steps().front().h <= 1e-4 * (1.0 + 1e-12));
    for (const auto& s : traj.steps()) REQUIRE(s.h <= 0.05 * (1.0 + 1e-12));
    // steps tile the span
    REQUIRE(traj.steps().front().t0 == 0.0);
    const auto& last = traj.steps().back();
    REQUIRE(std::abs(last.t0 + last.h - 3.0) < 1e-12);
}
