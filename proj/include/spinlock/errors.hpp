#pragma once

#include <stdexcept>
#include <string>

namespace spinlock {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument values: bad ranges, unknown tags, malformed descriptors.
class DomainError : public Error {
public:
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// Requested harmonic degree has no closed form and quadrature was not enabled.
class UnsupportedDegreeError : public DomainError {
public:
    UnsupportedDegreeError(int l, int m, const std::string& msg)
        : DomainError(msg), l(l), m(m) {}
    int l, m;
};

/// Parameter set violates a structural constraint (mass equation, coupling identities).
class InconsistentParametersError : public DomainError {
public:
    explicit InconsistentParametersError(const std::string& msg) : DomainError(msg) {}
};

/// An iterative solve (root find, shooting, fixed point) did not converge.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual(residual) {}
    double residual;  ///< best residual reached before giving up
};

/// Adaptive step size collapsed below the representable floor.
class StiffnessError : public Error {
public:
    StiffnessError(const std::string& msg, double t, double h)
        : Error(msg), t(t), h(h) {}
    double t;  ///< time at which the integrator stalled
    double h;  ///< last attempted step size
};

/// Dissipative continuation refused to start from a degenerate seed.
class ContinuationBlockedError : public Error {
public:
    explicit ContinuationBlockedError(const std::string& msg) : Error(msg) {}
};

/// Dissipative continuation stalled before reaching the target friction.
class ContinuationStalledError : public Error {
public:
    ContinuationStalledError(const std::string& msg, double d1, double d2)
        : Error(msg), reached_delta1(d1), reached_delta2(d2) {}
    double reached_delta1, reached_delta2;  ///< last friction pair that converged
};

}  // namespace spinlock
