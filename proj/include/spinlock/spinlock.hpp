#pragma once

/// Umbrella header: planar spin-spin dynamics of two orbiting ellipsoids.
///
/// kepler     - Keplerian orbit solution and derived angular rates
/// bodies     - ellipsoid shape parameters, gravity coefficients, units
/// potential  - mutual potential truncations and the coupling family
/// dynamics   - torques, chart equations, variational matrices, full model
/// integrate  - adaptive Runge-Kutta with continuous output
/// solver     - periodic solutions, Floquet analysis, friction continuation
/// conditions - analytic uniqueness and stability estimates
/// scan       - (e, lambda) stability diagrams
/// io         - CSV / JSON / SVG serialization

#include "spinlock/bodies.hpp"
#include "spinlock/conditions.hpp"
#include "spinlock/dynamics.hpp"
#include "spinlock/errors.hpp"
#include "spinlock/integrate.hpp"
#include "spinlock/io.hpp"
#include "spinlock/kepler.hpp"
#include "spinlock/potential.hpp"
#include "spinlock/scan.hpp"
#include "spinlock/solver.hpp"
