#pragma once

#include "nudged_ns/diagnostics.hpp"
#include "nudged_ns/fespace.hpp"

namespace nudged_ns::problems {

/// Manufactured solution u = (cos(y+t), sin(x-t)), p = sin(2 pi (x+t)).
Vec2 mms_velocity(double x, double y, double t);
std::array<Vec2, 2> mms_gradient(double x, double y, double t);
double mms_pressure(double x, double y, double t);
/// u_t + (u.grad)u - nu lap u + grad p for the manufactured solution.
VectorFunction mms_forcing(double nu);

/// Buoyancy-like potential forcing Ra (0, y); the exact solution is u = 0,
/// p = Ra y^2 / 2 up to a constant.
VectorFunction noflow_forcing(double ra);
/// Initial velocity (x cos y, -sin y).
Vec2 noflow_initial(double x, double y, double t);

/// Channel boundary data: the parabolic profile with the given peak on the
/// inflow and outflow sections, zero on the walls and the cylinder.
VectorFunction channel_boundary(double peak);

} // namespace nudged_ns::problems
