#include "nudged_ns/problems.hpp"

#include "nudged_ns/operators.hpp"

#include <cmath>
#include <numbers>

namespace nudged_ns::problems {

Vec2 mms_velocity(double x, double y, double t) { return {std::cos(y + t), std::sin(x - t)}; }

std::array<Vec2, 2> mms_gradient(double x, double y, double t) {
    return {{{0.0, -std::sin(y + t)}, {std::cos(x - t), 0.0}}};
}

double mms_pressure(double x, double, double t) { return std::sin(2.0 * std::numbers::pi * (x + t)); }

VectorFunction mms_forcing(double nu) {
    return [nu](double x, double y, double t) -> Vec2 {
        const double sy = std::sin(y + t), cy = std::cos(y + t);
        const double sx = std::sin(x - t), cx = std::cos(x - t);
        const double dp = 2.0 * std::numbers::pi * std::cos(2.0 * std::numbers::pi * (x + t));
        // u_t + (u.grad)u - nu lap u + grad p, component by component.
        return {-sy - sx * sy + nu * cy + dp, -cx + cy * cx + nu * sx};
    };
}

VectorFunction noflow_forcing(double ra) {
    return [ra](double, double y, double) -> Vec2 { return {0.0, ra * y}; };
}

Vec2 noflow_initial(double x, double y, double) { return {x * std::cos(y), -std::sin(y)}; }

VectorFunction channel_boundary(double peak) {
    const auto profile = parabolic_profile(peak, ChannelGeometry::height);
    return [profile](double x, double y, double t) -> Vec2 {
        constexpr double eps = 1e-9;
        if (x < eps || x > ChannelGeometry::length - eps) return profile(x, y, t);
        return {0.0, 0.0};
    };
}

} // namespace nudged_ns::problems
