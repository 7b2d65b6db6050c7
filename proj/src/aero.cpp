#include "spinwing/aero.hpp"

#include <cmath>
#include <fmt/format.h>

namespace spinwing::aero {

Coefficients coefficients(double alpha) {
    if (!(alpha >= 0.0 && alpha <= kPi / 2.0))
        throw DomainError(fmt::format("angle of attack {} rad is outside [0, pi/2]", alpha));
    return {1.8 * std::sin(2.0 * alpha), 1.9 - 1.5 * std::cos(2.0 * alpha)};
}

double wing_area(const WingGeometry& wing) { return wing.length * wing.length / wing.aspect_ratio; }

AeroForces forces(const WingGeometry& wing, double rho_air, double omega) {
    if (omega < 0.0) throw DomainError(fmt::format("spin rate {} rad/s is negative", omega));
    const auto c = coefficients(wing.alpha);
    const double arm = wing.p_hat * wing.length;
    const double v = omega * arm;
    // Two wings, each with dynamic pressure 0.5 rho v^2 over area A.
    const double q_area = rho_air * wing_area(wing) * v * v;
    AeroForces f;
    f.lift = q_area * c.lift;
    f.drag = q_area * c.drag;
    f.power = f.drag * v;
    f.torque = arm * f.drag;
    return f;
}

double damping_factor(const WingGeometry& wing, double rho_air) {
    const double arm = wing.p_hat * wing.length;
    return rho_air * wing_area(wing) * arm * arm * arm * coefficients(wing.alpha).drag;
}

}  // namespace spinwing::aero
