#pragma once

#include "spinwing/params.hpp"

namespace spinwing::aero {

struct Coefficients {
    double lift{0.0};
    double drag{0.0};
};

/// Quasi-steady totals for the wing pair at spin rate omega.
struct AeroForces {
    double lift{0.0};    // F_L [N]
    double drag{0.0};    // F_D [N]
    double power{0.0};   // P_aero [W]
    double torque{0.0};  // drag torque about the spin axis [N*m]
};

/// C_L = 1.8 sin 2a, C_D = 1.9 - 1.5 cos 2a. Throws DomainError outside [0, pi/2].
Coefficients coefficients(double alpha);

/// Planform area of one wing, R * R / A_r.
double wing_area(const WingGeometry& wing);

/// Forces at the centre-of-pressure speed omega * p_hat * R, both wings.
/// Throws DomainError for negative omega.
AeroForces forces(const WingGeometry& wing, double rho_air, double omega);

/// b with b * omega^2 equal to the drag torque at every omega:
/// rho * A * (p_hat R)^3 * C_D.
double damping_factor(const WingGeometry& wing, double rho_air);

}  // namespace spinwing::aero
