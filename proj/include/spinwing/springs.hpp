#pragma once

#include "spinwing/params.hpp"

namespace spinwing::springs {

/// Rotational stiffness of a moment-loaded thin beam, Y w t^3 / (12 l).
double beam_stiffness(const Material& material, const BeamDims& beam);

/// Beams that still bend once grounded segments are removed from a chain.
int effective_series(const SpringSpec& spec);

/// n_chains parallel chains, each of (n_series - n_grounded) beams in series.
/// Throws DomainError when every segment of a chain is grounded.
double spring_stiffness(const SpringSpec& spec);

/// Fatigue-limited rotation: each beam bends at constant curvature until its
/// surface strain (t/2)(theta/l) reaches eps_max.
double max_rotation(const SpringSpec& spec);

/// k = J (2 pi f)^2.
double resonance_stiffness(double inertia, double frequency);

struct NaturalFrequency {
    double hz{0.0};
    double ratio{0.0};          // hz / excitation frequency
    bool quasi_static{false};   // ratio >= 2
};

NaturalFrequency natural_frequency(double stiffness, double inertia, double excitation_hz);

/// Solid-cylinder inertia, m r^2 / 2.
double cylinder_inertia(double mass, double radius);

struct DesignBounds {
    double l_min, l_max;
    double w_min, w_max;
    double t_min, t_max;
};

struct Topology {
    int n_chains{1};
    int n_series{1};
    int n_grounded{0};
};

/// Searches beam dimensions within `bounds` for stiffness `k_target`, subject
/// to max_rotation >= required_swing and w > t. Among equally close designs
/// the lightest wins. Throws InfeasibleError carrying the closest achievable
/// stiffness.
SpringSpec design_spring(double k_target, const Material& material, const DesignBounds& bounds,
                         const Topology& topology, double required_swing, int grid_points = 81);

double spring_mass(const SpringSpec& spec);

}  // namespace spinwing::springs
