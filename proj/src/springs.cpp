#include "spinwing/springs.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <optional>

namespace spinwing::springs {

double beam_stiffness(const Material& material, const BeamDims& beam) {
    const double t = beam.thickness;
    return material.youngs_modulus * beam.width * t * t * t / (12.0 * beam.length);
}

int effective_series(const SpringSpec& spec) { return spec.n_series - spec.n_grounded; }

double spring_stiffness(const SpringSpec& spec) {
    const int n_eff = effective_series(spec);
    if (n_eff <= 0)
        throw DomainError(fmt::format("spring has no compliant segments (n_series {}, n_grounded {})",
                                      spec.n_series, spec.n_grounded));
    return spec.n_chains * beam_stiffness(spec.material, spec.beam) / n_eff;
}

double max_rotation(const SpringSpec& spec) {
    return effective_series(spec) * 2.0 * spec.material.eps_max * spec.beam.length / spec.beam.thickness;
}

double resonance_stiffness(double inertia, double frequency) {
    const double w = 2.0 * kPi * frequency;
    return inertia * w * w;
}

NaturalFrequency natural_frequency(double stiffness, double inertia, double excitation_hz) {
    NaturalFrequency nf;
    nf.hz = std::sqrt(stiffness / inertia) / (2.0 * kPi);
    nf.ratio = nf.hz / excitation_hz;
    nf.quasi_static = nf.ratio >= 2.0;
    return nf;
}

double cylinder_inertia(double mass, double radius) { return 0.5 * mass * radius * radius; }

double spring_mass(const SpringSpec& spec) {
    return spec.material.density * spec.n_chains * spec.n_series * spec.beam.length * spec.beam.width *
           spec.beam.thickness;
}

namespace {

double lerp_grid(double lo, double hi, int i, int n) {
    return n <= 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / (n - 1);
}

}  // namespace

SpringSpec design_spring(double k_target, const Material& material, const DesignBounds& bounds,
                         const Topology& topology, double required_swing, int grid_points) {
    if (!(k_target > 0.0)) throw DomainError("target stiffness must be positive");
    if (topology.n_series - topology.n_grounded <= 0 || topology.n_chains < 1)
        throw DomainError("spring topology has no compliant segments");

    SpringSpec spec;
    spec.material = material;
    spec.n_chains = topology.n_chains;
    spec.n_series = topology.n_series;
    spec.n_grounded = topology.n_grounded;

    // Coarse grid over (l, w); for each pair the thickness hitting k_target is
    // closed form (k is cubic in t), then clamped into bounds.
    std::optional<SpringSpec> best;
    double best_err = std::numeric_limits<double>::infinity();
    double best_mass = std::numeric_limits<double>::infinity();
    double closest_k = 0.0;
    double closest_err = std::numeric_limits<double>::infinity();
    const int n_eff = topology.n_series - topology.n_grounded;
    for (int il = 0; il < grid_points; ++il) {
        for (int iw = 0; iw < grid_points; ++iw) {
            SpringSpec s = spec;
            s.beam.length = lerp_grid(bounds.l_min, bounds.l_max, il, grid_points);
            s.beam.width = lerp_grid(bounds.w_min, bounds.w_max, iw, grid_points);
            const double t3 = 12.0 * s.beam.length * k_target * n_eff /
                              (topology.n_chains * material.youngs_modulus * s.beam.width);
            s.beam.thickness = std::clamp(std::cbrt(t3), bounds.t_min, bounds.t_max);
            if (!(s.beam.width > s.beam.thickness)) continue;
            const double k = spring_stiffness(s);
            const double err = std::abs(k - k_target) / k_target;
            if (err < closest_err) {
                closest_err = err;
                closest_k = k;
            }
            if (max_rotation(s) < required_swing) continue;
            const double mass = spring_mass(s);
            // Errors below 1e-9 are ties; the lighter design wins.
            const bool better = err < best_err - 1e-9 || (std::abs(err - best_err) <= 1e-9 && mass < best_mass);
            if (better) {
                best = s;
                best_err = err;
                best_mass = mass;
            }
        }
    }
    if (!best || best_err > 0.02) {
        const double k = best ? spring_stiffness(*best) : closest_k;
        throw InfeasibleError(
            fmt::format("no spring within bounds reaches {:.4g} N*m/rad with {:.3g} rad swing; closest "
                        "achievable {:.4g} N*m/rad",
                        k_target, required_swing, k),
            k);
    }
    return *best;
}

}  // namespace spinwing::springs
