#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spinwing/actuator.hpp"
#include "spinwing/drivetrain.hpp"
#include "spinwing/params.hpp"

namespace spinwing::analysis {

/// Minimum number of complete coil cycles a trace needs for steady-state
/// detection.
inline constexpr int kMinCycles = 20;
inline constexpr int kSettleWindow = 10;
inline constexpr double kSettleTolerance = 1e-3;

struct SteadyStateReport {
    bool steady_state_reached{false};
    std::optional<double> settled_at;  // [s]
    double window_start{0.0};          // [s]
    double window_end{0.0};            // [s]
    int cycles_in_window{0};
    double f_wing_ss{0.0};       // [rev/s]
    double ripple_pct{0.0};      // +/- percent of the mean
    double duty_engaged{0.0};    // fraction of time engaged
    double theta_coil_max{0.0};  // [rad]
    double theta_coil_min{0.0};  // [rad]
    double p_mech_avg{0.0};      // [W]
    double p_heat_avg{0.0};
    double p_net_avg{0.0};
    double p_aero_avg{0.0};
    double p_friction_avg{0.0};
    double f_lift_avg{0.0};      // F_L [N]
    double lift_to_power{0.0};   // [g/W]
    double energy_residual_fraction{0.0};  // |ledger residual| / int P_mech over the trace
    bool collision_warning{false};
};

/// Cycle-averaged flywheel speed per complete coil cycle [rad/s].
std::vector<double> cycle_average_speeds(const drivetrain::Trace& trace);

/// Start time of the earliest cycle after which every run of 10 consecutive
/// cycle-averaged speeds spreads by less than 0.1%. Throws DomainError for
/// traces with fewer than 20 complete cycles.
std::optional<double> detect_steady_state(const drivetrain::Trace& trace);

struct RippleDuty {
    double ripple_pct{0.0};
    double duty_engaged{0.0};
};

/// Over the complete cycles starting at or after `from`.
RippleDuty ripple_and_duty(const drivetrain::Trace& trace, double from);

struct ToggleModel {
    double energy_drop{0.0};  // fraction of the stored kinetic energy
    double speed_drop{0.0};   // fraction of the mean speed
    double ripple{0.0};       // +/- fraction around the mean
};

/// Two-state flywheel argument: the flywheel coasts for half_period while
/// leaking P_leak, then is topped up again.
ToggleModel flywheel_toggle_model(double inertia, double f_ss, double p_leak, double half_period);

/// Grams of lift per watt of electrical power.
double lift_to_power(double lift_newton, double p_net);

double scale_lift_to_power(double ltp, double mass_ratio);

/// Per-beam contact force with equal load sharing.
double ratchet_beam_load(double torque, double r_shaft, int n_beams);

SteadyStateReport make_report(const drivetrain::Trace& trace, const RobotConfig& cfg);

struct PowerRow {
    std::string name;
    double watts{0.0};
};

struct Budget {
    double mass_total{0.0};   // [kg]
    double lift_mass{0.0};    // lift expressed as supported mass [kg]
    double lift_margin{0.0};  // lift_mass - mass_total [kg]
    std::vector<PowerRow> power_table;
};

Budget budgets(const RobotConfig& cfg, const SteadyStateReport& report);

/// Closed-form design numbers; no dynamics are integrated.
struct DesignBudget {
    double c_lift{0.0};
    double c_drag{0.0};
    double f_lift{0.0};   // at design.f_wing [N]
    double f_drag{0.0};
    double p_aero{0.0};
    double drag_factor{0.0};
    double tau_losses{0.0};
    double p_friction{0.0};
    double b_peak{0.0};
    double p_mech{0.0};   // quasi-static at design.f_coil
    double p_heat{0.0};
    double p_net{0.0};
    double p_mech_bound{0.0};
    double k_coil{0.0};
    double k_coil_resonance{0.0};
    std::optional<double> k_ti_spring;
    std::optional<double> theta_max_ti;
    double required_swing{0.0};  // y_max / r [rad]
    double k_con{0.0};
    std::optional<double> k_steel_spring;
    std::optional<double> theta_max_steel;
    std::optional<double> shaft_natural_hz;
    std::optional<double> shaft_ratio;
    double j_wing{0.0};
    double e_kinetic{0.0};
    ToggleModel toggle;
    std::optional<double> beam_load;
    double mass_total{0.0};
    double lift_mass{0.0};
    double lift_margin{0.0};
    double lift_to_power{0.0};
};

DesignBudget design_budget(const RobotConfig& cfg, const actuator::FieldProfile& profile);

nlohmann::ordered_json report_to_json(const SteadyStateReport& report);
nlohmann::ordered_json budget_to_json(const DesignBudget& budget);

}  // namespace spinwing::analysis
