#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "spinwing/actuator.hpp"
#include "spinwing/aero.hpp"
#include "spinwing/params.hpp"

namespace spinwing::drivetrain {

enum class RatchetMode { Freewheel, Engaged };

std::string_view mode_name(RatchetMode mode);

/// Running integrals carried alongside the state and integrated by the same
/// RK4 stages, so averages are consistent with the dynamics.
struct WorkIntegrals {
    double mech{0.0};          // int P_mech dt [J]
    double heat{0.0};          // int P_heat dt [J]
    double net{0.0};           // int P_net dt [J]
    double aero{0.0};          // int P_aero dt [J]
    double friction{0.0};      // int tau_losses * omega_wing dt [J]
    double lift_impulse{0.0};  // int F_L dt [N*s]
    double engaged_time{0.0};  // time spent engaged [s]

    bool operator==(const WorkIntegrals&) const = default;
};

struct SystemState {
    double t{0.0};
    double theta_coil{0.0};
    double omega_coil{0.0};
    double theta_wing{0.0};
    double omega_wing{0.0};
    double theta_con{0.0};
    RatchetMode mode{RatchetMode::Freewheel};
    WorkIntegrals work;

    bool operator==(const SystemState&) const = default;
};

struct StateRates {
    double theta_coil{0.0};
    double omega_coil{0.0};
    double theta_wing{0.0};
    double omega_wing{0.0};
    double theta_con{0.0};
};

enum class EventKind { Engage, Disengage, DriveFlip, FlywheelStop, CollisionWarning };

std::string_view event_name(EventKind kind);

struct Event {
    double t{0.0};
    EventKind kind{EventKind::DriveFlip};

    bool operator==(const Event&) const = default;
};

struct EnergyLedger {
    double e_kin_coil{0.0};
    double e_spring_ti{0.0};
    double e_spring_steel{0.0};
    double e_kin_wing{0.0};
    double e_total{0.0};
    double w_mech{0.0};
    double w_heat{0.0};
    double w_aero{0.0};
    double w_friction{0.0};
    /// (E_total - E_initial) - (W_mech - W_aero - W_friction).
    double residual{0.0};
};

EnergyLedger energy_ledger(const SystemState& state, const RobotConfig& cfg, double e_total_initial = 0.0);

struct Sample {
    SystemState state;
    actuator::ElectricalState electrical;
    aero::AeroForces aero;
    double e_total{0.0};
};

/// Snapshot taken at the start of every coil cycle (every fourth drive flip).
/// Extremes cover the cycle that starts here.
struct CycleRecord {
    double t{0.0};
    double theta_wing{0.0};
    WorkIntegrals work;
    double theta_coil_max{0.0};
    double theta_coil_min{0.0};
    double omega_wing_max{0.0};
    double omega_wing_min{0.0};
};

struct Trace {
    double f_coil{0.0};
    double e_total_initial{0.0};
    std::vector<Sample> samples;
    std::vector<Event> events;
    std::vector<CycleRecord> cycles;
    SystemState final_state;
    bool collision_warning{false};
    double collision_time{0.0};
};

/// Non-finite state or an event that could not be localized.
class IntegrationFault : public Error {
public:
    IntegrationFault(const std::string& message, SystemState last_good)
        : Error(message), last_good_(last_good) {}

    [[nodiscard]] const SystemState& last_good() const { return last_good_; }

private:
    SystemState last_good_;
};

struct SimulationOptions {
    double t_end{2.0};
    bool record_samples{true};
    bool record_flip_events{true};
    /// Start here instead of at rest.
    std::optional<SystemState> initial;
};

/// Coil oscillator, one-way ratchet and flywheel, integrated with classical
/// RK4 and event localization.
class Drivetrain {
public:
    Drivetrain(const RobotConfig& cfg, actuator::FieldProfile profile);

    [[nodiscard]] const RobotConfig& config() const { return cfg_; }
    [[nodiscard]] const actuator::FieldProfile& profile() const { return profile_; }

    /// Largest allowed step, one coil period over steps_per_cycle.
    [[nodiscard]] double dt_max() const;

    /// Rest, apart from the configured coil seed offset.
    [[nodiscard]] SystemState initial_state() const;

    [[nodiscard]] StateRates derivatives(const SystemState& state, double v_s) const;
    /// Uses the supply voltage at state.t.
    [[nodiscard]] StateRates rates_at(const SystemState& state) const;

    /// One plain RK4 step in the current mode with a constant supply voltage.
    [[nodiscard]] SystemState rk4_step(const SystemState& state, double h, double v_s) const;

    /// Advances by h with ratchet and flywheel-stop events localized inside
    /// the step. h must not straddle a drive flip.
    SystemState step(const SystemState& state, double h, double v_s, std::vector<Event>* events = nullptr) const;

    [[nodiscard]] Trace simulate(const SimulationOptions& options) const;

    [[nodiscard]] Sample make_sample(const SystemState& state, double v_s) const;

private:
    struct Observer;
    SystemState advance(const SystemState& state, double h, double v_s, Observer& observer) const;

    RobotConfig cfg_;
    actuator::FieldProfile profile_;
    double b_{0.0};
    double tau_{0.0};
};

Trace simulate(const RobotConfig& cfg, const actuator::FieldProfile& profile, double t_end);

/// Columns: t, theta_coil, omega_coil, theta_wing, omega_wing, theta_con,
/// mode, V_s, V_emf, I_current, F_coil, P_mech, P_heat, F_L, F_D, E_total.
void write_trace_csv(const Trace& trace, std::ostream& out);
void write_events_csv(const Trace& trace, std::ostream& out);

}  // namespace spinwing::drivetrain
