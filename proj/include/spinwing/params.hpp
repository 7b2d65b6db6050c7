#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spinwing/error.hpp"
#include "spinwing/units.hpp"

namespace spinwing {

struct WingGeometry {
    double length{0.0};          // R, single wing [m]
    double aspect_ratio{0.0};    // A_r
    double alpha{0.0};           // angle of attack [rad]
    double p_hat{0.0};           // centre of pressure as a fraction of R
    double mass_per_wing{0.0};   // [kg]
    int n_wings{2};

    bool operator==(const WingGeometry&) const = default;
};

struct CoilSpec {
    int n_turns{0};
    double l_coil{0.0};       // mean turn circumference [m]
    double resistance{0.0};   // [Ohm]
    double mass{0.0};         // [kg]
    double arm_radius{0.0};   // radius of the coil path [m]
    double y_max{0.0};        // design stroke half-amplitude [m]

    bool operator==(const CoilSpec&) const = default;
};

/// Square-wave supply. The supply toggles at twice the coil frequency.
struct DriveSignal {
    double v_max{0.0};   // [V]
    double f_coil{0.0};  // coil oscillation frequency [Hz]
    double phase{0.0};   // [rad]

    bool operator==(const DriveSignal&) const = default;
};

struct Material {
    double youngs_modulus{0.0};  // [Pa]
    double eps_max{0.0};         // fatigue strain limit
    double density{0.0};         // [kg/m^3]

    bool operator==(const Material&) const = default;
};

struct BeamDims {
    double length{0.0};     // [m]
    double width{0.0};      // [m]
    double thickness{0.0};  // [m]

    bool operator==(const BeamDims&) const = default;
};

/// Serpentine spring: n_chains parallel chains of n_series beams each, of
/// which n_grounded are glued rigid.
struct SpringSpec {
    Material material;
    BeamDims beam;
    int n_chains{1};
    int n_series{1};
    int n_grounded{0};

    bool operator==(const SpringSpec&) const = default;
};

/// Flywheel losses besides aerodynamic drag. Exactly one of `tau_losses` or
/// `target_loss_power` is set; `drag_factor` overrides the aerodynamic b.
struct LossModel {
    std::optional<double> tau_losses;         // [N*m]
    std::optional<double> target_loss_power;  // [W], drained at design.f_wing
    std::optional<double> drag_factor;        // b [N*m*s^2]

    bool operator==(const LossModel&) const = default;
};

enum class FieldKind { Parametric, Tabulated };

struct FieldSpec {
    FieldKind kind{FieldKind::Parametric};
    std::optional<double> b_peak;            // [T]
    double y_p{0.8e-3};                      // lobe centre [m]
    double sigma{1.2e-3};                    // lobe width [m]
    std::string table_path;                  // tabulated profile CSV (y in mm, B in T)
    std::optional<double> calibrate_p_mech;  // [W] quasi-static P_mech target

    bool operator==(const FieldSpec&) const = default;
};

/// Design targets used by the closed-form budget and for deriving defaults.
struct DesignPoint {
    double f_coil{250.0};              // resonance-sizing target [Hz]
    double f_wing{47.0};               // target spin rate [rev/s]
    double collision_limit{kPi / 6.0}; // coil arm collision angle [rad]
    double stiffness_tolerance{0.1};   // allowed k mismatch, given vs spring-derived

    bool operator==(const DesignPoint&) const = default;
};

struct RatchetSpec {
    double shaft_diameter{0.0};  // [m]
    int n_beams{0};
    double shaft_mass{0.0};      // [kg]

    bool operator==(const RatchetSpec&) const = default;
};

struct IntegratorSettings {
    int steps_per_cycle{1000};
    double event_tol{1e-9};
    double output_dt{5e-5};         // trace cadence [s]
    double seed_theta_coil{1e-3};   // initial coil offset [rad]

    bool operator==(const IntegratorSettings&) const = default;
};

struct MassPart {
    std::string name;
    double mass{0.0};  // [kg]

    bool operator==(const MassPart&) const = default;
};

/// Complete, SI-normalized description of one robot and how to simulate it.
/// Derived quantities (inertias, stiffnesses) are filled in on load.
struct RobotConfig {
    WingGeometry wing;
    CoilSpec coil;
    FieldSpec field;
    DriveSignal drive;
    DesignPoint design;
    std::optional<SpringSpec> ti_spring;
    std::optional<SpringSpec> steel_spring;
    std::optional<RatchetSpec> ratchet;
    double k_coil{0.0};  // [N*m/rad]
    double k_con{0.0};   // [N*m/rad]
    double J_coil{0.0};  // [kg*m^2]
    double J_wing{0.0};  // [kg*m^2]
    LossModel losses;
    double rho_air{1.22};
    IntegratorSettings integrator;
    std::vector<MassPart> mass_parts;

    bool operator==(const RobotConfig&) const = default;
};

/// Flat `section.key -> raw value` view of a config file, ordered by key.
using ConfigMap = std::map<std::string, std::string>;

struct SchemaEntry {
    std::string key;
    Quantity quantity;
    std::string default_value;  // empty when there is no default
    bool required;
    std::string description;
};

/// Every recognised key. `mass.<name>` entries are free-form and listed once
/// as the pattern "mass.*".
const std::vector<SchemaEntry>& config_schema();

[[nodiscard]] bool is_known_key(const std::string& key);

/// Parses the TOML-like text format: `[section]` headers, `key = value`
/// lines, `#` comments, quoted or bare values.
ConfigMap parse_config_text(const std::string& text);

/// Builds a config from raw key/values. Throws ConfigError for unknown or
/// missing keys and bad units, ValidationError listing every violated
/// invariant.
RobotConfig config_from_map(const ConfigMap& map);

/// Reads and parses a config file. A relative `field.table` is resolved
/// against the directory holding the config.
ConfigMap load_config_map(const std::filesystem::path& path);

RobotConfig load_config(const std::filesystem::path& path);

/// SI, exactly round-trippable view of a config (derived fields included).
ConfigMap config_to_map(const RobotConfig& config);
std::string serialize_config(const RobotConfig& config);

/// FNV-1a over the serialized form; stable across platforms and runs.
std::uint64_t config_hash(const RobotConfig& config);

std::vector<Violation> validate(const RobotConfig& config);

RobotConfig paper_reference_config();

/// Effective quadratic drag factor b (explicit override or aerodynamic).
double drag_factor(const RobotConfig& config);

/// Constant friction torque on the flywheel (explicit or sized from the
/// target loss power at the design spin rate).
double loss_torque(const RobotConfig& config);

double total_mass(const RobotConfig& config);

}  // namespace spinwing
