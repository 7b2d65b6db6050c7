#pragma once

#include <string>
#include <string_view>

namespace spinwing {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kStandardGravity = 9.80665;  // m/s^2, for N <-> gram-force

/// Physical dimension of a config scalar. Determines which unit suffixes are
/// accepted and the SI unit everything is normalized to.
enum class Quantity {
    Dimensionless,
    Count,
    Text,
    Length,
    Mass,
    Angle,
    Frequency,
    SpinRate,
    Voltage,
    Resistance,
    Torque,
    Stiffness,
    Inertia,
    Power,
    Pressure,
    Density,
    Time,
    Strain,
    DragFactor,
    MagneticField,
};

/// Parses "20 mm", "0.43 %", "150 uN*m/rad", "2.75" (bare = SI) into SI.
/// Throws ConfigError (without key path) on a malformed number or unknown unit.
double parse_quantity(std::string_view text, Quantity quantity);

/// SI unit suffix written by the serializer ("m", "kg", "rad", ...).
std::string_view si_unit(Quantity quantity);

/// Human-facing unit used in the schema dump.
std::string_view display_unit(Quantity quantity);

/// Converts an SI value into display_unit(quantity).
double to_display(double value_si, Quantity quantity);

std::string_view quantity_name(Quantity quantity);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_exact(double value);

}  // namespace spinwing
