#include "spinwing/units.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <span>
#include <utility>

#include "spinwing/error.hpp"

namespace spinwing {
namespace {

struct UnitFactor {
    std::string_view suffix;
    double factor;
};

constexpr double kDeg = kPi / 180.0;

constexpr std::array kLength{UnitFactor{"m", 1.0}, UnitFactor{"cm", 1e-2}, UnitFactor{"mm", 1e-3},
                             UnitFactor{"um", 1e-6}};
constexpr std::array kMass{UnitFactor{"kg", 1.0}, UnitFactor{"g", 1e-3}, UnitFactor{"mg", 1e-6},
                           UnitFactor{"ug", 1e-9}};
constexpr std::array kAngle{UnitFactor{"rad", 1.0}, UnitFactor{"mrad", 1e-3}, UnitFactor{"deg", kDeg}};
constexpr std::array kFrequency{UnitFactor{"Hz", 1.0}, UnitFactor{"kHz", 1e3}};
constexpr std::array kSpinRate{UnitFactor{"rev/s", 1.0}, UnitFactor{"Hz", 1.0},
                               UnitFactor{"rpm", 1.0 / 60.0}, UnitFactor{"rad/s", 1.0 / (2.0 * kPi)}};
constexpr std::array kVoltage{UnitFactor{"V", 1.0}, UnitFactor{"mV", 1e-3}};
constexpr std::array kResistance{UnitFactor{"Ohm", 1.0}, UnitFactor{"ohm", 1.0}, UnitFactor{"kOhm", 1e3}};
constexpr std::array kTorque{UnitFactor{"N*m", 1.0}, UnitFactor{"Nm", 1.0}, UnitFactor{"mN*m", 1e-3},
                             UnitFactor{"mNm", 1e-3}, UnitFactor{"uN*m", 1e-6}, UnitFactor{"uNm", 1e-6}};
constexpr std::array kInertia{UnitFactor{"kg*m^2", 1.0}, UnitFactor{"g*mm^2", 1e-9},
                              UnitFactor{"mg*mm^2", 1e-12}};
constexpr std::array kPower{UnitFactor{"W", 1.0}, UnitFactor{"mW", 1e-3}, UnitFactor{"uW", 1e-6}};
constexpr std::array kPressure{UnitFactor{"Pa", 1.0}, UnitFactor{"kPa", 1e3}, UnitFactor{"MPa", 1e6},
                               UnitFactor{"GPa", 1e9}};
constexpr std::array kDensity{UnitFactor{"kg/m^3", 1.0}, UnitFactor{"g/cm^3", 1e3}};
constexpr std::array kTime{UnitFactor{"s", 1.0}, UnitFactor{"ms", 1e-3}, UnitFactor{"us", 1e-6}};
constexpr std::array kStrain{UnitFactor{"%", 1e-2}};
constexpr std::array kDragFactor{UnitFactor{"N*m*s^2", 1.0}};
constexpr std::array kField{UnitFactor{"T", 1.0}, UnitFactor{"mT", 1e-3}};

std::span<const UnitFactor> units_for(Quantity q) {
    switch (q) {
        case Quantity::Length: return kLength;
        case Quantity::Mass: return kMass;
        case Quantity::Angle: return kAngle;
        case Quantity::Frequency: return kFrequency;
        case Quantity::SpinRate: return kSpinRate;
        case Quantity::Voltage: return kVoltage;
        case Quantity::Resistance: return kResistance;
        case Quantity::Torque:
        case Quantity::Stiffness: return kTorque;
        case Quantity::Inertia: return kInertia;
        case Quantity::Power: return kPower;
        case Quantity::Pressure: return kPressure;
        case Quantity::Density: return kDensity;
        case Quantity::Time: return kTime;
        case Quantity::Strain: return kStrain;
        case Quantity::DragFactor: return kDragFactor;
        case Quantity::MagneticField: return kField;
        default: return {};
    }
}

// Folds spelling variants onto the table spellings: drops whitespace, maps the
// micro sign to 'u', the middle dot to '*', the ohm sign to "Ohm" and the
// degree sign to "deg".
std::string normalize_suffix(std::string_view raw) {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
        const auto c = static_cast<unsigned char>(raw[i]);
        if (std::isspace(c)) continue;
        const std::string_view rest = raw.substr(i);
        if (rest.starts_with("\xC2\xB5") || rest.starts_with("\xCE\xBC")) {  // µ, μ
            out += 'u';
            ++i;
        } else if (rest.starts_with("\xC2\xB7")) {  // ·
            out += '*';
            ++i;
        } else if (rest.starts_with("\xCE\xA9")) {  // Ω
            out += "Ohm";
            ++i;
        } else if (rest.starts_with("\xC2\xB0")) {  // °
            out += "deg";
            ++i;
        } else {
            out += static_cast<char>(c);
        }
    }
    return out;
}

}  // namespace

double parse_quantity(std::string_view text, Quantity quantity) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) throw ConfigError("", "empty value");
    text.remove_prefix(first);

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{}) throw ConfigError("", "not a number: '" + std::string(text) + "'");

    std::string suffix = normalize_suffix(std::string_view(ptr, text.data() + text.size() - ptr));
    if (suffix.empty()) return value;

    if (quantity == Quantity::Stiffness && suffix.ends_with("/rad")) suffix.resize(suffix.size() - 4);
    for (const auto& unit : units_for(quantity)) {
        if (unit.suffix == suffix) return value * unit.factor;
    }
    throw ConfigError("", "unit '" + suffix + "' is not valid for a " +
                              std::string(quantity_name(quantity)) + " value");
}

std::string_view si_unit(Quantity quantity) {
    switch (quantity) {
        case Quantity::Stiffness: return "N*m/rad";
        case Quantity::Strain: return "";
        default: break;
    }
    const auto units = units_for(quantity);
    return units.empty() ? std::string_view{} : units.front().suffix;
}

std::string_view display_unit(Quantity quantity) {
    switch (quantity) {
        case Quantity::Length: return "mm";
        case Quantity::Mass: return "mg";
        case Quantity::Angle: return "deg";
        case Quantity::SpinRate: return "rev/s";
        case Quantity::Torque: return "uN*m";
        case Quantity::Stiffness: return "uN*m/rad";
        case Quantity::Inertia: return "mg*mm^2";
        case Quantity::Power: return "mW";
        case Quantity::Pressure: return "GPa";
        case Quantity::Time: return "ms";
        case Quantity::Strain: return "%";
        default: return si_unit(quantity);
    }
}

double to_display(double value_si, Quantity quantity) {
    std::string unit(display_unit(quantity));
    if (quantity == Quantity::Stiffness) unit.resize(unit.size() - 4);
    for (const auto& u : units_for(quantity)) {
        if (u.suffix == unit) return value_si / u.factor;
    }
    return value_si;
}

std::string_view quantity_name(Quantity quantity) {
    switch (quantity) {
        case Quantity::Dimensionless: return "dimensionless";
        case Quantity::Count: return "count";
        case Quantity::Text: return "text";
        case Quantity::Length: return "length";
        case Quantity::Mass: return "mass";
        case Quantity::Angle: return "angle";
        case Quantity::Frequency: return "frequency";
        case Quantity::SpinRate: return "spin rate";
        case Quantity::Voltage: return "voltage";
        case Quantity::Resistance: return "resistance";
        case Quantity::Torque: return "torque";
        case Quantity::Stiffness: return "torsional stiffness";
        case Quantity::Inertia: return "rotational inertia";
        case Quantity::Power: return "power";
        case Quantity::Pressure: return "pressure";
        case Quantity::Density: return "density";
        case Quantity::Time: return "time";
        case Quantity::Strain: return "strain";
        case Quantity::DragFactor: return "drag factor";
        case Quantity::MagneticField: return "magnetic field";
    }
    return "unknown";
}

std::string format_exact(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), ptr);
}

}  // namespace spinwing
