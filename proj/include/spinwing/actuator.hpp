#pragma once

#include <filesystem>
#include <vector>

#include "spinwing/params.hpp"

namespace spinwing::actuator {

/// Effective field B(y) seen by the coil. Parametric profiles are two
/// opposed Gaussian lobes (odd in y); tabulated profiles interpolate linearly
/// between samples and reject queries outside their coverage.
class FieldProfile {
public:
    FieldProfile() = default;

    static FieldProfile parametric(double b_peak, double y_p, double sigma);
    /// Samples must be finite with strictly increasing y (at least two).
    static FieldProfile tabulated(std::vector<double> y, std::vector<double> b);
    /// Two-column CSV, y in mm and B in T. Blank lines, `#` comments and a
    /// non-numeric header row are skipped.
    static FieldProfile load_table(const std::filesystem::path& path);

    [[nodiscard]] double at(double y) const;

    /// Same shape with every field value multiplied by `factor`.
    [[nodiscard]] FieldProfile scaled(double factor) const;

    [[nodiscard]] FieldKind kind() const { return kind_; }
    [[nodiscard]] double b_peak() const { return b_peak_; }
    [[nodiscard]] double y_p() const { return y_p_; }
    [[nodiscard]] double sigma() const { return sigma_; }
    [[nodiscard]] const std::vector<double>& table_y() const { return y_; }
    [[nodiscard]] const std::vector<double>& table_b() const { return b_; }
    /// Largest |y| inside coverage (infinite for parametric profiles).
    [[nodiscard]] double coverage() const;

private:
    FieldKind kind_{FieldKind::Parametric};
    double b_peak_{0.0};
    double y_p_{0.0};
    double sigma_{1.0};
    std::vector<double> y_;
    std::vector<double> b_;
};

double field_at(const FieldProfile& profile, double y);

/// V_max * sign(sin(2 pi (2 f_coil) t + phase)) with sign(0) taken as +1.
double drive_voltage(const DriveSignal& drive, double t);

/// Time of the k-th sign change of the drive (k may be negative).
double drive_flip_time(const DriveSignal& drive, long long k);

struct ElectricalState {
    double v_s{0.0};
    double v_emf{0.0};
    double current{0.0};  // I_current [A]
    double force{0.0};    // F_coil [N]
    double p_mech{0.0};
    double p_heat{0.0};
    double p_net{0.0};
};

ElectricalState electrical_state(const CoilSpec& coil, const FieldProfile& profile, double v_s, double y,
                                 double ydot);
ElectricalState electrical_state(const RobotConfig& cfg, const FieldProfile& profile, double y, double ydot,
                                 double t);

struct CycleReport {
    std::vector<double> t, y, v_s, v_emf, current, force;
    double p_mech_avg{0.0};
    double p_heat_avg{0.0};
    double p_net_avg{0.0};
    /// Largest |P_net - P_mech - P_heat| / max(|P_net|, tiny) over the samples.
    double identity_error{0.0};
};

/// Averages over one cycle of prescribed motion y = y_max sin(2 pi f t),
/// sampled at the midpoints of `samples` equal intervals (>= 4096).
CycleReport quasi_static_cycle(const CoilSpec& coil, const FieldProfile& profile, double f_coil, double y_max,
                               double v_max, int samples = 8192);

/// Scales `profile` so the quasi-static cycle at the config's design
/// frequency, stroke and drive amplitude yields `target_p_mech`. Takes the
/// smaller of the two roots. Throws InfeasibleError carrying the best
/// achievable power when the target is out of reach.
FieldProfile calibrate_field(const RobotConfig& cfg, const FieldProfile& profile, double target_p_mech);

/// Upper bound (V_max/2)^2 / R_coil on square-wave mechanical power.
double max_transfer_power(const CoilSpec& coil, double v_max);

/// Builds the profile described by cfg.field, loading and calibrating as
/// requested.
FieldProfile resolve_field(const RobotConfig& cfg);

}  // namespace spinwing::actuator
