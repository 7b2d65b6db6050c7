#include "spinwing/actuator.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace spinwing::actuator {

FieldProfile FieldProfile::parametric(double b_peak, double y_p, double sigma) {
    if (!(sigma > 0.0)) throw DomainError("field lobe width must be positive");
    FieldProfile p;
    p.kind_ = FieldKind::Parametric;
    p.b_peak_ = b_peak;
    p.y_p_ = y_p;
    p.sigma_ = sigma;
    return p;
}

FieldProfile FieldProfile::tabulated(std::vector<double> y, std::vector<double> b) {
    if (y.size() != b.size()) throw DomainError("field table columns differ in length");
    if (y.size() < 2) throw DomainError("field table needs at least two samples");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(b[i])) throw DomainError("field table holds a non-finite value");
        if (i > 0 && !(y[i] > y[i - 1])) throw DomainError("field table positions must be strictly increasing");
    }
    FieldProfile p;
    p.kind_ = FieldKind::Tabulated;
    p.y_ = std::move(y);
    p.b_ = std::move(b);
    return p;
}

FieldProfile FieldProfile::load_table(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("field.table", "cannot open field table '" + path.string() + "'");
    std::vector<double> y;
    std::vector<double> b;
    std::string line;
    int line_no = 0;
    const auto parse = [](std::string_view s, double& out) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        if (!s.empty() && s.front() == '+') s.remove_prefix(1);
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && ptr == s.data() + s.size();
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto comma = line.find(',');
        double yv = 0.0;
        double bv = 0.0;
        const bool ok = comma != std::string::npos &&
                        parse(std::string_view(line).substr(0, comma), yv) &&
                        parse(std::string_view(line).substr(comma + 1), bv);
        if (!ok) {
            if (y.empty() && b.empty() && line_no == 1) continue;  // header row
            throw ConfigError("field.table", fmt::format("{}:{}: expected 'y_mm, B_T'", path.string(), line_no));
        }
        y.push_back(yv * 1e-3);
        b.push_back(bv);
    }
    try {
        return tabulated(std::move(y), std::move(b));
    } catch (const DomainError& e) {
        throw ConfigError("field.table", path.string() + ": " + e.what());
    }
}

double FieldProfile::at(double y) const {
    if (kind_ == FieldKind::Parametric) {
        const double s2 = 2.0 * sigma_ * sigma_;
        const double a = y - y_p_;
        const double c = y + y_p_;
        return b_peak_ * (std::exp(-a * a / s2) - std::exp(-c * c / s2));
    }
    if (!(y >= y_.front() && y <= y_.back()))
        throw DomainError(fmt::format("field queried at y = {:.6g} mm, outside the table [{:.6g}, {:.6g}] mm",
                                      y * 1e3, y_.front() * 1e3, y_.back() * 1e3));
    const auto it = std::upper_bound(y_.begin(), y_.end(), y);
    const auto hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(it - y_.begin(), y_.size() - 1));
    const auto lo = hi - 1;
    const double w = (y - y_[lo]) / (y_[hi] - y_[lo]);
    return b_[lo] + w * (b_[hi] - b_[lo]);
}

FieldProfile FieldProfile::scaled(double factor) const {
    FieldProfile p = *this;
    p.b_peak_ *= factor;
    for (auto& v : p.b_) v *= factor;
    return p;
}

double FieldProfile::coverage() const {
    if (kind_ == FieldKind::Parametric) return std::numeric_limits<double>::infinity();
    return std::min(-y_.front(), y_.back());
}

double field_at(const FieldProfile& profile, double y) { return profile.at(y); }

double drive_voltage(const DriveSignal& drive, double t) {
    const double s = std::sin(2.0 * kPi * (2.0 * drive.f_coil) * t + drive.phase);
    return s >= 0.0 ? drive.v_max : -drive.v_max;
}

double drive_flip_time(const DriveSignal& drive, long long k) {
    return (static_cast<double>(k) - drive.phase / kPi) / (4.0 * drive.f_coil);
}

ElectricalState electrical_state(const CoilSpec& coil, const FieldProfile& profile, double v_s, double y,
                                 double ydot) {
    const double bln = profile.at(y) * coil.l_coil * coil.n_turns;
    ElectricalState e;
    e.v_s = v_s;
    e.v_emf = bln * ydot;
    e.current = (v_s - e.v_emf) / coil.resistance;
    e.force = bln * e.current;
    e.p_mech = e.v_emf * e.current;
    e.p_heat = e.current * e.current * coil.resistance;
    e.p_net = v_s * e.current;
    return e;
}

ElectricalState electrical_state(const RobotConfig& cfg, const FieldProfile& profile, double y, double ydot,
                                 double t) {
    return electrical_state(cfg.coil, profile, drive_voltage(cfg.drive, t), y, ydot);
}

CycleReport quasi_static_cycle(const CoilSpec& coil, const FieldProfile& profile, double f_coil, double y_max,
                               double v_max, int samples) {
    if (samples < 4096) throw DomainError("quasi-static cycle needs at least 4096 samples");
    if (!(f_coil > 0.0)) throw DomainError("quasi-static cycle needs a positive frequency");
    const DriveSignal drive{v_max, f_coil, 0.0};
    const double period = 1.0 / f_coil;
    const double w = 2.0 * kPi * f_coil;
    CycleReport r;
    for (auto* v : {&r.t, &r.y, &r.v_s, &r.v_emf, &r.current, &r.force}) v->reserve(samples);
    double sum_mech = 0.0;
    double sum_heat = 0.0;
    double sum_net = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double t = (i + 0.5) * period / samples;
        const double y = y_max * std::sin(w * t);
        const double ydot = y_max * w * std::cos(w * t);
        const auto e = electrical_state(coil, profile, drive_voltage(drive, t), y, ydot);
        r.t.push_back(t);
        r.y.push_back(y);
        r.v_s.push_back(e.v_s);
        r.v_emf.push_back(e.v_emf);
        r.current.push_back(e.current);
        r.force.push_back(e.force);
        sum_mech += e.p_mech;
        sum_heat += e.p_heat;
        sum_net += e.p_net;
        const double scale = std::max({std::abs(e.p_net), std::abs(e.p_mech), std::abs(e.p_heat), 1e-300});
        r.identity_error = std::max(r.identity_error, std::abs(e.p_net - e.p_mech - e.p_heat) / scale);
    }
    r.p_mech_avg = sum_mech / samples;
    r.p_heat_avg = sum_heat / samples;
    r.p_net_avg = sum_net / samples;
    return r;
}

double max_transfer_power(const CoilSpec& coil, double v_max) {
    return 0.25 * v_max * v_max / coil.resistance;
}

FieldProfile calibrate_field(const RobotConfig& cfg, const FieldProfile& profile, double target_p_mech) {
    if (target_p_mech < 0.0) throw DomainError("calibration target must be non-negative");
    const auto p_mech = [&](double s) {
        return quasi_static_cycle(cfg.coil, profile.scaled(s), cfg.design.f_coil, cfg.coil.y_max, cfg.drive.v_max)
            .p_mech_avg;
    };
    if (target_p_mech == 0.0) return profile.scaled(0.0);

    const double bound = max_transfer_power(cfg.coil, cfg.drive.v_max);
    // Power is concave in the field scale with P(0) = 0. Find a positive
    // point, then double until the peak is bracketed by [0, 2h].
    double h = 1.0;
    for (int i = 0; i < 200 && !(p_mech(h) > 0.0); ++i) h *= 0.5;
    for (int i = 0; i < 200 && p_mech(2.0 * h) > p_mech(h); ++i) h *= 2.0;
    const double hi = 2.0 * h;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double pc = p_mech(c);
    double pd = p_mech(d);
    for (int i = 0; i < 200 && (b - a) > 1e-12 * b; ++i) {
        if (pc > pd) {
            b = d;
            d = c;
            pd = pc;
            c = b - g * (b - a);
            pc = p_mech(c);
        } else {
            a = c;
            c = d;
            pc = pd;
            d = a + g * (b - a);
            pd = p_mech(d);
        }
    }
    const double s_peak = 0.5 * (a + b);
    const double p_peak = p_mech(s_peak);
    if (target_p_mech > bound || target_p_mech > p_peak) {
        const double best = std::min(bound, p_peak);
        throw InfeasibleError(fmt::format("target P_mech {:.4g} mW is unreachable: this field shape peaks at {:.4g} "
                                          "mW and square-wave drive is bounded by (V_max/2)^2/R = {:.4g} mW",
                                          target_p_mech * 1e3, p_peak * 1e3, bound * 1e3),
                              best);
    }
    // Rising branch: P(0) = 0 < target <= P(s_peak).
    double x0 = 0.0;
    double x1 = s_peak;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (x0 + x1);
        const double p = p_mech(mid);
        if (p < target_p_mech) {
            x0 = mid;
        } else {
            x1 = mid;
        }
        if (std::abs(p - target_p_mech) <= 1e-9 * target_p_mech || x1 - x0 <= 1e-15 * s_peak) break;
    }
    return profile.scaled(0.5 * (x0 + x1));
}

FieldProfile resolve_field(const RobotConfig& cfg) {
    FieldProfile base;
    if (cfg.field.kind == FieldKind::Parametric) {
        base = FieldProfile::parametric(cfg.field.b_peak.value_or(1.0), cfg.field.y_p, cfg.field.sigma);
    } else {
        base = FieldProfile::load_table(cfg.field.table_path);
        if (base.coverage() < cfg.coil.y_max)
            throw ConfigError("field.table",
                              fmt::format("table covers |y| <= {:.4g} mm but the stroke reaches {:.4g} mm",
                                          base.coverage() * 1e3, cfg.coil.y_max * 1e3));
    }
    if (cfg.field.calibrate_p_mech) return calibrate_field(cfg, base, *cfg.field.calibrate_p_mech);
    return base;
}

}  // namespace spinwing::actuator
