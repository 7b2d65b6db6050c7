#include "spinwing/analysis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinwing/aero.hpp"
#include "spinwing/springs.hpp"

namespace spinwing::analysis {

using drivetrain::CycleRecord;
using drivetrain::Trace;

namespace {

/// Number of closed cycles; the last record only opens a cycle.
std::size_t complete_cycles(const Trace& trace) {
    return trace.cycles.empty() ? 0 : trace.cycles.size() - 1;
}

double rad_to_deg(double r) { return r * 180.0 / kPi; }

}  // namespace

std::vector<double> cycle_average_speeds(const Trace& trace) {
    std::vector<double> out;
    const auto n = complete_cycles(trace);
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& a = trace.cycles[i];
        const auto& b = trace.cycles[i + 1];
        out.push_back((b.theta_wing - a.theta_wing) / (b.t - a.t));
    }
    return out;
}

std::optional<double> detect_steady_state(const Trace& trace) {
    const auto avg = cycle_average_speeds(trace);
    if (avg.size() < static_cast<std::size_t>(kMinCycles))
        throw DomainError(fmt::format("trace holds {} complete coil cycles; steady-state detection needs {}",
                                      avg.size(), kMinCycles));
    const auto spread = [&](std::size_t j) {
        const auto [lo, hi] = std::minmax_element(avg.begin() + j, avg.begin() + j + kSettleWindow);
        double mean = 0.0;
        for (std::size_t i = j; i < j + kSettleWindow; ++i) mean += avg[i];
        mean /= kSettleWindow;
        const double width = *hi - *lo;
        if (std::abs(mean) < 1e-12) return width < 1e-12 ? 0.0 : std::numeric_limits<double>::infinity();
        return width / std::abs(mean);
    };
    const std::size_t last = avg.size() - kSettleWindow;
    std::optional<std::size_t> first_settled;
    for (std::size_t j = last + 1; j-- > 0;) {
        if (!(spread(j) < kSettleTolerance)) break;
        first_settled = j;
    }
    if (!first_settled) return std::nullopt;
    return trace.cycles[*first_settled].t;
}

namespace {

struct Window {
    std::size_t first{0};
    std::size_t last{0};  // index of the closing record
};

Window window_from(const Trace& trace, double from) {
    const auto n = complete_cycles(trace);
    Window w;
    w.last = n;
    w.first = n;
    for (std::size_t i = 0; i < n; ++i) {
        if (trace.cycles[i].t >= from) {
            w.first = i;
            break;
        }
    }
    if (w.first >= w.last) throw DomainError("no complete coil cycle in the requested window");
    return w;
}

}  // namespace

RippleDuty ripple_and_duty(const Trace& trace, double from) {
    const auto w = window_from(trace, from);
    const auto& a = trace.cycles[w.first];
    const auto& b = trace.cycles[w.last];
    const double span = b.t - a.t;
    const double mean = (b.theta_wing - a.theta_wing) / span;
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = w.first; i < w.last; ++i) {
        hi = std::max(hi, trace.cycles[i].omega_wing_max);
        lo = std::min(lo, trace.cycles[i].omega_wing_min);
    }
    RippleDuty r;
    r.ripple_pct = mean > 0.0 ? 100.0 * (hi - lo) / (2.0 * mean) : 0.0;
    r.duty_engaged = (b.work.engaged_time - a.work.engaged_time) / span;
    return r;
}

ToggleModel flywheel_toggle_model(double inertia, double f_ss, double p_leak, double half_period) {
    const double w = 2.0 * kPi * f_ss;
    const double stored = 0.5 * inertia * w * w;
    ToggleModel m;
    m.energy_drop = p_leak * half_period / stored;
    m.speed_drop = 0.5 * m.energy_drop;
    m.ripple = 0.5 * m.speed_drop;
    return m;
}

double lift_to_power(double lift_newton, double p_net) {
    return (lift_newton / kStandardGravity * 1e3) / p_net;
}

double scale_lift_to_power(double ltp, double mass_ratio) {
    if (!(mass_ratio > 0.0)) throw DomainError("mass ratio must be positive");
    return ltp * std::pow(mass_ratio, 2.0 / 3.0);
}

double ratchet_beam_load(double torque, double r_shaft, int n_beams) {
    if (!(r_shaft > 0.0) || n_beams < 1) throw DomainError("ratchet shaft radius and beam count must be positive");
    return torque / (r_shaft * n_beams);
}

SteadyStateReport make_report(const Trace& trace, const RobotConfig& cfg) {
    SteadyStateReport r;
    r.collision_warning = trace.collision_warning;
    const auto ledger = drivetrain::energy_ledger(trace.final_state, cfg, trace.e_total_initial);
    r.energy_residual_fraction =
        ledger.w_mech != 0.0 ? std::abs(ledger.residual) / std::abs(ledger.w_mech) : std::abs(ledger.residual);

    const auto n = complete_cycles(trace);
    if (n == 0) return r;
    double from = trace.cycles[n / 2].t;
    if (n >= static_cast<std::size_t>(kMinCycles)) {
        r.settled_at = detect_steady_state(trace);
        if (r.settled_at) {
            r.steady_state_reached = true;
            from = *r.settled_at;
        }
    }
    const auto w = window_from(trace, from);
    const auto& a = trace.cycles[w.first];
    const auto& b = trace.cycles[w.last];
    const double span = b.t - a.t;
    r.window_start = a.t;
    r.window_end = b.t;
    r.cycles_in_window = static_cast<int>(w.last - w.first);
    r.f_wing_ss = (b.theta_wing - a.theta_wing) / span / (2.0 * kPi);
    const auto rd = ripple_and_duty(trace, from);
    r.ripple_pct = rd.ripple_pct;
    r.duty_engaged = rd.duty_engaged;
    r.theta_coil_max = -std::numeric_limits<double>::infinity();
    r.theta_coil_min = std::numeric_limits<double>::infinity();
    for (std::size_t i = w.first; i < w.last; ++i) {
        r.theta_coil_max = std::max(r.theta_coil_max, trace.cycles[i].theta_coil_max);
        r.theta_coil_min = std::min(r.theta_coil_min, trace.cycles[i].theta_coil_min);
    }
    r.p_mech_avg = (b.work.mech - a.work.mech) / span;
    r.p_heat_avg = (b.work.heat - a.work.heat) / span;
    r.p_net_avg = (b.work.net - a.work.net) / span;
    r.p_aero_avg = (b.work.aero - a.work.aero) / span;
    r.p_friction_avg = (b.work.friction - a.work.friction) / span;
    r.f_lift_avg = (b.work.lift_impulse - a.work.lift_impulse) / span;
    r.lift_to_power = r.p_net_avg > 0.0 ? lift_to_power(r.f_lift_avg, r.p_net_avg) : 0.0;
    return r;
}

Budget budgets(const RobotConfig& cfg, const SteadyStateReport& report) {
    Budget b;
    b.mass_total = total_mass(cfg);
    b.lift_mass = report.f_lift_avg / kStandardGravity;
    b.lift_margin = b.lift_mass - b.mass_total;
    b.power_table = {{"P_mech", report.p_mech_avg},
                     {"P_heat", report.p_heat_avg},
                     {"P_net", report.p_net_avg},
                     {"P_aero", report.p_aero_avg},
                     {"P_friction", report.p_friction_avg}};
    return b;
}

DesignBudget design_budget(const RobotConfig& cfg, const actuator::FieldProfile& profile) {
    DesignBudget d;
    const auto c = aero::coefficients(cfg.wing.alpha);
    d.c_lift = c.lift;
    d.c_drag = c.drag;
    const double omega = 2.0 * kPi * cfg.design.f_wing;
    const auto f = aero::forces(cfg.wing, cfg.rho_air, omega);
    d.f_lift = f.lift;
    d.f_drag = f.drag;
    d.p_aero = f.power;
    d.drag_factor = drag_factor(cfg);
    d.tau_losses = loss_torque(cfg);
    d.p_friction = d.tau_losses * omega;

    d.b_peak = profile.kind() == FieldKind::Parametric ? profile.b_peak() : 0.0;
    const auto qs = actuator::quasi_static_cycle(cfg.coil, profile, cfg.design.f_coil, cfg.coil.y_max, cfg.drive.v_max);
    d.p_mech = qs.p_mech_avg;
    d.p_heat = qs.p_heat_avg;
    d.p_net = qs.p_net_avg;
    d.p_mech_bound = actuator::max_transfer_power(cfg.coil, cfg.drive.v_max);

    d.k_coil = cfg.k_coil;
    d.k_coil_resonance = springs::resonance_stiffness(cfg.J_coil, cfg.design.f_coil);
    d.required_swing = cfg.coil.y_max / cfg.coil.arm_radius;
    if (cfg.ti_spring && springs::effective_series(*cfg.ti_spring) > 0) {
        d.k_ti_spring = springs::spring_stiffness(*cfg.ti_spring);
        d.theta_max_ti = springs::max_rotation(*cfg.ti_spring);
    }
    d.k_con = cfg.k_con;
    if (cfg.steel_spring && springs::effective_series(*cfg.steel_spring) > 0) {
        d.k_steel_spring = springs::spring_stiffness(*cfg.steel_spring);
        d.theta_max_steel = springs::max_rotation(*cfg.steel_spring);
    }
    if (cfg.ratchet) {
        const double r_shaft = 0.5 * cfg.ratchet->shaft_diameter;
        const auto nf = springs::natural_frequency(cfg.k_con, springs::cylinder_inertia(cfg.ratchet->shaft_mass, r_shaft),
                                                   cfg.design.f_coil);
        d.shaft_natural_hz = nf.hz;
        d.shaft_ratio = nf.ratio;
        d.beam_load = ratchet_beam_load(f.torque + d.tau_losses, r_shaft, cfg.ratchet->n_beams);
    }

    d.j_wing = cfg.J_wing;
    d.e_kinetic = 0.5 * cfg.J_wing * omega * omega;
    d.toggle = flywheel_toggle_model(cfg.J_wing, cfg.design.f_wing, d.p_mech, 0.5 / cfg.design.f_coil);

    d.mass_total = total_mass(cfg);
    d.lift_mass = d.f_lift / kStandardGravity;
    d.lift_margin = d.lift_mass - d.mass_total;
    d.lift_to_power = d.p_net > 0.0 ? lift_to_power(d.f_lift, d.p_net) : 0.0;
    return d;
}

namespace {

nlohmann::ordered_json optional_json(const std::optional<double>& v, double scale = 1.0) {
    return v ? nlohmann::ordered_json(*v * scale) : nlohmann::ordered_json(nullptr);
}

}  // namespace

nlohmann::ordered_json report_to_json(const SteadyStateReport& r) {
    nlohmann::ordered_json j;
    j["steady_state_reached"] = r.steady_state_reached;
    j["settled_at_s"] = r.settled_at ? nlohmann::ordered_json(*r.settled_at) : nlohmann::ordered_json(nullptr);
    j["window_start_s"] = r.window_start;
    j["window_end_s"] = r.window_end;
    j["cycles_in_window"] = r.cycles_in_window;
    j["f_wing_ss_rev_s"] = r.f_wing_ss;
    j["omega_wing_ss_rad_s"] = 2.0 * kPi * r.f_wing_ss;
    j["ripple_pct"] = r.ripple_pct;
    j["ripple_fraction"] = r.ripple_pct / 100.0;
    j["duty_engaged"] = r.duty_engaged;
    j["duty_engaged_pct"] = 100.0 * r.duty_engaged;
    j["theta_coil_max_rad"] = r.theta_coil_max;
    j["theta_coil_max_deg"] = rad_to_deg(r.theta_coil_max);
    j["theta_coil_min_rad"] = r.theta_coil_min;
    j["theta_coil_min_deg"] = rad_to_deg(r.theta_coil_min);
    j["theta_coil_asymmetry_deg"] = rad_to_deg(std::abs(r.theta_coil_min) - std::abs(r.theta_coil_max));
    const auto power = [&](const char* name, double w) {
        j[fmt::format("{}_W", name)] = w;
        j[fmt::format("{}_mW", name)] = w * 1e3;
    };
    power("P_mech_avg", r.p_mech_avg);
    power("P_heat_avg", r.p_heat_avg);
    power("P_net_avg", r.p_net_avg);
    power("P_aero_avg", r.p_aero_avg);
    power("P_friction_avg", r.p_friction_avg);
    j["F_L_avg_N"] = r.f_lift_avg;
    j["F_L_avg_mN"] = r.f_lift_avg * 1e3;
    j["F_L_avg_mg"] = r.f_lift_avg / kStandardGravity * 1e6;
    j["lift_to_power_g_per_W"] = r.lift_to_power;
    j["energy_residual_fraction"] = r.energy_residual_fraction;
    j["collision_warning"] = r.collision_warning;
    return j;
}

nlohmann::ordered_json budget_to_json(const DesignBudget& d) {
    nlohmann::ordered_json j;
    j["C_L"] = d.c_lift;
    j["C_D"] = d.c_drag;
    j["F_L_N"] = d.f_lift;
    j["F_L_mN"] = d.f_lift * 1e3;
    j["F_D_N"] = d.f_drag;
    j["F_D_mN"] = d.f_drag * 1e3;
    j["P_aero_W"] = d.p_aero;
    j["P_aero_mW"] = d.p_aero * 1e3;
    j["drag_factor_N_m_s2"] = d.drag_factor;
    j["tau_losses_N_m"] = d.tau_losses;
    j["P_friction_W"] = d.p_friction;
    j["B_peak_T"] = d.b_peak;
    j["P_mech_W"] = d.p_mech;
    j["P_mech_mW"] = d.p_mech * 1e3;
    j["P_heat_W"] = d.p_heat;
    j["P_heat_mW"] = d.p_heat * 1e3;
    j["P_net_W"] = d.p_net;
    j["P_net_mW"] = d.p_net * 1e3;
    j["P_mech_bound_W"] = d.p_mech_bound;
    j["k_coil_N_m_per_rad"] = d.k_coil;
    j["k_coil_resonance_N_m_per_rad"] = d.k_coil_resonance;
    j["k_ti_spring_N_m_per_rad"] = optional_json(d.k_ti_spring);
    j["theta_max_ti_deg"] = optional_json(d.theta_max_ti, 180.0 / kPi);
    j["required_swing_deg"] = rad_to_deg(d.required_swing);
    j["k_con_N_m_per_rad"] = d.k_con;
    j["k_steel_spring_N_m_per_rad"] = optional_json(d.k_steel_spring);
    j["theta_max_steel_deg"] = optional_json(d.theta_max_steel, 180.0 / kPi);
    j["shaft_natural_Hz"] = optional_json(d.shaft_natural_hz);
    j["shaft_frequency_ratio"] = optional_json(d.shaft_ratio);
    j["J_wing_kg_m2"] = d.j_wing;
    j["J_wing_mg_mm2"] = d.j_wing * 1e12;
    j["E_kinetic_J"] = d.e_kinetic;
    j["E_kinetic_uJ"] = d.e_kinetic * 1e6;
    j["toggle_energy_drop_pct"] = 100.0 * d.toggle.energy_drop;
    j["toggle_speed_drop_pct"] = 100.0 * d.toggle.speed_drop;
    j["toggle_ripple_pct"] = 100.0 * d.toggle.ripple;
    j["ratchet_beam_load_N"] = optional_json(d.beam_load);
    j["mass_total_mg"] = d.mass_total * 1e6;
    j["lift_mg"] = d.lift_mass * 1e6;
    j["lift_margin_mg"] = d.lift_margin * 1e6;
    j["lift_to_power_g_per_W"] = d.lift_to_power;
    return j;
}

}  // namespace spinwing::analysis
