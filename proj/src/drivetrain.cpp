#include "spinwing/drivetrain.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

namespace spinwing::drivetrain {

std::string_view mode_name(RatchetMode mode) {
    return mode == RatchetMode::Engaged ? "engaged" : "freewheel";
}

std::string_view event_name(EventKind kind) {
    switch (kind) {
        case EventKind::Engage: return "engage";
        case EventKind::Disengage: return "disengage";
        case EventKind::DriveFlip: return "drive_flip";
        case EventKind::FlywheelStop: return "flywheel_stop";
        case EventKind::CollisionWarning: return "collision_warning";
    }
    return "unknown";
}

EnergyLedger energy_ledger(const SystemState& s, const RobotConfig& cfg, double e_total_initial) {
    EnergyLedger e;
    e.e_kin_coil = 0.5 * cfg.J_coil * s.omega_coil * s.omega_coil;
    e.e_spring_ti = 0.5 * cfg.k_coil * s.theta_coil * s.theta_coil;
    e.e_spring_steel = 0.5 * cfg.k_con * s.theta_con * s.theta_con;
    e.e_kin_wing = 0.5 * cfg.J_wing * s.omega_wing * s.omega_wing;
    e.e_total = e.e_kin_coil + e.e_spring_ti + e.e_spring_steel + e.e_kin_wing;
    e.w_mech = s.work.mech;
    e.w_heat = s.work.heat;
    e.w_aero = s.work.aero;
    e.w_friction = s.work.friction;
    e.residual = (e.e_total - e_total_initial) - (e.w_mech - e.w_aero - e.w_friction);
    return e;
}

namespace {

constexpr int kDim = 12;
using Vec = std::array<double, kDim>;

Vec pack(const SystemState& s) {
    return {s.theta_coil,    s.omega_coil,     s.theta_wing,       s.omega_wing,
            s.theta_con,     s.work.mech,      s.work.heat,        s.work.net,
            s.work.aero,     s.work.friction,  s.work.lift_impulse, s.work.engaged_time};
}

SystemState unpack(const Vec& v, double t, RatchetMode mode) {
    SystemState s;
    s.t = t;
    s.theta_coil = v[0];
    s.omega_coil = v[1];
    s.theta_wing = v[2];
    s.omega_wing = v[3];
    s.theta_con = v[4];
    s.mode = mode;
    s.work = {v[5], v[6], v[7], v[8], v[9], v[10], v[11]};
    return s;
}

bool finite(const SystemState& s) {
    const auto v = pack(s);
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

/// Receives every smooth piece of the solution and every event.
struct Drivetrain::Observer {
    virtual ~Observer() = default;
    virtual void piece(const SystemState& /*from*/, const SystemState& /*to*/, double /*v_s*/) {}
    virtual void event(double t, EventKind kind) = 0;
};

Drivetrain::Drivetrain(const RobotConfig& cfg, actuator::FieldProfile profile)
    : cfg_(cfg), profile_(std::move(profile)), b_(drag_factor(cfg)), tau_(loss_torque(cfg)) {}

double Drivetrain::dt_max() const { return 1.0 / (cfg_.drive.f_coil * cfg_.integrator.steps_per_cycle); }

SystemState Drivetrain::initial_state() const {
    SystemState s;
    s.theta_coil = cfg_.integrator.seed_theta_coil;
    return s;
}

StateRates Drivetrain::derivatives(const SystemState& s, double v_s) const {
    const double r = cfg_.coil.arm_radius;
    const auto e = actuator::electrical_state(cfg_.coil, profile_, v_s, r * s.theta_coil, r * s.omega_coil);
    StateRates d;
    d.theta_coil = s.omega_coil;
    d.omega_coil = (-cfg_.k_coil * s.theta_coil - cfg_.k_con * s.theta_con + r * e.force) / cfg_.J_coil;
    d.theta_wing = s.omega_wing;
    const double spring = cfg_.k_con * s.theta_con;
    if (s.omega_wing > 0.0) {
        d.omega_wing = (spring - b_ * s.omega_wing * s.omega_wing - tau_) / cfg_.J_wing;
    } else {
        // At rest the friction torque holds the flywheel until the spring
        // overcomes it; it never drives it backwards.
        d.omega_wing = std::max(0.0, spring - tau_) / cfg_.J_wing;
    }
    d.theta_con = s.mode == RatchetMode::Engaged ? s.omega_coil - s.omega_wing : 0.0;
    return d;
}

StateRates Drivetrain::rates_at(const SystemState& s) const {
    return derivatives(s, actuator::drive_voltage(cfg_.drive, s.t));
}

SystemState Drivetrain::rk4_step(const SystemState& s, double h, double v_s) const {
    const auto f = [&](const Vec& x) {
        const auto st = unpack(x, 0.0, s.mode);
        const auto d = derivatives(st, v_s);
        const double r = cfg_.coil.arm_radius;
        const auto e = actuator::electrical_state(cfg_.coil, profile_, v_s, r * st.theta_coil, r * st.omega_coil);
        const double w = std::max(0.0, st.omega_wing);
        const double lift = aero::forces(cfg_.wing, cfg_.rho_air, w).lift;
        return Vec{d.theta_coil, d.omega_coil, d.theta_wing, d.omega_wing, d.theta_con,
                   e.p_mech,     e.p_heat,     e.p_net,      b_ * w * w * w, tau_ * w,
                   lift,         s.mode == RatchetMode::Engaged ? 1.0 : 0.0};
    };
    const Vec x = pack(s);
    const Vec k1 = f(x);
    Vec tmp;
    for (int i = 0; i < kDim; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
    const Vec k2 = f(tmp);
    for (int i = 0; i < kDim; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
    const Vec k3 = f(tmp);
    for (int i = 0; i < kDim; ++i) tmp[i] = x[i] + h * k3[i];
    const Vec k4 = f(tmp);
    Vec out;
    for (int i = 0; i < kDim; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return unpack(out, s.t + h, s.mode);
}

SystemState Drivetrain::advance(const SystemState& start, double h, double v_s, Observer& obs) const {
    const double eps = cfg_.integrator.event_tol;
    const double t_target = start.t + h;
    SystemState s = start;
    bool just_disengaged = false;
    int n_events = 0;
    // Tracked directly so an uneventful step uses exactly h.
    double remaining = h;

    // Guard distances: negative means "not triggered", and a triggered guard is
    // localized once its value is within eps of the threshold.
    struct Guards {
        double disengage{-1.0};  // -theta_con, engaged mode
        double engage{-1.0};     // (omega_coil - omega_wing) - threshold, freewheel mode
        double stop{-1.0};       // -omega_wing, when the flywheel was spinning
    };
    const auto guards = [&](const SystemState& from, const SystemState& x) {
        Guards g;
        if (from.mode == RatchetMode::Engaged) {
            g.disengage = -x.theta_con;
        } else {
            g.engage = (x.omega_coil - x.omega_wing) - (just_disengaged ? eps : 0.0);
        }
        if (from.omega_wing > 0.0) g.stop = -x.omega_wing;
        return g;
    };
    const auto triggered = [](const Guards& g) { return g.disengage > 0.0 || g.engage > 0.0 || g.stop > 0.0; };
    const auto localized = [&](const Guards& g) {
        return (g.disengage <= 0.0 || g.disengage < eps) && (g.engage <= 0.0 || g.engage < eps) &&
               (g.stop <= 0.0 || g.stop < eps);
    };

    while (true) {
        if (s.mode == RatchetMode::Freewheel &&
            (s.omega_coil - s.omega_wing) > (just_disengaged ? eps : 0.0)) {
            s.mode = RatchetMode::Engaged;
            obs.event(s.t, EventKind::Engage);
            if (++n_events > 64) throw IntegrationFault("ratchet chatter: too many events in one step", s);
        }
        if (remaining <= 0.0) break;
        SystemState x = rk4_step(s, remaining, v_s);
        if (!finite(x)) throw IntegrationFault(fmt::format("non-finite state at t = {:.9g} s", s.t), s);
        Guards g = guards(s, x);
        if (!triggered(g)) {
            obs.piece(s, x, v_s);
            s = x;
            break;
        }
        // Bisect the step length for the earliest guard crossing.
        double lo = 0.0;
        double hi = remaining;
        bool converged = localized(g);
        for (int it = 0; it < 64 && !converged; ++it) {
            const double mid = 0.5 * (lo + hi);
            const SystemState xm = rk4_step(s, mid, v_s);
            const Guards gm = guards(s, xm);
            if (triggered(gm)) {
                hi = mid;
                x = xm;
                g = gm;
                converged = localized(g);
            } else {
                lo = mid;
            }
        }
        if (!converged)
            throw IntegrationFault(
                fmt::format("event localization did not converge within 64 bisections near t = {:.9g} s", s.t), s);
        if (hi == remaining) x.t = t_target;
        obs.piece(s, x, v_s);
        remaining = hi == remaining ? 0.0 : remaining - hi;
        s = x;
        if (g.stop > 0.0) {
            s.omega_wing = 0.0;
            obs.event(s.t, EventKind::FlywheelStop);
        }
        if (g.disengage > 0.0) {
            s.theta_con = 0.0;
            s.mode = RatchetMode::Freewheel;
            just_disengaged = true;
            obs.event(s.t, EventKind::Disengage);
        } else if (g.engage > 0.0) {
            s.mode = RatchetMode::Engaged;
            obs.event(s.t, EventKind::Engage);
        }
        if (++n_events > 64) throw IntegrationFault("ratchet chatter: too many events in one step", s);
    }
    s.t = t_target;
    return s;
}

SystemState Drivetrain::step(const SystemState& state, double h, double v_s, std::vector<Event>* events) const {
    struct Collect final : Observer {
        std::vector<Event>* out{nullptr};
        void event(double t, EventKind kind) override {
            if (out != nullptr) out->push_back({t, kind});
        }
    } obs;
    obs.out = events;
    return advance(state, h, v_s, obs);
}

Sample Drivetrain::make_sample(const SystemState& s, double v_s) const {
    Sample out;
    out.state = s;
    const double r = cfg_.coil.arm_radius;
    out.electrical = actuator::electrical_state(cfg_.coil, profile_, v_s, r * s.theta_coil, r * s.omega_coil);
    out.aero = aero::forces(cfg_.wing, cfg_.rho_air, std::max(0.0, s.omega_wing));
    out.e_total = energy_ledger(s, cfg_).e_total;
    return out;
}

namespace {

/// Cubic Hermite interpolation of one coordinate across a smooth piece.
double hermite(double x0, double d0, double x1, double d1, double h, double u) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    return (2 * u3 - 3 * u2 + 1) * x0 + (u3 - 2 * u2 + u) * h * d0 + (-2 * u3 + 3 * u2) * x1 +
           (u3 - u2) * h * d1;
}

}  // namespace

Trace Drivetrain::simulate(const SimulationOptions& options) const {
    if (!(options.t_end > 0.0)) throw DomainError("simulation end time must be positive");
    const SystemState start = options.initial.value_or(initial_state());
    if (!(options.t_end > start.t)) throw DomainError("simulation end time must follow the start time");

    Trace trace;
    trace.f_coil = cfg_.drive.f_coil;
    trace.e_total_initial = energy_ledger(start, cfg_).e_total;

    struct Recorder final : Observer {
        const Drivetrain* self{nullptr};
        Trace* trace{nullptr};
        bool record_samples{true};
        double output_dt{0.0};
        long long next_sample{0};
        double collision_limit{0.0};
        CycleRecord* cycle{nullptr};

        void event(double t, EventKind kind) override { trace->events.push_back({t, kind}); }

        void extremes(const SystemState& s) {
            if (cycle == nullptr) return;
            cycle->theta_coil_max = std::max(cycle->theta_coil_max, s.theta_coil);
            cycle->theta_coil_min = std::min(cycle->theta_coil_min, s.theta_coil);
            cycle->omega_wing_max = std::max(cycle->omega_wing_max, s.omega_wing);
            cycle->omega_wing_min = std::min(cycle->omega_wing_min, s.omega_wing);
        }

        void piece(const SystemState& a, const SystemState& b, double v_s) override {
            extremes(b);
            if (!trace->collision_warning && b.theta_coil > collision_limit) {
                trace->collision_warning = true;
                trace->collision_time = b.t;
                trace->events.push_back({b.t, EventKind::CollisionWarning});
            }
            if (!record_samples) return;
            double ts = static_cast<double>(next_sample) * output_dt;
            if (ts > b.t) return;
            const auto da = self->derivatives(a, v_s);
            const auto db = self->derivatives(b, v_s);
            const double h = b.t - a.t;
            while (ts <= b.t) {
                SystemState s = b;
                if (ts < b.t && h > 0.0) {
                    const double u = (ts - a.t) / h;
                    s = a;
                    s.t = ts;
                    s.theta_coil = hermite(a.theta_coil, da.theta_coil, b.theta_coil, db.theta_coil, h, u);
                    s.omega_coil = hermite(a.omega_coil, da.omega_coil, b.omega_coil, db.omega_coil, h, u);
                    s.theta_wing = hermite(a.theta_wing, da.theta_wing, b.theta_wing, db.theta_wing, h, u);
                    s.omega_wing = hermite(a.omega_wing, da.omega_wing, b.omega_wing, db.omega_wing, h, u);
                    // The flywheel never reverses; keep interpolation overshoot at rest from showing it.
                    if (a.omega_wing >= 0.0 && b.omega_wing >= 0.0) s.omega_wing = std::max(0.0, s.omega_wing);
                    s.theta_con = std::max(0.0, hermite(a.theta_con, da.theta_con, b.theta_con, db.theta_con, h, u));
                    // Work integrals are linear in time across the piece.
                    const auto lerp = [u](double x0, double x1) { return x0 + u * (x1 - x0); };
                    s.work = {lerp(a.work.mech, b.work.mech),
                              lerp(a.work.heat, b.work.heat),
                              lerp(a.work.net, b.work.net),
                              lerp(a.work.aero, b.work.aero),
                              lerp(a.work.friction, b.work.friction),
                              lerp(a.work.lift_impulse, b.work.lift_impulse),
                              lerp(a.work.engaged_time, b.work.engaged_time)};
                }
                s.t = ts;
                trace->samples.push_back(self->make_sample(s, v_s));
                ++next_sample;
                ts = static_cast<double>(next_sample) * output_dt;
            }
        }
    } rec;
    rec.self = this;
    rec.trace = &trace;
    rec.record_samples = options.record_samples;
    rec.output_dt = cfg_.integrator.output_dt;
    rec.collision_limit = cfg_.design.collision_limit;
    rec.next_sample = static_cast<long long>(std::ceil(start.t / rec.output_dt - 1e-9));

    const auto new_cycle = [&](const SystemState& s) {
        trace.cycles.push_back({s.t, s.theta_wing, s.work, s.theta_coil, s.theta_coil, s.omega_wing, s.omega_wing});
        rec.cycle = &trace.cycles.back();
    };
    if (options.record_samples) trace.samples.reserve(static_cast<std::size_t>((options.t_end - start.t) / rec.output_dt) + 2);
    trace.cycles.reserve(static_cast<std::size_t>((options.t_end - start.t) * cfg_.drive.f_coil) + 2);
    new_cycle(start);
    if (options.record_samples && static_cast<double>(rec.next_sample) * rec.output_dt <= start.t) {
        trace.samples.push_back(make_sample(start, actuator::drive_voltage(cfg_.drive, start.t)));
        ++rec.next_sample;
    }

    const auto& drive = cfg_.drive;
    long long k = static_cast<long long>(std::floor(start.t * 4.0 * drive.f_coil + drive.phase / kPi));
    while (actuator::drive_flip_time(drive, k) <= start.t) ++k;
    while (k > 0 && actuator::drive_flip_time(drive, k - 1) > start.t) --k;

    const double dt = dt_max();
    SystemState s = start;
    double a = start.t;
    while (a < options.t_end) {
        const double flip = actuator::drive_flip_time(drive, k);
        const double b = std::min(flip, options.t_end);
        const double v_s = actuator::drive_voltage(drive, 0.5 * (a + b));
        const auto n = std::max<long long>(1, static_cast<long long>(std::ceil((b - a) / dt - 1e-9)));
        for (long long i = 1; i <= n; ++i) {
            const double t_next = i == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
            const SystemState before = s;
            s = advance(s, t_next - s.t, v_s, rec);
            if (s.theta_con < 0.0)
                throw IntegrationFault(fmt::format("negative connection-spring angle at t = {:.9g} s", s.t), before);
        }
        if (b == flip && flip < options.t_end) {
            if (options.record_flip_events) trace.events.push_back({flip, EventKind::DriveFlip});
            if (k % 4 == 0) new_cycle(s);
        }
        if (b == flip) ++k;
        a = b;
    }
    trace.final_state = s;
    return trace;
}

Trace simulate(const RobotConfig& cfg, const actuator::FieldProfile& profile, double t_end) {
    SimulationOptions options;
    options.t_end = t_end;
    return Drivetrain(cfg, profile).simulate(options);
}

void write_trace_csv(const Trace& trace, std::ostream& out) {
    out << "t,theta_coil,omega_coil,theta_wing,omega_wing,theta_con,mode,V_s,V_emf,I_current,F_coil,P_mech,"
           "P_heat,F_L,F_D,E_total\n";
    for (const auto& smp : trace.samples) {
        const auto& s = smp.state;
        const auto& e = smp.electrical;
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", s.t, s.theta_coil, s.omega_coil,
                           s.theta_wing, s.omega_wing, s.theta_con, mode_name(s.mode), e.v_s, e.v_emf, e.current,
                           e.force, e.p_mech, e.p_heat, smp.aero.lift, smp.aero.drag, smp.e_total);
    }
}

void write_events_csv(const Trace& trace, std::ostream& out) {
    out << "t,event_kind\n";
    for (const auto& e : trace.events) out << fmt::format("{},{}\n", e.t, event_name(e.kind));
}

}  // namespace spinwing::drivetrain
