#include "spinwing/cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "spinwing/actuator.hpp"
#include "spinwing/analysis.hpp"
#include "spinwing/drivetrain.hpp"
#include "spinwing/params.hpp"

namespace spinwing::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

/// Bad flags or an ill-formed sweep/tune request.
class UsageError : public Error {
public:
    using Error::Error;
};

/// A tuning target that the bracket does not contain.
class TuneFailure : public Error {
public:
    using Error::Error;
};

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
    return "spinwing_out";
}

std::string hex_hash(std::uint64_t h) { return fmt::format("{:016x}", h); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw Error("failed writing '" + path.string() + "'");
}

void write_manifest(const fs::path& dir, const std::string& command, const RobotConfig& cfg,
                    const std::vector<std::string>& outputs) {
    ordered_json j;
    j["command"] = command;
    j["config_hash"] = hex_hash(config_hash(cfg));
    j["outputs"] = outputs;
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

double parse_flag(const std::string& flag, const std::string& text, Quantity q) {
    try {
        return parse_quantity(text, q);
    } catch (const ConfigError& e) {
        throw UsageError(fmt::format("--{}: {}", flag, e.what()));
    }
}

struct Loaded {
    ConfigMap map;
    RobotConfig cfg;
};

Loaded load(const std::string& path) {
    auto map = load_config_map(path);
    auto cfg = config_from_map(map);
    return {std::move(map), std::move(cfg)};
}

/// Sets one key in a raw config map. Overriding a stiffness directly drops
/// the spring section it would otherwise have to agree with, and giving
/// one of B_peak / calibrate_P_mech drops the other.
void apply_override(ConfigMap& map, const std::string& key, const std::string& value) {
    if (!is_known_key(key)) throw UsageError("unknown config key '" + key + "'");
    const auto drop_section = [&](const std::string& section) {
        std::erase_if(map, [&](const auto& kv) { return kv.first.starts_with(section + "."); });
    };
    if (key == "stiffness.k_con") drop_section("steel_spring");
    if (key == "stiffness.k_coil") drop_section("ti_spring");
    if (key == "field.B_peak") map.erase("field.calibrate_P_mech");
    if (key == "field.calibrate_P_mech") map.erase("field.B_peak");
    if (key == "coil.l_coil") map.erase("coil.mean_radius");
    if (key == "coil.mean_radius") map.erase("coil.l_coil");
    map[key] = value;
}

analysis::SteadyStateReport run_to_report(const RobotConfig& cfg, const actuator::FieldProfile& profile,
                                          double t_end) {
    drivetrain::SimulationOptions options;
    options.t_end = t_end;
    options.record_samples = false;
    options.record_flip_events = false;
    const auto trace = drivetrain::Drivetrain(cfg, profile).simulate(options);
    return analysis::make_report(trace, cfg);
}

std::string deg(double rad) { return fmt::format("{:.2f} deg", rad * 180.0 / kPi); }

void print_report(std::ostream& out, const analysis::SteadyStateReport& r) {
    if (r.steady_state_reached) {
        out << fmt::format("steady state reached at {:.3f} s\n", *r.settled_at);
    } else {
        out << "steady state NOT reached (metrics over the last part of the trace)\n";
    }
    out << fmt::format("  f_wing        {:.3f} rev/s\n", r.f_wing_ss);
    out << fmt::format("  ripple        +/-{:.3f} %\n", r.ripple_pct);
    out << fmt::format("  duty engaged  {:.3f}\n", r.duty_engaged);
    out << fmt::format("  theta_coil    max {}  min {}\n", deg(r.theta_coil_max), deg(r.theta_coil_min));
    out << fmt::format("  P_mech {:.3f} mW  P_heat {:.3f} mW  P_net {:.3f} mW\n", r.p_mech_avg * 1e3,
                       r.p_heat_avg * 1e3, r.p_net_avg * 1e3);
    out << fmt::format("  P_aero {:.3f} mW  P_friction {:.3f} mW\n", r.p_aero_avg * 1e3, r.p_friction_avg * 1e3);
    out << fmt::format("  lift          {:.2f} mg ({:.4f} mN)\n", r.f_lift_avg / kStandardGravity * 1e6,
                       r.f_lift_avg * 1e3);
    out << fmt::format("  lift/power    {:.3f} g/W\n", r.lift_to_power);
    if (r.collision_warning) out << "  WARNING: coil swing exceeded the collision limit\n";
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const std::string& config_path, const std::string& t_end_text, const std::string& out_flag,
                 std::ostream& out) {
    const double t_end = parse_flag("t-end", t_end_text, Quantity::Time);
    if (!(t_end > 0.0)) throw UsageError("--t-end must be positive");
    const auto [map, cfg] = load(config_path);
    const auto profile = actuator::resolve_field(cfg);
    drivetrain::SimulationOptions options;
    options.t_end = t_end;
    const auto trace = drivetrain::Drivetrain(cfg, profile).simulate(options);
    const auto report = analysis::make_report(trace, cfg);

    const auto dir = output_dir(out_flag);
    fs::create_directories(dir);
    {
        std::ostringstream s;
        drivetrain::write_trace_csv(trace, s);
        write_text(dir / "trace.csv", s.str());
    }
    {
        std::ostringstream s;
        drivetrain::write_events_csv(trace, s);
        write_text(dir / "events.csv", s.str());
    }
    auto j = analysis::report_to_json(report);
    j["t_end_s"] = t_end;
    write_text(dir / "report.json", j.dump(2) + "\n");
    write_manifest(dir, "simulate", cfg, {"trace.csv", "events.csv", "report.json"});

    print_report(out, report);
    out << fmt::format("wrote {}\n", dir.string());
    return kExitOk;
}

// ------------------------------------------------------------------ budget

void print_budget(std::ostream& out, const RobotConfig& cfg, const analysis::DesignBudget& d) {
    const auto opt = [](const std::optional<double>& v, double scale, const char* unit) {
        return v ? fmt::format("{:.4g} {}", *v * scale, unit) : std::string("n/a");
    };
    out << fmt::format("Aerodynamics at {:.2f} rev/s\n", cfg.design.f_wing);
    out << fmt::format("  C_L {:.4f}  C_D {:.4f}\n", d.c_lift, d.c_drag);
    out << fmt::format("  F_L {:.4f} mN  F_D {:.4f} mN  P_aero {:.4f} mW\n", d.f_lift * 1e3, d.f_drag * 1e3,
                       d.p_aero * 1e3);
    out << fmt::format("  drag factor b {:.5g} N*m*s^2  tau_losses {:.4g} uN*m  P_friction {:.4f} mW\n",
                       d.drag_factor, d.tau_losses * 1e6, d.p_friction * 1e3);
    out << fmt::format("Actuator, quasi-static at {:.2f} Hz, stroke {:.3f} mm, +/-{:.3f} V\n", cfg.design.f_coil,
                       cfg.coil.y_max * 1e3, cfg.drive.v_max);
    out << fmt::format("  B_peak {:.5g} T\n", d.b_peak);
    out << fmt::format("  P_mech {:.4f} mW  P_heat {:.4f} mW  P_net {:.4f} mW  (bound {:.4f} mW)\n",
                       d.p_mech * 1e3, d.p_heat * 1e3, d.p_net * 1e3, d.p_mech_bound * 1e3);
    out << "Springs\n";
    out << fmt::format("  k_coil {:.5g} uN*m/rad (resonance {:.5g}, Ti spring model {})\n", d.k_coil * 1e6,
                       d.k_coil_resonance * 1e6, opt(d.k_ti_spring, 1e6, "uN*m/rad"));
    out << fmt::format("  Ti max rotation {} vs required swing {}\n", opt(d.theta_max_ti, 180.0 / kPi, "deg"),
                       deg(d.required_swing));
    if (d.theta_max_ti && *d.theta_max_ti < d.required_swing) out << "  WARNING: Ti spring cannot take the stroke\n";
    out << fmt::format("  k_con {:.5g} uN*m/rad (steel spring model {}), max rotation {}\n", d.k_con * 1e6,
                       opt(d.k_steel_spring, 1e6, "uN*m/rad"), opt(d.theta_max_steel, 180.0 / kPi, "deg"));
    if (d.shaft_natural_hz)
        out << fmt::format("  ratchet shaft natural frequency {:.1f} Hz ({:.2f}x the coil frequency{})\n",
                           *d.shaft_natural_hz, *d.shaft_ratio, *d.shaft_ratio >= 2.0 ? ", quasi-static" : "");
    if (d.beam_load) out << fmt::format("  ratchet per-beam load {:.4g} mN\n", *d.beam_load * 1e3);
    out << "Flywheel\n";
    out << fmt::format("  J_wing {:.5g} mg*mm^2  E_kinetic {:.4f} uJ\n", d.j_wing * 1e12, d.e_kinetic * 1e6);
    out << fmt::format("  toggle model: energy drop {:.3f} %, speed drop {:.3f} %, ripple +/-{:.3f} %\n",
                       100.0 * d.toggle.energy_drop, 100.0 * d.toggle.speed_drop, 100.0 * d.toggle.ripple);
    out << "Mass and lift\n";
    out << fmt::format("  mass {:.2f} mg  lift {:.2f} mg  margin {:+.2f} mg  lift/power {:.3f} g/W\n",
                       d.mass_total * 1e6, d.lift_mass * 1e6, d.lift_margin * 1e6, d.lift_to_power);
}

int cmd_budget(const std::string& config_path, bool as_json, std::ostream& out) {
    const auto [map, cfg] = load(config_path);
    const auto profile = actuator::resolve_field(cfg);
    const auto budget = analysis::design_budget(cfg, profile);
    if (as_json) {
        out << analysis::budget_to_json(budget).dump(2) << "\n";
    } else {
        print_budget(out, cfg, budget);
    }
    return kExitOk;
}

// -------------------------------------------------------------------- tune

struct TuneRequest {
    std::string target;
    std::string lo_text;
    std::string hi_text;
    std::string goal_text;
    std::string t_end_text{"2 s"};
    double rel_tol{1e-3};
    int max_iter{30};
};

int cmd_tune(const std::string& config_path, const TuneRequest& req, const std::string& out_flag,
             std::ostream& out) {
    std::string key;
    Quantity var_q{};
    Quantity goal_q{};
    if (req.target == "kcon_max_swing") {
        key = "stiffness.k_con";
        var_q = Quantity::Stiffness;
        goal_q = Quantity::Angle;
    } else if (req.target == "vmax_lift") {
        key = "drive.V_max";
        var_q = Quantity::Voltage;
        goal_q = Quantity::Mass;
    } else {
        throw UsageError("--target must be kcon_max_swing or vmax_lift");
    }
    const double lo0 = parse_flag("lo", req.lo_text, var_q);
    const double hi0 = parse_flag("hi", req.hi_text, var_q);
    if (!(lo0 < hi0)) throw UsageError("--lo must be below --hi");
    const double t_end = parse_flag("t-end", req.t_end_text, Quantity::Time);
    if (!(t_end > 0.0)) throw UsageError("--t-end must be positive");

    const auto [base_map, base_cfg] = load(config_path);
    double goal = 0.0;
    if (!req.goal_text.empty()) {
        goal = parse_flag("goal", req.goal_text, goal_q);
    } else {
        goal = req.target == "kcon_max_swing" ? base_cfg.design.collision_limit : 138e-6;
    }
    const auto profile = actuator::resolve_field(base_cfg);

    // Metric oriented so that "satisfied" means metric - goal <= 0.
    std::map<std::uint64_t, analysis::SteadyStateReport> cache;
    ordered_json probes = ordered_json::array();
    const auto probe = [&](double x) {
        auto map = base_map;
        apply_override(map, key, format_exact(x));
        const auto cfg = config_from_map(map);
        const auto h = config_hash(cfg);
        auto it = cache.find(h);
        if (it == cache.end()) it = cache.emplace(h, run_to_report(cfg, profile, t_end)).first;
        const auto& r = it->second;
        const double metric =
            req.target == "kcon_max_swing" ? r.theta_coil_max : r.f_lift_avg / kStandardGravity;
        const double g = req.target == "kcon_max_swing" ? metric - goal : goal - metric;
        ordered_json p;
        p["value"] = x;
        p["metric"] = metric;
        p["satisfied"] = g <= 0.0;
        p["steady_state_reached"] = r.steady_state_reached;
        probes.push_back(p);
        return std::pair{g, r};
    };

    double lo = lo0;
    double hi = hi0;
    auto [g_lo, r_lo] = probe(lo);
    auto [g_hi, r_hi] = probe(hi);
    if ((g_lo <= 0.0) == (g_hi <= 0.0)) {
        const auto describe = [&](const analysis::SteadyStateReport& r) {
            return req.target == "kcon_max_swing" ? deg(r.theta_coil_max)
                                                  : fmt::format("{:.2f} mg", r.f_lift_avg / kStandardGravity * 1e6);
        };
        throw TuneFailure(fmt::format("target not bracketed: {} = {} gives {}, {} = {} gives {}", key,
                                      req.lo_text, describe(r_lo), key, req.hi_text, describe(r_hi)));
    }
    const bool lo_satisfied = g_lo <= 0.0;
    for (int i = 0; i < req.max_iter && (hi - lo) > req.rel_tol * std::abs(0.5 * (lo + hi)); ++i) {
        const double mid = 0.5 * (lo + hi);
        auto [g_mid, r_mid] = probe(mid);
        if ((g_mid <= 0.0) == lo_satisfied) {
            lo = mid;
            r_lo = r_mid;
        } else {
            hi = mid;
            r_hi = r_mid;
        }
    }
    const double tuned = lo_satisfied ? lo : hi;
    const auto& tuned_report = lo_satisfied ? r_lo : r_hi;

    const auto dir = output_dir(out_flag);
    fs::create_directories(dir);
    ordered_json j;
    j["target"] = req.target;
    j["key"] = key;
    j["goal"] = goal;
    j["tuned_value"] = tuned;
    j["bracket"] = {lo, hi};
    j["probes"] = probes;
    j["report"] = analysis::report_to_json(tuned_report);
    write_text(dir / "tune.json", j.dump(2) + "\n");
    write_text(dir / "report.json", analysis::report_to_json(tuned_report).dump(2) + "\n");
    write_manifest(dir, "tune", base_cfg, {"tune.json", "report.json"});

    const bool stiff = req.target == "kcon_max_swing";
    out << fmt::format("tuned {} = {}\n", key,
                       stiff ? fmt::format("{:.5g} uN*m/rad", tuned * 1e6) : fmt::format("{:.5g} V", tuned));
    print_report(out, tuned_report);
    out << fmt::format("wrote {}\n", dir.string());
    return kExitOk;
}

// ------------------------------------------------------------------- sweep

struct Axis {
    std::string key;
    std::vector<std::string> values;
};

std::vector<std::string> json_keys(const ordered_json& j) {
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    return keys;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string json_cell(const ordered_json& v) {
    if (v.is_null()) return "";
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_float()) return fmt::format("{}", v.get<double>());
    if (v.is_number()) return v.dump();
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
}

int cmd_sweep(const std::string& config_path, const std::string& spec_path, const std::string& out_flag,
              int parallelism_flag, std::ostream& out, std::ostream& err) {
    std::ifstream in(spec_path);
    if (!in) throw UsageError("cannot open sweep spec '" + spec_path + "'");
    ordered_json spec;
    try {
        spec = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(fmt::format("sweep spec '{}': {}", spec_path, e.what()));
    }
    if (!spec.is_object() || !spec.contains("axes") || !spec["axes"].is_array() || spec["axes"].empty())
        throw UsageError("sweep spec needs a non-empty 'axes' array");

    std::vector<Axis> axes;
    for (const auto& a : spec["axes"]) {
        if (!a.is_object() || !a.contains("key") || !a["key"].is_string() || !a.contains("values") ||
            !a["values"].is_array())
            throw UsageError("each axis needs a 'key' string and a 'values' array");
        Axis axis;
        axis.key = a["key"].get<std::string>();
        if (!is_known_key(axis.key)) throw UsageError("sweep axis '" + axis.key + "' is not a config key");
        for (const auto& v : a["values"]) {
            if (v.is_string()) {
                axis.values.push_back(v.get<std::string>());
            } else if (v.is_number()) {
                axis.values.push_back(format_exact(v.get<double>()));
            } else {
                throw UsageError("sweep axis '" + axis.key + "' holds a value that is neither string nor number");
            }
        }
        if (axis.values.empty()) throw UsageError("sweep axis '" + axis.key + "' has an empty value list");
        axes.push_back(std::move(axis));
    }

    const auto max_points = spec.value("max_points", 10000);
    std::size_t n_points = 1;
    for (const auto& a : axes) {
        n_points *= a.values.size();
        if (n_points > static_cast<std::size_t>(max_points))
            throw UsageError(fmt::format("sweep has more than {} points", max_points));
    }

    const auto report_keys = json_keys(analysis::report_to_json({}));
    const auto budget_keys = json_keys(analysis::budget_to_json({}));
    const auto contains = [](const std::vector<std::string>& v, const std::string& s) {
        return std::find(v.begin(), v.end(), s) != v.end();
    };
    std::vector<std::string> metrics;
    if (spec.contains("metrics")) {
        if (!spec["metrics"].is_array()) throw UsageError("'metrics' must be an array of names");
        for (const auto& m : spec["metrics"]) {
            if (!m.is_string()) throw UsageError("'metrics' must be an array of names");
            metrics.push_back(m.get<std::string>());
        }
    } else if (spec.contains("metric") && spec["metric"].is_string()) {
        metrics.push_back(spec["metric"].get<std::string>());
    }
    if (metrics.empty()) metrics = {"f_wing_ss_rev_s", "lift_to_power_g_per_W"};
    bool needs_sim = false;
    for (const auto& m : metrics) {
        if (contains(report_keys, m)) {
            needs_sim = true;
        } else if (!contains(budget_keys, m)) {
            throw UsageError("unknown sweep metric '" + m + "'");
        }
    }
    const double t_end = spec.contains("t_end")
                             ? parse_flag("t_end", spec["t_end"].is_string() ? spec["t_end"].get<std::string>()
                                                                             : json_cell(spec["t_end"]),
                                          Quantity::Time)
                             : 2.0;
    if (!(t_end > 0.0)) throw UsageError("sweep t_end must be positive");
    int parallelism = parallelism_flag > 0 ? parallelism_flag : spec.value("parallelism", 1);
    parallelism = std::clamp(parallelism, 1, 256);

    const auto [base_map, base_cfg] = load(config_path);
    const auto base_profile = actuator::resolve_field(base_cfg);

    struct Row {
        std::vector<std::string> values;
        std::string status;
        std::vector<std::string> cells;
    };
    std::vector<Row> rows(n_points);
    for (std::size_t p = 0; p < n_points; ++p) {
        std::size_t rem = p;
        rows[p].values.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            rows[p].values[a] = axes[a].values[rem % axes[a].values.size()];
            rem /= axes[a].values.size();
        }
    }

    const auto run_point = [&](Row& row) {
        try {
            auto map = base_map;
            bool touches_field = false;
            for (std::size_t a = 0; a < axes.size(); ++a) {
                apply_override(map, axes[a].key, row.values[a]);
                touches_field = touches_field || axes[a].key.starts_with("field.");
            }
            const auto cfg = config_from_map(map);
            const auto profile = touches_field ? actuator::resolve_field(cfg) : base_profile;
            ordered_json values = analysis::budget_to_json(analysis::design_budget(cfg, profile));
            if (needs_sim) values.update(analysis::report_to_json(run_to_report(cfg, profile, t_end)));
            for (const auto& m : metrics) row.cells.push_back(json_cell(values[m]));
            row.status = "ok";
        } catch (const std::exception& e) {
            row.cells.assign(metrics.size(), "");
            std::string what = e.what();
            // Keep one row per point even when the message lists several violations.
            for (auto pos = what.find('\n'); pos != std::string::npos; pos = what.find('\n', pos))
                what.replace(pos, 1, "; ");
            row.status = "error: " + what;
        }
    };

    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < n_points; i = next++) run_point(rows[i]);
    };
    std::vector<std::thread> pool;
    const int n_threads = static_cast<int>(std::min<std::size_t>(parallelism, n_points));
    for (int t = 1; t < n_threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::ostringstream csv;
    csv << "point";
    for (const auto& a : axes) csv << ',' << csv_field(a.key);
    csv << ",status";
    for (const auto& m : metrics) csv << ',' << csv_field(m);
    csv << '\n';
    std::size_t failures = 0;
    for (std::size_t p = 0; p < n_points; ++p) {
        const auto& row = rows[p];
        csv << p;
        for (const auto& v : row.values) csv << ',' << csv_field(v);
        csv << ',' << csv_field(row.status);
        for (const auto& c : row.cells) csv << ',' << csv_field(c);
        csv << '\n';
        if (row.status != "ok") {
            ++failures;
            err << fmt::format("point {} failed: {}\n", p, row.status);
        }
    }
    const auto dir = output_dir(out_flag);
    fs::create_directories(dir);
    write_text(dir / "sweep.csv", csv.str());
    write_manifest(dir, "sweep", base_cfg, {"sweep.csv"});
    out << fmt::format("{} points, {} failed; wrote {}\n", n_points, failures, (dir / "sweep.csv").string());
    return failures == n_points ? kExitFault : kExitOk;
}

// ------------------------------------------------------------------ schema

int cmd_schema(bool as_text, std::ostream& out) {
    if (as_text) {
        for (const auto& e : config_schema()) {
            const auto unit = display_unit(e.quantity);
            out << fmt::format("{:<30} {:<10} {:<14} {:<9} {}\n", e.key, unit.empty() ? "-" : std::string(unit),
                               e.default_value.empty() ? "-" : e.default_value, e.required ? "required" : "optional",
                               e.description);
        }
        return kExitOk;
    }
    ordered_json j = ordered_json::array();
    for (const auto& e : config_schema()) {
        ordered_json entry;
        entry["key"] = e.key;
        entry["quantity"] = std::string(quantity_name(e.quantity));
        entry["si_unit"] = std::string(si_unit(e.quantity));
        entry["display_unit"] = std::string(display_unit(e.quantity));
        entry["default"] = e.default_value.empty() ? ordered_json(nullptr) : ordered_json(e.default_value);
        entry["required"] = e.required;
        entry["description"] = e.description;
        j.push_back(entry);
    }
    out << j.dump(2) << "\n";
    return kExitOk;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const drivetrain::IntegrationFault& e) {
        err << fmt::format("integration fault at t = {:.9g} s: {}\n", e.last_good().t, e.what());
        return kExitFault;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitFault;
    }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Spinning-wing robot drivetrain simulator"};
    app.name("spinwing");
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string t_end = "2 s";

    auto* simulate = app.add_subcommand("simulate", "Integrate the hybrid dynamics and write trace, events, report");
    simulate->add_option("-c,--config", config_path, "config file")->required();
    simulate->add_option("-t,--t-end", t_end, "simulated time, e.g. '2 s' or '500 ms'");
    simulate->add_option("-o,--out", out_dir, std::string("output directory (default $") + kOutDirEnv +
                                                  " or ./spinwing_out)");

    bool budget_json = false;
    auto* budget = app.add_subcommand("budget", "Closed-form power, spring, mass and lift budget");
    budget->add_option("-c,--config", config_path, "config file")->required();
    budget->add_flag("--json", budget_json, "print JSON instead of a table");

    TuneRequest tune_req;
    auto* tune = app.add_subcommand("tune", "Bisect k_con or V_max against a steady-state target");
    tune->add_option("-c,--config", config_path, "config file")->required();
    tune->add_option("--target", tune_req.target, "kcon_max_swing | vmax_lift")->required();
    tune->add_option("--lo", tune_req.lo_text, "lower bound, e.g. '100 uN*m/rad' or '2 V'")->required();
    tune->add_option("--hi", tune_req.hi_text, "upper bound")->required();
    tune->add_option("--goal", tune_req.goal_text,
                     "swing limit (default design.collision_limit) or lift in mass units (default 138 mg)");
    tune->add_option("-t,--t-end", tune_req.t_end_text, "simulated time per probe");
    tune->add_option("--rel-tol", tune_req.rel_tol, "relative bracket width to stop at");
    tune->add_option("--max-iter", tune_req.max_iter, "bisection step limit");
    tune->add_option("-o,--out", out_dir, "output directory");

    std::string spec_path;
    int parallelism = 0;
    auto* sweep = app.add_subcommand("sweep", "Run a cartesian parameter sweep from a JSON spec");
    sweep->add_option("-c,--config", config_path, "base config file")->required();
    sweep->add_option("-s,--spec", spec_path, "sweep spec (JSON)")->required();
    sweep->add_option("-j,--parallelism", parallelism, "worker threads (overrides the spec)");
    sweep->add_option("-o,--out", out_dir, "output directory");

    bool schema_text = false;
    auto* schema = app.add_subcommand("schema", "Dump every config key with unit and default");
    schema->add_flag("--text", schema_text, "aligned text instead of JSON");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (simulate->parsed()) return guarded(err, [&] { return cmd_simulate(config_path, t_end, out_dir, out); });
    if (budget->parsed()) return guarded(err, [&] { return cmd_budget(config_path, budget_json, out); });
    if (tune->parsed()) return guarded(err, [&] { return cmd_tune(config_path, tune_req, out_dir, out); });
    if (sweep->parsed())
        return guarded(err, [&] { return cmd_sweep(config_path, spec_path, out_dir, parallelism, out, err); });
    if (schema->parsed()) return guarded(err, [&] { return cmd_schema(schema_text, out); });
    return kExitUsage;
}

}  // namespace spinwing::cli
