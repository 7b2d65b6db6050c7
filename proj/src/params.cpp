#include "spinwing/params.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "spinwing/aero.hpp"
#include "spinwing/springs.hpp"

namespace spinwing {

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error([&] {
          std::string msg = "invalid configuration:";
          for (const auto& v : violations) msg += "\n  " + v.field + ": " + v.reason;
          return msg;
      }()),
      violations_(std::move(violations)) {}

namespace {

using Q = Quantity;

const std::vector<std::string> kSpringSections{"ti_spring", "steel_spring"};

std::vector<SchemaEntry> build_schema() {
    std::vector<SchemaEntry> s{
        {"wing.R", Q::Length, "", true, "length of one wing"},
        {"wing.aspect_ratio", Q::Dimensionless, "", true, "wing aspect ratio A_r"},
        {"wing.alpha", Q::Angle, "", true, "angle of attack, 0 < alpha < 90 deg"},
        {"wing.p_hat", Q::Dimensionless, "", true, "centre of pressure as a fraction of R"},
        {"wing.mass_per_wing", Q::Mass, "", true, "mass of one wing"},
        {"wing.n_wings", Q::Count, "2", false, "number of wings (fixed at 2)"},
        {"coil.n_turns", Q::Count, "", true, "winding turns"},
        {"coil.l_coil", Q::Length, "", false, "mean turn circumference (or give coil.mean_radius)"},
        {"coil.mean_radius", Q::Length, "", false, "mean winding radius; l_coil = 2 pi r"},
        {"coil.resistance", Q::Resistance, "", true, "coil resistance"},
        {"coil.mass", Q::Mass, "", true, "mass of one coil (a balancing dead coil is assumed)"},
        {"coil.arm_radius", Q::Length, "", true, "radius of the coil path"},
        {"coil.y_max", Q::Length, "", true, "design stroke half-amplitude"},
        {"field.kind", Q::Text, "parametric", false, "parametric | tabulated"},
        {"field.B_peak", Q::MagneticField, "", false, "lobe amplitude (or give field.calibrate_P_mech)"},
        {"field.y_p", Q::Length, "0.8 mm", false, "lobe centre"},
        {"field.sigma", Q::Length, "1.2 mm", false, "lobe width"},
        {"field.table", Q::Text, "", false, "CSV profile (y in mm, B in T) for kind = tabulated"},
        {"field.calibrate_P_mech", Q::Power, "", false,
         "scale the field so the quasi-static cycle produces this mechanical power"},
        {"drive.V_max", Q::Voltage, "", true, "square-wave amplitude"},
        {"drive.f_coil", Q::Frequency, "", true, "coil drive frequency (supply toggles at 2x)"},
        {"drive.phase", Q::Angle, "0 rad", false, "square-wave phase offset"},
        {"design.f_coil", Q::Frequency, "", false,
         "resonance-sizing and quasi-static design frequency (defaults to drive.f_coil)"},
        {"design.f_wing", Q::SpinRate, "", true, "target steady spin rate"},
        {"design.collision_limit", Q::Angle, "30 deg", false, "coil arm collision angle"},
        {"design.stiffness_tolerance", Q::Dimensionless, "0.1", false,
         "allowed relative mismatch between given and spring-derived stiffness"},
        {"inertia.J_coil", Q::Inertia, "", false, "coil rotational inertia (default 2 m_coil r^2)"},
        {"inertia.J_wing", Q::Inertia, "", false,
         "wing-assembly inertia (default rod approximation m_total (2R)^2 / 12)"},
        {"stiffness.k_coil", Q::Stiffness, "", false,
         "titanium spring stiffness (default J_coil (2 pi design.f_coil)^2)"},
        {"stiffness.k_con", Q::Stiffness, "", false,
         "steel spring stiffness (default from the steel_spring section)"},
        {"losses.tau", Q::Torque, "", false, "constant friction torque on the flywheel"},
        {"losses.target_power", Q::Power, "", false, "friction power drained at design.f_wing"},
        {"losses.b", Q::DragFactor, "", false, "quadratic drag factor (default aerodynamic)"},
        {"air.rho", Q::Density, "1.22 kg/m^3", false, "air density"},
        {"ratchet.shaft_diameter", Q::Length, "", false, "ratchet inner shaft diameter"},
        {"ratchet.n_beams", Q::Count, "", false, "elastic beams sharing the ratchet torque"},
        {"ratchet.shaft_mass", Q::Mass, "", false, "ratchet inner shaft mass"},
        {"integrator.steps_per_cycle", Q::Count, "1000", false, "RK4 steps per coil cycle, >= 400"},
        {"integrator.event_tol", Q::Dimensionless, "1e-9", false, "guard tolerance (rad or rad/s)"},
        {"integrator.output_dt", Q::Time, "0.05 ms", false, "trace output cadence"},
        {"integrator.seed_theta_coil", Q::Angle, "1 mrad", false,
         "initial coil offset; the field vanishes at the neutral position"},
    };
    for (const auto& section : kSpringSections) {
        const bool ti = section == "ti_spring";
        const std::string what = ti ? "titanium (coil) spring" : "steel (connection) spring";
        s.push_back({section + ".Y", Q::Pressure, "", false, "Young's modulus of the " + what});
        s.push_back({section + ".eps_max", Q::Strain, "", false, "fatigue strain limit"});
        s.push_back({section + ".density", Q::Density, "", false, "material density"});
        s.push_back({section + ".l", Q::Length, "", false, "beam length"});
        s.push_back({section + ".w", Q::Length, "", false, "beam width"});
        s.push_back({section + ".t", Q::Length, "", false, "beam thickness"});
        s.push_back({section + ".n_chains", Q::Count, "1", false, "parallel chains"});
        s.push_back({section + ".n_series", Q::Count, "", false, "beams per chain"});
        s.push_back({section + ".n_grounded", Q::Count, "0", false, "segments glued rigid"});
    }
    s.push_back({"mass.*", Q::Mass, "", false, "free-form mass budget entries"});
    return s;
}

const SchemaEntry* find_entry(const std::string& key) {
    for (const auto& e : config_schema()) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

bool is_mass_key(const std::string& key) { return key.starts_with("mass.") && key.size() > 5; }

/// Typed access to a ConfigMap that attaches the key path to every error.
class Reader {
public:
    explicit Reader(const ConfigMap& map) : map_(map) {}

    [[nodiscard]] bool has(const std::string& key) const { return map_.contains(key); }

    [[nodiscard]] bool has_section(const std::string& section) const {
        const auto prefix = section + ".";
        return std::any_of(map_.begin(), map_.end(),
                           [&](const auto& kv) { return kv.first.starts_with(prefix); });
    }

    [[nodiscard]] double number(const std::string& key) const {
        const auto* entry = find_entry(key);
        const auto it = map_.find(key);
        if (it == map_.end()) {
            if (entry == nullptr || entry->default_value.empty())
                throw ConfigError(key, "missing required key");
            return parse(key, entry->default_value, entry->quantity);
        }
        return parse(key, it->second, entry != nullptr ? entry->quantity : Q::Mass);
    }

    [[nodiscard]] std::optional<double> optional(const std::string& key) const {
        if (!has(key)) return std::nullopt;
        return number(key);
    }

    [[nodiscard]] int count(const std::string& key) const {
        const double v = number(key);
        if (v != std::floor(v) || std::abs(v) > 1e9) throw ConfigError(key, "expected an integer");
        return static_cast<int>(v);
    }

    [[nodiscard]] std::string text(const std::string& key) const {
        if (const auto it = map_.find(key); it != map_.end()) return it->second;
        const auto* entry = find_entry(key);
        return entry != nullptr ? entry->default_value : std::string{};
    }

private:
    static double parse(const std::string& key, const std::string& raw, Q q) {
        try {
            const double v = parse_quantity(raw, q);
            if (!std::isfinite(v)) throw ConfigError("", "value is not finite");
            return v;
        } catch (const ConfigError& e) {
            throw ConfigError(key, e.what());
        }
    }

    const ConfigMap& map_;
};

SpringSpec read_spring(const Reader& r, const std::string& section) {
    SpringSpec s;
    s.material.youngs_modulus = r.number(section + ".Y");
    s.material.eps_max = r.number(section + ".eps_max");
    s.material.density = r.number(section + ".density");
    s.beam.length = r.number(section + ".l");
    s.beam.width = r.number(section + ".w");
    s.beam.thickness = r.number(section + ".t");
    s.n_chains = r.count(section + ".n_chains");
    s.n_series = r.count(section + ".n_series");
    s.n_grounded = r.count(section + ".n_grounded");
    return s;
}

std::string with_unit(double value, Q q) {
    const auto unit = si_unit(q);
    return unit.empty() ? format_exact(value) : format_exact(value) + " " + std::string(unit);
}

void add_violation(std::vector<Violation>& out, std::string field, std::string reason) {
    out.push_back({std::move(field), std::move(reason)});
}

void check_positive(std::vector<Violation>& out, const std::string& field, double v) {
    if (!(v > 0.0)) add_violation(out, field, fmt::format("must be > 0 (got {})", v));
}

void check_spring(std::vector<Violation>& out, const std::string& section, const SpringSpec& s) {
    check_positive(out, section + ".Y", s.material.youngs_modulus);
    check_positive(out, section + ".eps_max", s.material.eps_max);
    check_positive(out, section + ".density", s.material.density);
    check_positive(out, section + ".l", s.beam.length);
    check_positive(out, section + ".w", s.beam.width);
    check_positive(out, section + ".t", s.beam.thickness);
    if (s.beam.width > 0.0 && s.beam.thickness > 0.0 && !(s.beam.width > s.beam.thickness))
        add_violation(out, section + ".w", "beam width must exceed thickness (thin-beam bending)");
    if (s.n_chains < 1) add_violation(out, section + ".n_chains", "must be >= 1");
    if (s.n_series < 1) add_violation(out, section + ".n_series", "must be >= 1");
    if (s.n_grounded < 0) add_violation(out, section + ".n_grounded", "must be >= 0");
    if (s.n_series >= 1 && s.n_grounded >= s.n_series)
        add_violation(out, section + ".n_grounded",
                      fmt::format("must be < n_series ({} >= {})", s.n_grounded, s.n_series));
}

bool spring_is_usable(const SpringSpec& s) {
    std::vector<Violation> tmp;
    check_spring(tmp, "", s);
    return tmp.empty();
}

void check_agreement(std::vector<Violation>& out, const std::string& field, double given,
                     const std::optional<SpringSpec>& spring, double tolerance) {
    if (!spring || !spring_is_usable(*spring) || !(given > 0.0)) return;
    const double derived = springs::spring_stiffness(*spring);
    const double rel = std::abs(given - derived) / derived;
    if (rel > tolerance)
        add_violation(out, field,
                      fmt::format("{:.4g} N*m/rad disagrees with the spring model ({:.4g} N*m/rad) by "
                                  "{:.1f}% (tolerance {:.1f}%)",
                                  given, derived, 100.0 * rel, 100.0 * tolerance));
}

}  // namespace

const std::vector<SchemaEntry>& config_schema() {
    static const std::vector<SchemaEntry> schema = build_schema();
    return schema;
}

bool is_known_key(const std::string& key) {
    return is_mass_key(key) || (key != "mass.*" && find_entry(key) != nullptr);
}

ConfigMap parse_config_text(const std::string& text) {
    ConfigMap map;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int line_no = 0;
    const auto trim = [](std::string_view s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) return std::string_view{};
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        const auto where = [&] { return fmt::format("line {}", line_no); };
        // Strip a trailing comment that is not inside quotes.
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        const auto body = trim(line);
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') throw ConfigError(where(), "unterminated section header");
            section = std::string(trim(body.substr(1, body.size() - 2)));
            if (section.empty()) throw ConfigError(where(), "empty section name");
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where(), "expected 'key = value'");
        const auto key = std::string(trim(body.substr(0, eq)));
        auto value = trim(body.substr(eq + 1));
        if (key.empty()) throw ConfigError(where(), "missing key before '='");
        if (value.empty()) throw ConfigError(where(), "missing value for '" + key + "'");
        if (value.front() == '"') {
            if (value.size() < 2 || value.back() != '"')
                throw ConfigError(where(), "unterminated string for '" + key + "'");
            value = value.substr(1, value.size() - 2);
        }
        const auto full = section.empty() ? key : section + "." + key;
        if (!map.emplace(full, std::string(value)).second)
            throw ConfigError(full, fmt::format("duplicate key ({})", where()));
    }
    return map;
}

RobotConfig config_from_map(const ConfigMap& map) {
    for (const auto& [key, value] : map) {
        if (!is_known_key(key)) throw ConfigError(key, "unknown key");
    }
    const Reader r(map);
    RobotConfig c;

    c.wing.length = r.number("wing.R");
    c.wing.aspect_ratio = r.number("wing.aspect_ratio");
    c.wing.alpha = r.number("wing.alpha");
    c.wing.p_hat = r.number("wing.p_hat");
    c.wing.mass_per_wing = r.number("wing.mass_per_wing");
    c.wing.n_wings = r.count("wing.n_wings");

    c.coil.n_turns = r.count("coil.n_turns");
    if (r.has("coil.l_coil") && r.has("coil.mean_radius"))
        throw ConfigError("coil.mean_radius", "give either coil.l_coil or coil.mean_radius, not both");
    if (r.has("coil.mean_radius")) {
        c.coil.l_coil = 2.0 * kPi * r.number("coil.mean_radius");
    } else {
        c.coil.l_coil = r.number("coil.l_coil");
    }
    c.coil.resistance = r.number("coil.resistance");
    c.coil.mass = r.number("coil.mass");
    c.coil.arm_radius = r.number("coil.arm_radius");
    c.coil.y_max = r.number("coil.y_max");

    const auto kind = r.text("field.kind");
    if (kind == "parametric") {
        c.field.kind = FieldKind::Parametric;
    } else if (kind == "tabulated") {
        c.field.kind = FieldKind::Tabulated;
    } else {
        throw ConfigError("field.kind", "expected 'parametric' or 'tabulated', got '" + kind + "'");
    }
    c.field.b_peak = r.optional("field.B_peak");
    c.field.y_p = r.number("field.y_p");
    c.field.sigma = r.number("field.sigma");
    c.field.table_path = r.text("field.table");
    c.field.calibrate_p_mech = r.optional("field.calibrate_P_mech");

    c.drive.v_max = r.number("drive.V_max");
    c.drive.f_coil = r.number("drive.f_coil");
    c.drive.phase = r.number("drive.phase");

    c.design.f_coil = r.has("design.f_coil") ? r.number("design.f_coil") : c.drive.f_coil;
    c.design.f_wing = r.number("design.f_wing");
    c.design.collision_limit = r.number("design.collision_limit");
    c.design.stiffness_tolerance = r.number("design.stiffness_tolerance");

    for (const auto& section : kSpringSections) {
        if (!r.has_section(section)) continue;
        auto spec = read_spring(r, section);
        (section == "ti_spring" ? c.ti_spring : c.steel_spring) = spec;
    }
    if (r.has_section("ratchet")) {
        c.ratchet = RatchetSpec{r.number("ratchet.shaft_diameter"), r.count("ratchet.n_beams"),
                                r.number("ratchet.shaft_mass")};
    }

    c.losses.tau_losses = r.optional("losses.tau");
    c.losses.target_loss_power = r.optional("losses.target_power");
    c.losses.drag_factor = r.optional("losses.b");
    c.rho_air = r.number("air.rho");

    c.integrator.steps_per_cycle = r.count("integrator.steps_per_cycle");
    c.integrator.event_tol = r.number("integrator.event_tol");
    c.integrator.output_dt = r.number("integrator.output_dt");
    c.integrator.seed_theta_coil = r.number("integrator.seed_theta_coil");

    for (const auto& [key, value] : map) {
        if (is_mass_key(key)) c.mass_parts.push_back({key.substr(5), r.number(key)});
    }

    // Derived quantities.
    c.J_coil = r.optional("inertia.J_coil").value_or(2.0 * c.coil.mass * c.coil.arm_radius * c.coil.arm_radius);
    const double wing_span = 2.0 * c.wing.length;
    c.J_wing = r.optional("inertia.J_wing")
                   .value_or(c.wing.n_wings * c.wing.mass_per_wing * wing_span * wing_span / 12.0);
    c.k_coil = r.optional("stiffness.k_coil").value_or(springs::resonance_stiffness(c.J_coil, c.design.f_coil));
    if (const auto k = r.optional("stiffness.k_con")) {
        c.k_con = *k;
    } else if (c.steel_spring && spring_is_usable(*c.steel_spring)) {
        c.k_con = springs::spring_stiffness(*c.steel_spring);
    } else if (!c.steel_spring) {
        throw ConfigError("stiffness.k_con", "missing required key (no steel_spring section to derive it)");
    }

    if (auto violations = validate(c); !violations.empty()) throw ValidationError(std::move(violations));
    return c;
}

ConfigMap load_config_map(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    auto map = parse_config_text(buffer.str());
    if (const auto it = map.find("field.table"); it != map.end()) {
        const std::filesystem::path table(it->second);
        if (table.is_relative()) it->second = (path.parent_path() / table).lexically_normal().string();
    }
    return map;
}

RobotConfig load_config(const std::filesystem::path& path) { return config_from_map(load_config_map(path)); }

ConfigMap config_to_map(const RobotConfig& c) {
    ConfigMap m;
    const auto put = [&](const std::string& key, double v, Q q) { m[key] = with_unit(v, q); };
    const auto put_count = [&](const std::string& key, int v) { m[key] = std::to_string(v); };

    put("wing.R", c.wing.length, Q::Length);
    put("wing.aspect_ratio", c.wing.aspect_ratio, Q::Dimensionless);
    put("wing.alpha", c.wing.alpha, Q::Angle);
    put("wing.p_hat", c.wing.p_hat, Q::Dimensionless);
    put("wing.mass_per_wing", c.wing.mass_per_wing, Q::Mass);
    put_count("wing.n_wings", c.wing.n_wings);

    put_count("coil.n_turns", c.coil.n_turns);
    put("coil.l_coil", c.coil.l_coil, Q::Length);
    put("coil.resistance", c.coil.resistance, Q::Resistance);
    put("coil.mass", c.coil.mass, Q::Mass);
    put("coil.arm_radius", c.coil.arm_radius, Q::Length);
    put("coil.y_max", c.coil.y_max, Q::Length);

    m["field.kind"] = c.field.kind == FieldKind::Parametric ? "parametric" : "tabulated";
    if (c.field.b_peak) put("field.B_peak", *c.field.b_peak, Q::MagneticField);
    put("field.y_p", c.field.y_p, Q::Length);
    put("field.sigma", c.field.sigma, Q::Length);
    if (!c.field.table_path.empty()) m["field.table"] = c.field.table_path;
    if (c.field.calibrate_p_mech) put("field.calibrate_P_mech", *c.field.calibrate_p_mech, Q::Power);

    put("drive.V_max", c.drive.v_max, Q::Voltage);
    put("drive.f_coil", c.drive.f_coil, Q::Frequency);
    put("drive.phase", c.drive.phase, Q::Angle);

    put("design.f_coil", c.design.f_coil, Q::Frequency);
    put("design.f_wing", c.design.f_wing, Q::SpinRate);
    put("design.collision_limit", c.design.collision_limit, Q::Angle);
    put("design.stiffness_tolerance", c.design.stiffness_tolerance, Q::Dimensionless);

    put("inertia.J_coil", c.J_coil, Q::Inertia);
    put("inertia.J_wing", c.J_wing, Q::Inertia);
    put("stiffness.k_coil", c.k_coil, Q::Stiffness);
    put("stiffness.k_con", c.k_con, Q::Stiffness);

    const auto put_spring = [&](const std::string& sec, const SpringSpec& s) {
        put(sec + ".Y", s.material.youngs_modulus, Q::Pressure);
        put(sec + ".eps_max", s.material.eps_max, Q::Strain);
        put(sec + ".density", s.material.density, Q::Density);
        put(sec + ".l", s.beam.length, Q::Length);
        put(sec + ".w", s.beam.width, Q::Length);
        put(sec + ".t", s.beam.thickness, Q::Length);
        put_count(sec + ".n_chains", s.n_chains);
        put_count(sec + ".n_series", s.n_series);
        put_count(sec + ".n_grounded", s.n_grounded);
    };
    if (c.ti_spring) put_spring("ti_spring", *c.ti_spring);
    if (c.steel_spring) put_spring("steel_spring", *c.steel_spring);
    if (c.ratchet) {
        put("ratchet.shaft_diameter", c.ratchet->shaft_diameter, Q::Length);
        put_count("ratchet.n_beams", c.ratchet->n_beams);
        put("ratchet.shaft_mass", c.ratchet->shaft_mass, Q::Mass);
    }

    if (c.losses.tau_losses) put("losses.tau", *c.losses.tau_losses, Q::Torque);
    if (c.losses.target_loss_power) put("losses.target_power", *c.losses.target_loss_power, Q::Power);
    if (c.losses.drag_factor) put("losses.b", *c.losses.drag_factor, Q::DragFactor);
    put("air.rho", c.rho_air, Q::Density);

    put_count("integrator.steps_per_cycle", c.integrator.steps_per_cycle);
    put("integrator.event_tol", c.integrator.event_tol, Q::Dimensionless);
    put("integrator.output_dt", c.integrator.output_dt, Q::Time);
    put("integrator.seed_theta_coil", c.integrator.seed_theta_coil, Q::Angle);

    for (const auto& part : c.mass_parts) put("mass." + part.name, part.mass, Q::Mass);
    return m;
}

std::string serialize_config(const RobotConfig& config) {
    const auto map = config_to_map(config);
    std::string out;
    std::string section;
    for (const auto& [key, value] : map) {
        const auto dot = key.find('.');
        const auto sec = key.substr(0, dot);
        if (sec != section) {
            if (!out.empty()) out += '\n';
            out += "[" + sec + "]\n";
            section = sec;
        }
        out += key.substr(dot + 1) + " = \"" + value + "\"\n";
    }
    return out;
}

std::uint64_t config_hash(const RobotConfig& config) {
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char ch : serialize_config(config)) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

std::vector<Violation> validate(const RobotConfig& c) {
    std::vector<Violation> out;

    check_positive(out, "wing.R", c.wing.length);
    check_positive(out, "wing.aspect_ratio", c.wing.aspect_ratio);
    if (!(c.wing.alpha > 0.0 && c.wing.alpha < kPi / 2.0))
        add_violation(out, "wing.alpha",
                      fmt::format("must satisfy 0 < alpha < 90 deg (got {:.4g} deg)", c.wing.alpha * 180.0 / kPi));
    if (!(c.wing.p_hat > 0.0 && c.wing.p_hat <= 1.0))
        add_violation(out, "wing.p_hat", fmt::format("must satisfy 0 < p_hat <= 1 (got {})", c.wing.p_hat));
    check_positive(out, "wing.mass_per_wing", c.wing.mass_per_wing);
    if (c.wing.n_wings != 2) add_violation(out, "wing.n_wings", "the wing pair is fixed at 2");

    if (c.coil.n_turns < 1) add_violation(out, "coil.n_turns", "must be >= 1");
    check_positive(out, "coil.l_coil", c.coil.l_coil);
    check_positive(out, "coil.resistance", c.coil.resistance);
    check_positive(out, "coil.mass", c.coil.mass);
    check_positive(out, "coil.arm_radius", c.coil.arm_radius);
    check_positive(out, "coil.y_max", c.coil.y_max);
    if (c.coil.y_max > 0.0 && c.coil.arm_radius > 0.0 &&
        !(c.coil.y_max < c.coil.arm_radius * c.design.collision_limit))
        add_violation(out, "coil.y_max",
                      fmt::format("stroke {:.4g} deg reaches the {:.4g} deg collision limit",
                                  c.coil.y_max / c.coil.arm_radius * 180.0 / kPi,
                                  c.design.collision_limit * 180.0 / kPi));

    check_positive(out, "field.sigma", c.field.sigma);
    if (c.field.y_p < 0.0) add_violation(out, "field.y_p", "must be >= 0");
    if (c.field.b_peak && c.field.calibrate_p_mech)
        add_violation(out, "field.B_peak", "give either field.B_peak or field.calibrate_P_mech, not both");
    if (c.field.kind == FieldKind::Parametric && !c.field.b_peak && !c.field.calibrate_p_mech)
        add_violation(out, "field.B_peak", "parametric field needs field.B_peak or field.calibrate_P_mech");
    if (c.field.kind == FieldKind::Tabulated && c.field.table_path.empty())
        add_violation(out, "field.table", "tabulated field needs a table file");
    if (c.field.b_peak && *c.field.b_peak < 0.0) add_violation(out, "field.B_peak", "must be >= 0");
    if (c.field.calibrate_p_mech && *c.field.calibrate_p_mech < 0.0)
        add_violation(out, "field.calibrate_P_mech", "must be >= 0");

    if (c.drive.v_max < 0.0) add_violation(out, "drive.V_max", "must be >= 0");
    check_positive(out, "drive.f_coil", c.drive.f_coil);
    check_positive(out, "design.f_coil", c.design.f_coil);
    check_positive(out, "design.f_wing", c.design.f_wing);
    check_positive(out, "design.collision_limit", c.design.collision_limit);
    check_positive(out, "design.stiffness_tolerance", c.design.stiffness_tolerance);

    check_positive(out, "inertia.J_coil", c.J_coil);
    check_positive(out, "inertia.J_wing", c.J_wing);
    check_positive(out, "stiffness.k_coil", c.k_coil);
    check_positive(out, "stiffness.k_con", c.k_con);
    check_positive(out, "air.rho", c.rho_air);

    if (c.ti_spring) check_spring(out, "ti_spring", *c.ti_spring);
    if (c.steel_spring) check_spring(out, "steel_spring", *c.steel_spring);
    check_agreement(out, "stiffness.k_coil", c.k_coil, c.ti_spring, c.design.stiffness_tolerance);
    check_agreement(out, "stiffness.k_con", c.k_con, c.steel_spring, c.design.stiffness_tolerance);

    if (c.ratchet) {
        check_positive(out, "ratchet.shaft_diameter", c.ratchet->shaft_diameter);
        if (c.ratchet->n_beams < 1) add_violation(out, "ratchet.n_beams", "must be >= 1");
        check_positive(out, "ratchet.shaft_mass", c.ratchet->shaft_mass);
    }

    if (c.losses.tau_losses.has_value() == c.losses.target_loss_power.has_value())
        add_violation(out, "losses", "exactly one of losses.tau and losses.target_power must be given");
    if (c.losses.tau_losses && *c.losses.tau_losses < 0.0) add_violation(out, "losses.tau", "must be >= 0");
    if (c.losses.target_loss_power && *c.losses.target_loss_power < 0.0)
        add_violation(out, "losses.target_power", "must be >= 0");
    if (c.losses.drag_factor && *c.losses.drag_factor < 0.0) add_violation(out, "losses.b", "must be >= 0");

    if (c.integrator.steps_per_cycle < 400)
        add_violation(out, "integrator.steps_per_cycle", "must be >= 400 per coil cycle");
    check_positive(out, "integrator.event_tol", c.integrator.event_tol);
    check_positive(out, "integrator.output_dt", c.integrator.output_dt);
    if (!std::isfinite(c.integrator.seed_theta_coil))
        add_violation(out, "integrator.seed_theta_coil", "must be finite");

    std::set<std::string> names;
    for (const auto& part : c.mass_parts) {
        if (part.mass < 0.0) add_violation(out, "mass." + part.name, "must be >= 0");
        if (!names.insert(part.name).second) add_violation(out, "mass." + part.name, "duplicate entry");
    }
    return out;
}

double drag_factor(const RobotConfig& config) {
    return config.losses.drag_factor.value_or(aero::damping_factor(config.wing, config.rho_air));
}

double loss_torque(const RobotConfig& config) {
    if (config.losses.tau_losses) return *config.losses.tau_losses;
    return config.losses.target_loss_power.value_or(0.0) / (2.0 * kPi * config.design.f_wing);
}

double total_mass(const RobotConfig& config) {
    return std::accumulate(config.mass_parts.begin(), config.mass_parts.end(), 0.0,
                           [](double acc, const MassPart& p) { return acc + p.mass; });
}

RobotConfig paper_reference_config() {
    // Kept in engineering units so it reads like configs/reference.toml.
    const ConfigMap map{
        {"wing.R", "20 mm"},
        {"wing.aspect_ratio", "4"},
        {"wing.alpha", "30 deg"},
        {"wing.p_hat", "0.46"},
        {"wing.mass_per_wing", "20 mg"},
        {"coil.n_turns", "384"},
        {"coil.mean_radius", "2.2 mm"},
        {"coil.resistance", "108 Ohm"},
        {"coil.mass", "13 mg"},
        {"coil.arm_radius", "4 mm"},
        {"coil.y_max", "1.8 mm"},
        {"field.kind", "parametric"},
        {"field.y_p", "0.8 mm"},
        {"field.sigma", "1.2 mm"},
        {"field.calibrate_P_mech", "8.8 mW"},
        {"drive.V_max", "2.75 V"},
        {"drive.f_coil", "260 Hz"},
        {"drive.phase", "0 rad"},
        {"design.f_coil", "250 Hz"},
        {"design.f_wing", "47 rev/s"},
        {"stiffness.k_con", "150 uN*m/rad"},
        {"ti_spring.Y", "114 GPa"},
        {"ti_spring.eps_max", "0.43 %"},
        {"ti_spring.density", "4500 kg/m^3"},
        {"ti_spring.l", "1.83 mm"},
        {"ti_spring.w", "0.4 mm"},
        {"ti_spring.t", "100 um"},
        {"ti_spring.n_chains", "2"},
        {"ti_spring.n_series", "4"},
        {"steel_spring.Y", "200 GPa"},
        {"steel_spring.eps_max", "0.25 %"},
        {"steel_spring.density", "7850 kg/m^3"},
        {"steel_spring.l", "2.13 mm"},
        {"steel_spring.w", "0.29 mm"},
        {"steel_spring.t", "50.8 um"},
        {"steel_spring.n_chains", "1"},
        {"steel_spring.n_series", "4"},
        {"steel_spring.n_grounded", "2"},
        {"ratchet.shaft_diameter", "2.8 mm"},
        {"ratchet.n_beams", "10"},
        {"ratchet.shaft_mass", "7 mg"},
        {"losses.target_power", "6 mW"},
        {"air.rho", "1.22 kg/m^3"},
        {"mass.coil", "13 mg"},
        {"mass.dead_coil", "13 mg"},
        {"mass.magnet", "24 mg"},
        {"mass.ti_spring", "8 mg"},
        {"mass.ratchet_shaft", "7 mg"},
        {"mass.ratchet_ring", "1 mg"},
        {"mass.steel_spring", "7 mg"},
        {"mass.wing_assembly", "47 mg"},
        {"mass.support_base", "13 mg"},
    };
    return config_from_map(map);
}

}  // namespace spinwing
