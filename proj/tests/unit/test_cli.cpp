#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "spinwing/cli.hpp"

namespace fs = std::filesystem;
using spinwing::cli::run;

namespace {

const std::string kReferenceConfig = std::string(SPINWING_SOURCE_DIR) + "/configs/reference.toml";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream in(p);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("spinwing_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_spec(const std::string& name, const std::string& json) {
        const auto p = dir_ / name;
        std::ofstream(p) << json;
        return p;
    }

    fs::path dir_;
};

}  // namespace

TEST_F(CliTest, NoArgumentsIsUsageError) { EXPECT_EQ(invoke({}).code, spinwing::cli::kExitUsage); }

TEST_F(CliTest, UnknownSubcommandIsUsageError) {
    EXPECT_EQ(invoke({"fly"}).code, spinwing::cli::kExitUsage);
}

TEST_F(CliTest, HelpExitsCleanly) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("simulate"), std::string::npos);
}

TEST_F(CliTest, MissingConfigNamesPath) {
    const auto r = invoke({"simulate", "-c", (dir_ / "nope.toml").string(), "-o", dir_.string()});
    EXPECT_EQ(r.code, spinwing::cli::kExitUsage);
    EXPECT_NE(r.err.find("nope.toml"), std::string::npos);
}

TEST_F(CliTest, InvalidConfigListsViolations) {
    const auto cfg = dir_ / "bad.toml";
    std::string text = slurp(kReferenceConfig);
    const auto pos = text.find("alpha");
    ASSERT_NE(pos, std::string::npos);
    const auto eol = text.find('\n', pos);
    text.replace(pos, eol - pos, "alpha = \"-10 deg\"");
    std::ofstream(cfg) << text;
    const auto r = invoke({"budget", "-c", cfg.string()});
    EXPECT_EQ(r.code, spinwing::cli::kExitUsage);
    EXPECT_NE(r.err.find("alpha"), std::string::npos);
}

TEST_F(CliTest, ShortSimulationDoesNotSettle) {
    const auto out = dir_ / "short";
    const auto r = invoke({"simulate", "-c", kReferenceConfig, "-t", "0.01 s", "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    EXPECT_FALSE(report["steady_state_reached"].get<bool>());
    EXPECT_TRUE(fs::exists(out / "trace.csv"));
    EXPECT_TRUE(fs::exists(out / "events.csv"));
    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    EXPECT_EQ(manifest["command"], "simulate");
    EXPECT_EQ(manifest["outputs"].size(), 3u);
    EXPECT_TRUE(manifest.contains("config_hash"));
}

TEST_F(CliTest, SimulateHonoursOutputDirEnvironment) {
    const auto out = dir_ / "from_env";
    ::setenv(spinwing::cli::kOutDirEnv, out.c_str(), 1);
    const auto r = invoke({"simulate", "-c", kReferenceConfig, "-t", "5 ms"});
    ::unsetenv(spinwing::cli::kOutDirEnv);
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out / "report.json"));
}

TEST_F(CliTest, SimulateIsByteDeterministic) {
    const auto a = dir_ / "a";
    const auto b = dir_ / "b";
    ASSERT_EQ(invoke({"simulate", "-c", kReferenceConfig, "-t", "50 ms", "-o", a.string()}).code, 0);
    ASSERT_EQ(invoke({"simulate", "-c", kReferenceConfig, "-t", "50 ms", "-o", b.string()}).code, 0);
    for (const auto* f : {"trace.csv", "events.csv", "report.json", "manifest.json"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST_F(CliTest, SimulateBadDurationIsUsageError) {
    EXPECT_EQ(invoke({"simulate", "-c", kReferenceConfig, "-t", "2 furlongs", "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
    EXPECT_EQ(invoke({"simulate", "-c", kReferenceConfig, "-t", "-1 s", "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
}

TEST_F(CliTest, BudgetJsonMatchesDesignPoint) {
    const auto r = invoke({"budget", "-c", kReferenceConfig, "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["P_mech_mW"].get<double>(), 8.8, 0.0088);
    EXPECT_GT(j["P_heat_mW"].get<double>(), 46.0);
    EXPECT_LT(j["P_heat_mW"].get<double>(), 56.0);
    EXPECT_GE(j["theta_max_ti_deg"].get<double>(), 26.0);
}

TEST_F(CliTest, BudgetTableWithoutField) {
    const auto cfg = dir_ / "nofield.toml";
    std::string text = slurp(kReferenceConfig);
    const auto pos = text.find("calibrate_P_mech");
    ASSERT_NE(pos, std::string::npos);
    const auto eol = text.find('\n', pos);
    text.replace(pos, eol - pos, "B_peak = \"0 T\"");
    std::ofstream(cfg) << text;
    const auto r = invoke({"budget", "-c", cfg.string(), "--json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["P_mech_mW"].get<double>(), 0.0);
    EXPECT_NEAR(j["P_heat_mW"].get<double>(), 70.0, 0.05);
    const auto t = invoke({"budget", "-c", cfg.string()});
    EXPECT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("P_heat"), std::string::npos);
}

TEST_F(CliTest, SchemaListsEveryKey) {
    const auto r = invoke({"schema"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_TRUE(j.is_array());
    bool has_r = false;
    for (const auto& e : j) {
        EXPECT_TRUE(e.contains("key"));
        EXPECT_TRUE(e.contains("si_unit"));
        EXPECT_TRUE(e.contains("default"));
        if (e["key"] == "wing.R") has_r = true;
    }
    EXPECT_TRUE(has_r);
    const auto t = invoke({"schema", "--text"});
    EXPECT_EQ(t.code, 0);
    EXPECT_NE(t.out.find("wing.R"), std::string::npos);
}

TEST_F(CliTest, SweepSupplyVoltageLiftIsMonotone) {
    const auto spec = write_spec("v.json", R"({
        "axes": [{"key": "drive.V_max", "values": ["2.0 V", "2.75 V", "3.5 V"]}],
        "metrics": ["F_L_avg_mg", "f_wing_ss_rev_s"],
        "t_end": "1 s",
        "parallelism": 3
    })");
    const auto out = dir_ / "sweep";
    const auto r = invoke({"sweep", "-c", kReferenceConfig, "-s", spec.string(), "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = read_csv(out / "sweep.csv");
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_EQ(rows[0][0], "point");
    double previous = -1.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        EXPECT_EQ(rows[i][0], std::to_string(i - 1));
        EXPECT_EQ(rows[i][2], "ok");
        const double lift = std::stod(rows[i][3]);
        EXPECT_GT(lift, previous);
        previous = lift;
    }
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, SweepRowOrderIndependentOfThreads) {
    const auto spec = write_spec("a.json", R"({
        "axes": [{"key": "wing.alpha", "values": ["15 deg", "30 deg", "45 deg"]},
                 {"key": "wing.R", "values": ["18 mm", "20 mm"]}],
        "metrics": ["C_L", "F_L_mN"]
    })");
    const auto serial = dir_ / "serial";
    const auto parallel = dir_ / "parallel";
    ASSERT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", spec.string(), "-j", "1", "-o", serial.string()}).code, 0);
    ASSERT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", spec.string(), "-j", "4", "-o", parallel.string()}).code,
              0);
    EXPECT_EQ(slurp(serial / "sweep.csv"), slurp(parallel / "sweep.csv"));
}

TEST_F(CliTest, SweepAngleOfAttackLiftCoefficientPeaksAt45) {
    const auto spec = write_spec("a.json", R"({
        "axes": [{"key": "wing.alpha", "values": ["15 deg", "30 deg", "45 deg"]}],
        "metric": "C_L"
    })");
    const auto out = dir_ / "alpha";
    ASSERT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", spec.string(), "-o", out.string()}).code, 0);
    const auto rows = read_csv(out / "sweep.csv");
    ASSERT_EQ(rows.size(), 4u);
    const double c15 = std::stod(rows[1][3]), c30 = std::stod(rows[2][3]), c45 = std::stod(rows[3][3]);
    EXPECT_GT(c45, c30);
    EXPECT_GT(c45, c15);
    EXPECT_NEAR(c45, 1.8, 1e-12);
}

TEST_F(CliTest, SweepRejectsBadSpecs) {
    const auto empty = write_spec("e.json", R"({"axes": [{"key": "drive.V_max", "values": []}]})");
    EXPECT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", empty.string(), "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
    const auto unknown = write_spec("u.json", R"({"axes": [{"key": "drive.volume", "values": ["1 V"]}]})");
    EXPECT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", unknown.string(), "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
    const auto metric =
        write_spec("m.json", R"({"axes": [{"key": "drive.V_max", "values": ["1 V"]}], "metric": "happiness"})");
    EXPECT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", metric.string(), "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
    const auto big = write_spec(
        "b.json", R"({"axes": [{"key": "drive.V_max", "values": ["1 V", "2 V", "3 V"]}], "max_points": 2})");
    EXPECT_EQ(invoke({"sweep", "-c", kReferenceConfig, "-s", big.string(), "-o", dir_.string()}).code,
              spinwing::cli::kExitUsage);
}

TEST_F(CliTest, SweepWithEveryPointFailingIsFault) {
    const auto spec = write_spec("f.json", R"({
        "axes": [{"key": "wing.alpha", "values": ["-10 deg", "120 deg"]}],
        "metric": "C_L"
    })");
    const auto r = invoke({"sweep", "-c", kReferenceConfig, "-s", spec.string(), "-o", dir_.string()});
    EXPECT_EQ(r.code, spinwing::cli::kExitFault);
    const auto rows = read_csv(dir_ / "sweep.csv");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NE(rows[1][2].find("error"), std::string::npos);
}

TEST_F(CliTest, TuneConnectionStiffnessForSwingLimit) {
    // Above 150 uN*m/rad a stiffer connection spring loads the coil harder and
    // the swing shrinks, so a swing limit is met by bisecting on that branch.
    const auto out = dir_ / "tune";
    const auto r = invoke({"tune", "-c", kReferenceConfig, "--target", "kcon_max_swing", "--lo", "150 uN*m/rad", "--hi",
                           "185 uN*m/rad", "--goal", "28.5 deg", "-t", "1.5 s", "--rel-tol", "0.01", "-o",
                           out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out / "tune.json"));
    const double k = j["tuned_value"].get<double>();
    EXPECT_GT(k, 150e-6);
    EXPECT_LT(k, 185e-6);
    EXPECT_LE(j["report"]["theta_coil_max_deg"].get<double>(), 28.5);
    const auto& b = j["bracket"];
    EXPECT_LE(b[1].get<double>() - b[0].get<double>(), 0.01 * k * 1.01);
    EXPECT_TRUE(fs::exists(out / "manifest.json"));
}

TEST_F(CliTest, TuneSupplyForLift) {
    const auto out = dir_ / "tune";
    const auto r = invoke({"tune", "-c", kReferenceConfig, "--target", "vmax_lift", "--lo", "2 V", "--hi", "3.5 V", "-t",
                           "1 s", "--rel-tol", "0.01", "-o", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out / "tune.json"));
    const double v = j["tuned_value"].get<double>();
    EXPECT_GT(v, 2.4);
    EXPECT_LT(v, 3.0);
    EXPECT_GE(j["report"]["F_L_avg_mg"].get<double>(), 138.0);
}

TEST_F(CliTest, TuneWithoutBracketFails) {
    const auto r = invoke({"tune", "-c", kReferenceConfig, "--target", "kcon_max_swing", "--lo", "100 uN*m/rad",
                           "--hi", "200 uN*m/rad", "--goal", "80 deg", "-t", "0.3 s", "-o", dir_.string()});
    EXPECT_EQ(r.code, spinwing::cli::kExitFault);
    EXPECT_NE(r.err.find("bracket"), std::string::npos);
    EXPECT_EQ(invoke({"tune", "-c", kReferenceConfig, "--target", "nothing", "--lo", "1", "--hi", "2"}).code,
              spinwing::cli::kExitUsage);
}
