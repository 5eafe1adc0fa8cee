#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "sdlnet/cli.hpp"

using namespace sdlnet;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string scratch_file(const std::string& name, const std::string& text) {
    const std::filesystem::path dir = std::filesystem::path(SDLNET_TEST_TMP) / "cli";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << text;
    return path.string();
}

const char* kConfig = R"({"n_lines": 2, "delta_ns": 10.0, "r_on_ohm": 0, "r_off_ohm": 1e12, "t_s_ns": 0,
                          "samples_per_delay": 32, "settle_hyperperiods": 4, "measure_hyperperiods": 1})";

}  // namespace

TEST(Cli, StatesCount) {
    const auto r = cli({"states", "count", "4"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "216");
    EXPECT_NE(r.out.find("match"), std::string::npos);
    EXPECT_EQ(cli({"states", "count", "30"}).out,
              "25883658898765265219409084165125866522580314675725997178880000000\n");
}

TEST(Cli, StatesEnumerate) {
    const auto r = cli({"states", "enumerate", "2"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(r.out, "{\"1\":2,\"2\":3,\"3\":4,\"4\":1}\n{\"1\":4,\"2\":1,\"3\":2,\"4\":3}\n");
    EXPECT_EQ(cli({"states", "enumerate", "7"}).code, exit_input_error);
    EXPECT_EQ(cli({"states", "enumerate", "7", "--limit", "2"}).code, exit_ok);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli({}).code, exit_input_error);
    EXPECT_EQ(cli({"bogus"}).code, exit_input_error);
    EXPECT_EQ(cli({"states", "count"}).code, exit_input_error);
    EXPECT_EQ(cli({"--help"}).code, exit_ok);
}

TEST(Cli, SynthAndValidate) {
    const auto cfg = scratch_file("cfg.json", kConfig);
    const auto state = scratch_file("state.json", R"({"1": 4, "4": 3, "3": 2, "2": 1})");
    const auto sched = scratch_file("sched.json", "");
    EXPECT_EQ(cli({"synth", "--state", state, "--config", cfg, "--out", sched}).code, exit_ok);
    const auto ok = cli({"validate-clocks", "--schedule", sched, "--config", cfg});
    EXPECT_EQ(ok.code, exit_ok);
    EXPECT_TRUE(nlohmann::json::parse(ok.out).at("passed").get<bool>());

    const auto bad = scratch_file("bad_state.json", R"({"1": 2, "2": 1, "3": 4, "4": 3})");
    const auto r = cli({"synth", "--state", bad, "--config", cfg});
    EXPECT_EQ(r.code, exit_input_error);
    EXPECT_NE(r.err.find("2-cycle"), std::string::npos);
}

TEST(Cli, ValidateFailsOnContention) {
    const auto cfg = scratch_file("cfg.json", kConfig);
    const auto sched = scratch_file(
        "clash.json",
        R"({"hyperperiod_ns": 40, "switches": [{"port": 1, "line": 1, "intervals_ns": [[0, 40]]},
                                                {"port": 3, "line": 1, "intervals_ns": [[0, 20]]}]})");
    const auto r = cli({"validate-clocks", "--schedule", sched, "--config", cfg});
    EXPECT_EQ(r.code, exit_validation_failed);

    const auto reduced = scratch_file(
        "reduced.json", R"({"n_lines": 2, "delta_ns": 10, "r_on_ohm": 0, "r_off_ohm": 1e6, "t_s_ns": 0,
                            "ports_present": [1, 2, 3]})");
    const auto absent = scratch_file(
        "absent.json", R"({"hyperperiod_ns": 40, "switches": [{"port": 4, "line": 1, "intervals_ns": [[0, 20]]}]})");
    EXPECT_EQ(cli({"validate-clocks", "--schedule", absent, "--config", reduced}).code, exit_input_error);
}

TEST(Cli, InputErrors) {
    const auto bad_cfg = scratch_file("neg.json", R"({"n_lines": 2, "delta_ns": -1, "r_on_ohm": 0,
                                                      "r_off_ohm": 1e6, "t_s_ns": 0})");
    const auto r = cli({"simulate", "--config", bad_cfg});
    EXPECT_EQ(r.code, exit_input_error);
    EXPECT_NE(r.err.find("delta_ns"), std::string::npos);
    EXPECT_EQ(cli({"simulate", "--config", "/nonexistent/cfg.json"}).code, exit_input_error);
    const auto garbage = scratch_file("garbage.json", "{not json");
    EXPECT_EQ(cli({"simulate", "--config", garbage}).code, exit_input_error);
    EXPECT_EQ(cli({"loss-contour", "--ts-max", "20"}).code, exit_input_error);
}

TEST(Cli, SimulateWritesOutputs) {
    const auto cfg = scratch_file("cfg.json", kConfig);
    const auto prefix = (std::filesystem::path(SDLNET_TEST_TMP) / "cli" / "run").string();
    const auto r = cli({"simulate", "--config", cfg, "--out", prefix, "--points", "3", "--fmin", "20e6", "--fmax",
                        "80e6", "--dump-traces"});
    ASSERT_EQ(r.code, exit_ok) << r.err;
    EXPECT_TRUE(std::filesystem::exists(prefix + ".s4p"));
    EXPECT_TRUE(std::filesystem::exists(prefix + ".csv"));
    EXPECT_TRUE(std::filesystem::exists(prefix + ".trace_p1.csv"));
    std::ifstream is(prefix + ".metrics.json");
    const auto doc = nlohmann::json::parse(is);
    EXPECT_EQ(doc.at("frequencies_hz").size(), 3u);
    EXPECT_NEAR(doc.at("insertion_loss_db").at("1->2").at(0).get<double>(), 0.0, 1e-6);
    EXPECT_TRUE(doc.contains("group_delay_ns"));
}

TEST(Cli, LossContourToStdout) {
    const auto r = cli({"loss-contour", "--ts-steps", "2", "--ts-max", "1", "--delta-steps", "2", "--delta-max", "15"});
    EXPECT_EQ(r.code, exit_ok);
    EXPECT_EQ(r.out, "t_s_ns\\delta_ns,10,15\n0,1.0122,1.0122\n1,2.8305,2.2031\n");
}
