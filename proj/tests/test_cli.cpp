// test_cli.cpp — config parsing errors and command-line exit codes

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "nmphoton/scenario.hpp"

using namespace nmphoton;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const auto d = fs::temp_directory_path() / "nmphoton_cli_test";
    fs::create_directories(d);
    return d;
}

fs::path write_config(const std::string& name, const std::string& body) {
    const auto p = scratch() / name;
    std::ofstream(p) << body;
    return p;
}

int run(const std::string& args) {
    const std::string cmd = std::string(NMPHOTON_CLI) + " " + args + " >/dev/null 2>&1";
    const int s = std::system(cmd.c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

const char* kDesign = R"({"environments": [{"gamma": 10, "lambda": 2.31}],
 "targets": [{"shape": "sin3"}],
 "grid": {"t_max": 3, "dt": 0.002}})";

}  // namespace

TEST(Config, UnknownKeysAndBadValuesRejected) {
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "design", "bogus": 1})")), ValidationError);
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "figure"})")), ValidationError);
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "design", "grid": {"dt": -1}})")), ValidationError);
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "design", "bath": "lorentz"})")), ValidationError);
    EXPECT_THROW(parse_config(json::parse(R"({"mode": "design", "params": {"g_c": "x"}})")), ValidationError);
    EXPECT_NO_THROW(parse_config(json::parse(std::string(R"({"mode": "design", )") + std::string(kDesign).substr(1))));
}

TEST(Cli, ExitCodes) {
    const auto good = write_config("good.json", kDesign);
    const auto out = scratch() / "out_good";
    EXPECT_EQ(run("design --config " + good.string() + " --out " + out.string()), 0);
    EXPECT_TRUE(fs::exists(out / "design.csv") || !fs::is_empty(out));

    const auto empty = write_config("empty.json", R"({"environments": [{"gamma": 10, "lambda": 2.31}], "targets": []})");
    EXPECT_EQ(run("design --config " + empty.string() + " --out " + (scratch() / "o1").string()), 2);
    const auto unknown = write_config("unknown.json", R"({"environments": [], "colour": "red"})");
    EXPECT_EQ(run("design --config " + unknown.string() + " --out " + (scratch() / "o2").string()), 2);
    EXPECT_EQ(run("sweep --config " + good.string() + " --axis environments.0.lambda --values '' --out " +
                  (scratch() / "o3").string()),
              2);
    EXPECT_EQ(run("sweep --config " + good.string() + " --axis environments.0.lambda --values 2.31 --out " +
                  (scratch() / "o5").string()),
              2);  // no "mode" key
    EXPECT_EQ(run("figure fig2 --config " + good.string()), 2);
    EXPECT_EQ(run("figure fig99 --out " + (scratch() / "o4").string()), 2);
    EXPECT_EQ(run("design --config /nonexistent.json"), 2);
    EXPECT_EQ(run("no-such-verb"), 2);
}

TEST(Cli, RepeatedRunsAreByteIdentical) {
    const auto cfg = write_config("det.json", kDesign);
    const auto a = scratch() / "det_a", b = scratch() / "det_b";
    fs::remove_all(a);
    fs::remove_all(b);
    ASSERT_EQ(run("design --config " + cfg.string() + " --out " + a.string()), 0);
    ASSERT_EQ(run("design --config " + cfg.string() + " --out " + b.string()), 0);
    std::size_t n = 0;
    for (const auto& e : fs::directory_iterator(a)) {
        if (e.path().extension() != ".csv") continue;
        EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path().filename();
        ++n;
    }
    EXPECT_GT(n, 0u);
}
