#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "edg/config.hpp"
#include "edg/errors.hpp"
#include "edg/experiments.hpp"

using namespace edg;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("edg_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunContext ctx_for(const std::string& cmd, const std::string& text, const fs::path& out) {
    RunContext c;
    c.cfg = Config::parse(text);
    c.seed = 3;
    c.out_dir = out.string();
    c.command = cmd;
    return c;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto c = Config::parse("seed = 4\n# note\n[kernel]\nfamily = constant  \nvalue=2.5\n[scale]\nLs = 10, 20,40\n");
    CHECK(c.integer("run", "seed") == 4);
    CHECK(c.str("kernel", "family") == "constant");
    CHECK(c.num("kernel", "value") == 2.5);
    CHECK(c.int_list("scale", "Ls") == std::vector<long>{10, 20, 40});
    CHECK(c.num("scale", "T", 7.0) == 7.0);
    CHECK_FALSE(c.has("scale", "T"));
    CHECK(c.hash() == Config::parse(c.text()).hash());

    try {
        Config::parse("[kernel]\nfamily = constant\nnot a pair\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
    }
    try {
        Config::parse("[kernel]\nvalue = 1\nvalue = 2\n");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 3);
        CHECK(e.field() == "kernel.value");
    }
    try {
        Config::parse("[kernel]\nvalue = abc\n").num("kernel", "value");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 2);
        CHECK(e.field() == "kernel.value");
    }
    try {
        Config::parse("[kernel]\n").num("kernel", "value");
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "kernel.value");
    }
}

TEST_CASE("solve from equilibrium writes outputs and a zero functional") {
    const auto out = scratch("solve");
    const auto ctx = ctx_for("solve",
                             "[kernel]\nfamily = product_power\nalpha = 0.5\n[scale]\nM = 25\nT = 1\n"
                             "[init]\ntype = equilibrium\nrho = 0.8\n",
                             out);
    CHECK(run_command(ctx) == 0);
    CHECK(fs::exists(out / "trajectory.csv"));
    CHECK(fs::exists(out / "checks.csv"));
    const auto rep = nlohmann::json::parse(slurp(out / "edf_report.json"));
    CHECK(std::abs(rep["total"].get<double>()) <= 1e-10);
    const auto man = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(man["seed"] == 3);
    CHECK(man["command"] == "solve");
}

TEST_CASE("small commands run") {
    const auto out = scratch("contraction");
    CHECK(run_command(ctx_for("contraction", "[scale]\nproblems = 10\nchannels = 4\n", out)) == 0);
    CHECK(slurp(out / "contraction.csv").size() > 0);

    const auto out2 = scratch("kernel");
    CHECK(run_command(ctx_for("validate-kernel", "[kernel]\nfamily = constant\nvalue = 1\n[scale]\nM = 30\n", out2)) == 0);
    CHECK(nlohmann::json::parse(slurp(out2 / "kernel_report.json")).contains("K1"));

    const auto out3 = scratch("simulate");
    CHECK(run_command(ctx_for("simulate",
                              "[kernel]\nfamily = constant\nvalue = 1\n[scale]\nN = 50\nL = 50\nM = 20\nT = 0.5\nreplicas = 2\n",
                              out3)) == 0);
    CHECK(fs::exists(out3 / "ensemble_mean.csv"));
}

#ifdef EDG_CLI_PATH
TEST_CASE("binary exit codes") {
    const auto dir = scratch("binary");
    const fs::path bad = dir / "bad.ini";
    std::ofstream(bad) << "[kernel]\nfamily = constant\nbroken line\n";
    const std::string base = std::string(EDG_CLI_PATH) + " solve --out " + (dir / "o").string() + " --config ";
    const int rc = std::system((base + bad.string() + " > " + (dir / "log.txt").string() + " 2>&1").c_str());
    CHECK(rc != 0);
    CHECK(slurp(dir / "log.txt").find("line 3") != std::string::npos);
    const int rc2 = std::system((base + (dir / "missing.ini").string() + " > /dev/null 2>&1").c_str());
    CHECK(rc2 != 0);
}
#endif
