#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include <json.hpp>

#include "nagd/commands.hpp"

using namespace nagd;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("nagd_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    return p;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "nagd");
    std::vector<const char*> argv;
    for (const std::string& a : args) {
        argv.push_back(a.c_str());
    }
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
    std::vector<std::string> out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

fs::path write_config(const fs::path& dir, const nlohmann::json& j) {
    fs::create_directories(dir);
    const fs::path p = dir / "config.json";
    std::ofstream(p) << j.dump();
    return p;
}

bool has_line(const std::vector<std::string>& ls, const std::string& needle) {
    return std::find(ls.begin(), ls.end(), needle) != ls.end();
}

} // namespace

TEST_CASE("race from a config file") {
    const fs::path dir = fresh_dir("race");
    const fs::path cfg = write_config(
        dir / "cfg", {{"optimizers", {{{"kind", "sgd"}, {"eta", 0.1156}}, {{"kind", "nasgd"}, {"alpha", 1.9}}}}});
    REQUIRE(cli({"race", "--config", cfg.string(), "--out", (dir / "out").string()}) == 0);
    const auto ls = lines(dir / "out" / "race.csv");
    REQUIRE(ls.size() == 11);
    CHECK(ls[0] == "optimizer,hyperparams,threshold,steps,diverged");
    CHECK(ls[1] == "sgd,eta=0.1156,0.01,22,false");
    // 15 if theta_0 were counted as step 1.
    CHECK(ls[10] == "nasgd,alpha=1.9,1e-10,14,false");
    CHECK(fs::exists(dir / "out" / "manifest.json"));
}

TEST_CASE("divergence is a recorded outcome") {
    const fs::path dir = fresh_dir("diverge");
    REQUIRE(cli({"race", "--function", "rosenbrock", "--start", "-3", "-4", "--optimizer", "sgd", "--eta", "0.001",
                 "--out", dir.string()}) == 0);
    const auto ls = lines(dir / "race.csv");
    REQUIRE(ls.size() == 6);
    CHECK(ls[1] == "sgd,eta=0.001,100,diverged,true");
    CHECK(ls[5] == "sgd,eta=0.001,1e-06,diverged,true");
}

TEST_CASE("unreached thresholds") {
    const fs::path dir = fresh_dir("unreached");
    REQUIRE(cli({"race", "--optimizer", "sgd", "--eta", "0.01", "--max-steps", "300", "--out", dir.string()}) == 0);
    const auto ls = lines(dir / "race.csv");
    CHECK(ls[1] == "sgd,eta=0.01,0.01,195,false");
    CHECK(ls[2] == "sgd,eta=0.01,1e-04,unreached,false");
}

TEST_CASE("invalid configs leave nothing behind") {
    const fs::path dir = fresh_dir("invalid");
    const fs::path cfg = write_config(dir / "cfg", {{"optimizers", {{{"kind", "sgd"}}}}, {"thresholds", nlohmann::json::array()}});
    CHECK(cli({"race", "--config", cfg.string(), "--out", (dir / "out").string()}) == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
    CHECK(cli({"race", "--optimizer", "lbfgs", "--out", (dir / "out").string()}) == 2);
    CHECK(cli({"layer-match", "--runs", "0", "--out", (dir / "out").string()}) == 2);
    CHECK(cli({"field-grid", "--function", "booth", "--out", (dir / "out").string()}) == 2);
    CHECK(cli({"trace", "--config", (dir / "missing.json").string(), "--out", (dir / "out").string()}) == 2);
    CHECK(cli({"trace", "--no-such-flag"}) == 2);
    CHECK_FALSE(fs::exists(dir / "out"));
}

TEST_CASE("layer-match with a single run") {
    const fs::path dir = fresh_dir("layer");
    REQUIRE(cli({"layer-match", "--runs", "1", "--max-steps", "100", "--optimizer", "nasgd", "--alpha", "0.7", "--out",
                 dir.string()}) == 0);
    const auto ls = lines(dir / "layer_match.csv");
    REQUIRE(ls.size() == 11);
    CHECK(ls[0] == "step,mean_log10_distance,mean_equivalent_eta,mean_equivalent_alpha,n_active_runs");
    CHECK(ls[1].starts_with("10,"));
    CHECK(ls[10].starts_with("100,"));
    CHECK(ls[10].ends_with(",1"));
    CHECK(ls[10].find(",0.7,") != std::string::npos);

    REQUIRE(cli({"layer-match", "--runs", "2", "--max-steps", "20", "--optimizer", "sgd", "--optimizer", "adam",
                 "--out", (dir / "two").string()}) == 0);
    CHECK(fs::exists(dir / "two" / "layer_match_0_sgd_eta_0.01.csv"));
    CHECK(fs::exists(dir / "two" / "layer_match_1_adam_eta_0.001_beta1_0.9_beta2_0.999_eps_1e_08.csv"));
}

TEST_CASE("rosetta rows") {
    const fs::path dir = fresh_dir("rosetta");
    REQUIRE(cli({"rosetta", "--runs", "2", "--max-steps", "5", "--out", dir.string()}) == 0);
    const auto ls = lines(dir / "rosetta.csv");
    REQUIRE(ls.size() == 11);
    CHECK(ls[0] == "run,step,loss,equivalent_eta,equivalent_alpha");
    CHECK(ls[1].starts_with("0,1,"));
    CHECK(ls[6].starts_with("1,1,"));
}

TEST_CASE("field grid") {
    const fs::path dir = fresh_dir("grid");
    REQUIRE(cli({"field-grid", "--eta", "1", "--alpha", "1", "--grid-x", "-1", "1", "3", "--grid-y", "0", "1", "2",
                 "--out", dir.string()}) == 0);
    const auto ls = lines(dir / "field_grid.csv");
    REQUIRE(ls.size() == 7);
    CHECK(ls[0] == "x,y,ratio");
    CHECK(has_line(ls, "0,1,0.5"));
    CHECK(has_line(ls, "0,0,inf"));

    REQUIRE(cli({"field-grid", "--grid-x", "0.5", "0.5", "1", "--grid-y", "0.5", "0.5", "1", "--out",
                 (dir / "one").string()}) == 0);
    CHECK(lines(dir / "one" / "field_grid.csv").size() == 2);
}

TEST_CASE("trace") {
    const fs::path dir = fresh_dir("trace");
    REQUIRE(cli({"trace", "--optimizer", "nasgd", "--alpha", "0.007", "--max-steps", "6000", "--out", dir.string()}) ==
            0);
    const auto ls = lines(dir / "trace.csv");
    CHECK(ls.size() == 6002);
    CHECK(ls[0] == "step,x,y,f");
    CHECK(ls[1] == "0,1,1,8.5");

    REQUIRE(cli({"trace", "--max-steps", "0", "--out", (dir / "zero").string()}) == 0);
    CHECK(lines(dir / "zero" / "trace.csv").size() == 2);

    REQUIRE(cli({"trace", "--optimizer", "sgd", "--eta", "2", "--max-steps", "100", "--out", (dir / "up").string()}) ==
            0);
    const auto up = lines(dir / "up" / "trace.csv");
    CHECK(up.size() < 102);
    CHECK(up.back() == std::to_string(up.size() - 2) + ",diverged,,");
}

TEST_CASE("flags override the config file") {
    const fs::path dir = fresh_dir("precedence");
    const fs::path cfg = write_config(dir / "cfg", {{"optimizers", {{{"kind", "sgd"}, {"eta", 0.5}}}}, {"max_steps", 7}});
    REQUIRE(cli({"trace", "--config", cfg.string(), "--eta", "0.01", "--out", (dir / "out").string()}) == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    CHECK(manifest["spec"]["optimizers"][0]["eta"] == 0.01);
    CHECK(manifest["spec"]["max_steps"] == 7);
    CHECK(lines(dir / "out" / "trace.csv").size() == 9);
}

TEST_CASE("manifest round trip reproduces the outputs byte for byte") {
    const fs::path dir = fresh_dir("roundtrip");
    REQUIRE(cli({"layer-match", "--runs", "3", "--max-steps", "200", "--seed", "41", "--optimizer", "rmsprop", "--out",
                 (dir / "a").string()}) == 0);
    const auto manifest = nlohmann::json::parse(slurp(dir / "a" / "manifest.json"));
    CHECK(manifest["status"] == "complete");
    CHECK(manifest["tool_version"] == kToolVersion);
    CHECK(manifest["outputs"] == nlohmann::json::array({"layer_match.csv"}));
    CHECK(manifest["rng_algorithm"].get<std::string>().starts_with("mt19937_64"));
    CHECK(manifest["spec"]["base_seed"] == 41);

    REQUIRE(cli({"layer-match", "--config", (dir / "a" / "manifest.json").string(), "--out", (dir / "b").string()}) ==
            0);
    CHECK(slurp(dir / "a" / "layer_match.csv") == slurp(dir / "b" / "layer_match.csv"));
    CHECK(slurp(dir / "a" / "manifest.json") == slurp(dir / "b" / "manifest.json"));
}

TEST_CASE("the executable's exit codes and output directory override") {
    const fs::path dir = fresh_dir("exe");
    fs::create_directories(dir);
    const std::string exe = NAGD_EXE;
    const auto run = [&](const std::string& args) {
        const int status = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    CHECK(run("race --optimizer sgd --eta 0.1156 --out " + (dir / "ok").string()) == 0);
    CHECK(fs::exists(dir / "ok" / "race.csv"));
    CHECK(run("race --optimizer sgd --eta -1 --out " + (dir / "bad").string()) == 2);
    CHECK_FALSE(fs::exists(dir / "bad"));
    CHECK(run("--help") == 0);
    CHECK(run("") == 2);
    CHECK(std::system(("NAGD_OUT_DIR=" + (dir / "env").string() + " " + exe +
                       " field-grid --grid-x 0 0 1 --grid-y 0 0 1 > /dev/null")
                          .c_str()) == 0);
    CHECK(fs::exists(dir / "env" / "field_grid.csv"));
}
