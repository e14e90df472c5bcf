#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run_cli(const std::string& args) {
    const std::string command = std::string(SPARAREAL_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("sparareal_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string config_dir = SPARAREAL_CONFIG_DIR;

}  // namespace

TEST_CASE("run writes the report files") {
    const auto dir = scratch("run");
    REQUIRE(run_cli("run " + config_dir + "/case1_sparareal.conf --runs 2 --out " + dir.string()) == 0);
    const std::string errors = slurp(dir / "errors.csv");
    CHECK(errors.rfind("k,mean_sup_error,bound_value,n_converged_runs,", 0) == 0);
    CHECK(slurp(dir / "iterations.csv").rfind("run,k_stop\n0,", 0) == 0);
    CHECK(slurp(dir / "metadata.txt").find("model = dahlquist") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("outputs are byte-identical across thread counts") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const std::string conf = config_dir + "/ginzburg_landau_sparareal.conf";
    REQUIRE(run_cli("run " + conf + " --threads 1 --out " + a.string()) == 0);
    REQUIRE(run_cli("run " + conf + " --threads 6 --out " + b.string()) == 0);
    CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
    CHECK(slurp(a / "iterations.csv") == slurp(b / "iterations.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("seed override changes the paths") {
    const auto a = scratch("seed_a");
    const auto b = scratch("seed_b");
    const std::string conf = config_dir + "/case1_parareal.conf";
    REQUIRE(run_cli("run " + conf + " --seed 10 --out " + a.string()) == 0);
    REQUIRE(run_cli("run " + conf + " --seed 11 --out " + b.string()) == 0);
    CHECK(slurp(a / "errors.csv") != slurp(b / "errors.csv"));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("bounds and gen-paths") {
    const auto dir = scratch("bounds");
    REQUIRE(run_cli("bounds " + config_dir + "/case2_sparareal.conf --out " + dir.string()) == 0);
    const std::string bounds = slurp(dir / "bounds.csv");
    CHECK(bounds.rfind("k,bound_rules_1_3,bound_rules_2_4\n0,", 0) == 0);
    REQUIRE(run_cli("gen-paths " + config_dir + "/case1_parareal.conf --out " + dir.string()) == 0);
    CHECK(slurp(dir / "paths.bwt").rfind("BWT1", 0) == 0);
    CHECK(run_cli("bounds " + config_dir + "/ginzburg_landau_parareal.conf --out " + dir.string()) == 1);
    fs::remove_all(dir);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("exit");
    std::ofstream(dir / "unknown_model.conf") << "model = lorenz\n";
    CHECK(run_cli("run " + (dir / "unknown_model.conf").string()) == 2);
    CHECK(run_cli("run " + (dir / "missing.conf").string()) == 2);
    CHECK(run_cli("run " + config_dir + "/case1_parareal.conf --runs 0") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("") == 2);
    CHECK(run_cli("run " + config_dir + "/double_well_euler.conf --out " + dir.string()) == 3);
    CHECK(run_cli("--help") == 0);
    fs::remove_all(dir);
}
