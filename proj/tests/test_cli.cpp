#include "catch_amalgamated.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "quadblock/sweep/csv.hpp"

namespace fs = std::filesystem;
using namespace quadblock::sweep;

namespace {

const fs::path scratch = fs::temp_directory_path() / "quadblock_cli_test";

struct Run {
    int code = -1;
    std::string output;
};

Run run(const std::string& args) {
    fs::create_directories(scratch);
    const fs::path log = scratch / "stdout.txt";
    const std::string cmd = std::string(QUADBLOCK_CLI) + " " + args + " > " + log.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::stringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    return r;
}

fs::path write_config(const std::string& name, const std::string& text) {
    fs::create_directories(scratch);
    const fs::path p = scratch / name;
    std::ofstream(p) << text;
    return p;
}

const char* small = R"(
base.cutoff_photon = 3
base.cutoff_phonon = 6
sweep.variable = Delta
sweep.min = -2
sweep.max = 2
sweep.points = 5
)";

} // namespace

TEST_CASE("sweep writes a CSV and exits 0", "[cli]") {
    const fs::path cfg = write_config("small.cfg", small);
    const fs::path out = scratch / "small.csv";
    const Run r = run("sweep --config " + cfg.string() + " --out " + out.string() + " --threads 2");
    INFO(r.output);
    REQUIRE(r.code == 0);
    CHECK(r.output.find("wrote 5 rows") != std::string::npos);

    std::ifstream in(out);
    const CsvTable t = read_csv(in);
    CHECK(t.header == csv_columns(Variable::Delta));
    REQUIRE(t.rows.size() == 5);
    CHECK(t.rows.front()[t.column("sweep_value")] == "-2");
    CHECK(t.rows.back()[t.column("status")] == "ok");
}

TEST_CASE("configuration errors exit 2", "[cli]") {
    const fs::path bad = write_config("bad.cfg", "base.G = three\n");
    CHECK(run("sweep --config " + bad.string() + " --out x.csv").code == 2);
    const fs::path unknown = write_config("unknown.cfg", "base.coupling = 3\n");
    const Run u = run("sweep --config " + unknown.string() + " --out x.csv");
    CHECK(u.code == 2);
    CHECK(u.output.find("unknown key") != std::string::npos);
    const fs::path invalid = write_config("invalid.cfg", "sweep.points = 1\n");
    CHECK(run("sweep --config " + invalid.string() + " --out x.csv").code == 2);
    CHECK(run("sweep --config /nonexistent.cfg --out x.csv").code == 2);
    CHECK(run("sweep --preset nope --out x.csv").code == 2);
    CHECK(run("sweep --preset fig2").code == 2);
    CHECK(run("frobnicate").code == 2);
    CHECK(run("sweep --preset fig2d --out x.csv").code == 2);
    CHECK(run("g2tau --preset fig2 --out x.csv").code == 2);
    CHECK(run("predict --preset fig2 --override predict.max_pair=1").code == 2);
}

TEST_CASE("point failures set the exit code", "[cli]") {
    const fs::path partial = write_config("partial.cfg", R"(
sweep.min = -3
sweep.max = 3
sweep.points = 7
outputs = g2_12_zero
solver.cutoff_policy = converge
solver.max_photon = 6
)");
    const Run p = run("sweep --config " + partial.string() + " --out " + (scratch / "partial.csv").string());
    INFO(p.output);
    CHECK(p.code == 4);
    CHECK(p.output.find("1 failed") != std::string::npos);

    const fs::path strict = write_config("strict.cfg", std::string(small) + "solver.steady_residual = 1e-40\n");
    CHECK(run("sweep --config " + strict.string() + " --out " + (scratch / "strict.csv").string()).code == 3);
}

TEST_CASE("preset listing and predictions", "[cli]") {
    const Run list = run("presets");
    CHECK(list.code == 0);
    CHECK(list.output.find("fig4bd-delta-sqrt6") != std::string::npos);

    const Run dump = run("presets --dump fig2");
    CHECK(dump.code == 0);
    std::ifstream file(std::string(QUADBLOCK_PRESET_DIR) + "/fig2.cfg");
    std::stringstream expected;
    expected << file.rdbuf();
    CHECK(dump.output == expected.str());

    // A tau preset reports the resonances without sweeping.
    const Run predict = run("predict --preset fig2d");
    CHECK(predict.code == 0);
    CHECK(predict.output.find("+1.414214") != std::string::npos);
    CHECK(predict.output.find("+2.449490") != std::string::npos);
}

TEST_CASE("strong probes draw a warning", "[cli]") {
    const fs::path cfg = write_config("strong.cfg", std::string(small) + "base.epsilon = 0.5\nsweep.points = 2\n");
    const Run r = run("sweep --config " + cfg.string() + " --out " + (scratch / "strong.csv").string());
    CHECK(r.code == 0);
    CHECK(r.output.find("weak-probe bound") != std::string::npos);
}
