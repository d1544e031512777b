#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
    static const fs::path dir = [] {
        const fs::path p = fs::temp_directory_path() / "mslln_cli_tests";
        fs::remove_all(p);
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

// Runs the CLI inside the scratch directory; returns its exit status.
int cli(const std::string& args, const std::string& env = "") {
    const std::string cmd = "cd '" + workdir().string() + "' && " + env + (env.empty() ? "" : " ") + "'" +
                            MSLLN_CLI_PATH + "' " + args + " > last.out 2> last.err";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const char* kSmallRates = R"(scenario = "rates"
family = ["power_law", "power_law", "gaussian"]
beta = [4.6, 3.5, 5]
sigma = [0.6, 0.95, 0.95]
levels = 8
half_width = 64
)";

}  // namespace

TEST_CASE("rates happy path") {
    write(workdir() / "g.toml", kSmallRates);
    CHECK(cli("rates --config g.toml --seed 7 --reps 64 --out happy") == 0);
    const std::string report = slurp(workdir() / "happy" / "rates.csv");
    CHECK(report.rfind("point,sigma,sigma_bar,alpha,regime,e_star,e_hat", 0) == 0);
    CHECK(std::count(report.begin(), report.end(), '\n') == 4);
    CHECK(fs::exists(workdir() / "happy" / "manifest.json"));
}

TEST_CASE("exit codes") {
    CHECK(cli("sa --levels 50") == 3);
    CHECK(slurp(workdir() / "last.err").find("levels") != std::string::npos);
    CHECK(cli("rates --bogus") == 2);
    CHECK(slurp(workdir() / "last.err").find("--config") != std::string::npos);
    CHECK(cli("") == 2);
    CHECK(cli("rates --format xml") == 2);
    CHECK(cli("rates --config missing.toml") == 3);
    write(workdir() / "wrong.toml", "scenario = \"sa\"\n");
    CHECK(cli("rates --config wrong.toml") == 3);
    write(workdir() / "bad.toml", "scenario = \"rates\"\ncolour = 1\n");
    CHECK(cli("rates --config bad.toml") == 3);
}

TEST_CASE("a failed grid point exits 1") {
    write(workdir() / "fit.toml", std::string(kSmallRates) + "fit_lo = 2\nfit_hi = 3\n");
    CHECK(cli("rates --config fit.toml --reps 2 --out fit") == 1);
    CHECK(slurp(workdir() / "last.err").find("grid point failed") != std::string::npos);
}

TEST_CASE("decompose twice gives identical piece files") {
    REQUIRE(cli("decompose --seed 7 --out d1") == 0);
    REQUIRE(cli("decompose --seed 7 --out d2") == 0);
    int compared = 0;
    for (const auto& e : fs::directory_iterator(workdir() / "d1")) {
        const std::string name = e.path().filename().string();
        if (name == "manifest.json") continue;
        CHECK(slurp(e.path()) == slurp(workdir() / "d2" / name));
        ++compared;
    }
    CHECK(compared >= 2);
    REQUIRE(cli("decompose --seed 8 --out d3") == 0);
    CHECK(slurp(workdir() / "d1" / "pieces_p0.csv") != slurp(workdir() / "d3" / "pieces_p0.csv"));
}

TEST_CASE("jobs do not change the output") {
    write(workdir() / "g.toml", kSmallRates);
    REQUIRE(cli("rates --config g.toml --reps 8 --jobs 1 --out j1") == 0);
    REQUIRE(cli("rates --config g.toml --reps 8 --jobs 8 --out j8") == 0);
    for (const auto& e : fs::directory_iterator(workdir() / "j1")) {
        const std::string name = e.path().filename().string();
        if (name != "manifest.json") CHECK(slurp(e.path()) == slurp(workdir() / "j8" / name));
    }
}

TEST_CASE("MSLLN_OUT overrides --out") {
    CHECK(cli("simulate --levels 4 --out ignored", "MSLLN_OUT=from_env") == 0);
    CHECK(fs::exists(workdir() / "from_env" / "path_p0.csv"));
    CHECK_FALSE(fs::exists(workdir() / "ignored"));
}

TEST_CASE("json format and report") {
    write(workdir() / "g.toml", kSmallRates);
    REQUIRE(cli("rates --config g.toml --reps 4 --format json --out rj") == 0);
    CHECK(fs::exists(workdir() / "rj" / "rates.json"));
    CHECK(cli("report --out rj") == 0);
    const std::string table = slurp(workdir() / "rj" / "report_rates.csv");
    CHECK(table.rfind("point,e_star,e_hat,stderr,regime", 0) == 0);
    CHECK(fs::exists(workdir() / "rj" / "report_ledger.csv"));
    CHECK(cli("report --out nowhere") == 1);
}
