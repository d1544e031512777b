#include "mslln/config.hpp"
#include "mslln/error.hpp"
#include "mslln/harness.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace mslln;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("mslln_unit_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

ExperimentConfig small_rates(const fs::path& out) {
    ExperimentConfig c = ExperimentConfig::parse(R"(
scenario = "rates"
family = ["power_law", "gaussian"]
beta = 4.6
sigma = [0.6, 0.95]
replications = 3
levels = 6
half_width = 16
)");
    c.output_dir = out.string();
    return c;
}

}  // namespace

TEST_CASE("config text round trip") {
    const ExperimentConfig c = ExperimentConfig::parse(R"(
# comment line
scenario = "decompose"
family = ["power_law", "folded_t"]
beta = [5.0, 4.5]
sigma = 0.75        # broadcast
nu = [0.5, 2]
replications = 5
levels = 8
base_seed = 18446744073709551615
)");
    REQUIRE(c.grid.size() == 2);
    CHECK(c.grid[1].family == "folded_t");
    CHECK(c.grid[1].family_bar == "folded_t");
    CHECK(c.grid[1].beta_bar == 4.5);
    CHECK(c.grid[0].sigma == 0.75);
    CHECK(c.grid[1].sigma_bar == 0.75);
    CHECK(c.grid[1].nu == 2.0);
    CHECK(c.base_seed == 18446744073709551615ULL);
    const ExperimentConfig back = ExperimentConfig::parse(c.serialize());
    CHECK(back == c);
    CHECK(back.serialize() == c.serialize());
}

TEST_CASE("doubles survive serialization exactly") {
    ExperimentConfig c = ExperimentConfig::defaults(Scenario::Rates);
    c.grid[0].sigma = 0.1 + 0.2 + 0.45;
    c.grid[0].x_min = 1.0 / 3.0;
    CHECK(ExperimentConfig::parse(c.serialize()) == c);
}

TEST_CASE("malformed configs are rejected") {
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"rates\"\nbogus = 1\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"rates\"\nlevels = 4\nlevels = 5\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("levels = 4\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"rates\"\nsigma = [0.6, 0.7]\nbeta = [5, 6, 7]\n"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"rates\"\nlevels = \"ten\"\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"rates\"\nlevels 4\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::parse("scenario = \"nope\"\n"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::load("/nonexistent/mslln.toml"), ConfigError);
}

TEST_CASE("built-in defaults validate") {
    for (auto s : {Scenario::Rates, Scenario::Decompose, Scenario::Sa, Scenario::Autocov, Scenario::Appell,
                   Scenario::Simulate}) {
        const ExperimentConfig c = ExperimentConfig::defaults(s);
        CHECK_NOTHROW(c.validate());
        CHECK(c.scenario == s);
        CHECK(parse_scenario(to_string(s)) == s);
    }
    CHECK(ExperimentConfig::defaults(Scenario::Rates).grid.size() == 3);
    CHECK(ExperimentConfig::defaults(Scenario::Rates).effective_half_width() == (std::size_t{1} << 20));
    CHECK(ExperimentConfig::defaults(Scenario::Decompose).effective_half_width() == 32);
}

TEST_CASE("set overrides single keys") {
    ExperimentConfig c = ExperimentConfig::defaults(Scenario::Rates);
    c.set("levels", "7");
    c.set("output_dir", "elsewhere");
    c.set("format", "\"json\"");
    c.set("sigma", "0.9");
    CHECK(c.levels == 7);
    CHECK(c.output_dir == "elsewhere");
    CHECK(c.format == "json");
    for (const auto& p : c.grid) CHECK(p.sigma == 0.9);
    CHECK_THROWS_AS(c.set("colour", "red"), ConfigError);
    CHECK_THROWS_AS(c.set("sigma", "[0.6, 0.7]"), ConfigError);
}

TEST_CASE("validation catches hypothesis violations") {
    auto expect_invalid = [](const std::string& text, const std::string& fragment) {
        const ExperimentConfig c = ExperimentConfig::parse(text);
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains(fragment.c_str()), ValidationError);
    };
    expect_invalid("scenario = \"rates\"\nlevels = 50\n", "levels");
    expect_invalid("scenario = \"rates\"\nsigma = 0.4\n", "grid point 0");
    expect_invalid("scenario = \"rates\"\nfamily = \"power_law\"\nbeta = 2.5\n", "grid point 0");
    expect_invalid("scenario = \"sa\"\nfamily = \"power_law\"\nbeta = 4\nchi = 0.4\n", "chi");
    expect_invalid("scenario = \"autocov\"\nsidedness = \"two_sided\"\n", "causal");
    expect_invalid("scenario = \"rates\"\nfamily_bar = \"folded_t\"\n", "identical coupling");
    expect_invalid("scenario = \"rates\"\nfit_lo = 3\n", "together");
    expect_invalid("scenario = \"rates\"\nformat = \"xml\"\n", "format");
    expect_invalid("scenario = \"decompose\"\nnu = -1\n", "nu");
    expect_invalid("scenario = \"rates\"\nreplications = 0\n", "replications");
}

TEST_CASE("parallel_for visits every index once and rethrows the first error") {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
    for (auto& h : hits) CHECK(h.load() == 1);
    CHECK_THROWS_WITH(parallel_for(50, 3,
                                   [](std::size_t i) {
                                       if (i == 7 || i == 30) throw std::runtime_error("task " + std::to_string(i));
                                   }),
                      "task 7");
}

TEST_CASE("table serialization") {
    Table t{{"a", "b", "c"}, {{std::int64_t{-3}, 0.1, std::string("x")}, {std::uint64_t{7}, NAN, std::string("y")}}};
    CHECK(to_csv(t) == "a,b,c\n-3,0.10000000000000001,x\n7,nan,y\n");
    CHECK(format_cell(INFINITY) == "inf");
    const fs::path dir = scratch("table");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "t.csv") << to_csv(t);
        std::ofstream(dir / "t.json") << to_json(t);
    }
    for (const char* name : {"t.csv", "t.json"}) {
        const Table back = read_table((dir / name).string());
        CHECK(back.header == t.header);
        REQUIRE(back.rows.size() == 2);
        CHECK(std::get<std::string>(back.rows[0][1]) == "0.10000000000000001");
        CHECK(std::get<std::string>(back.rows[1][2]) == "y");
    }
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    fs::remove_all(dir);
}

TEST_CASE("delta kernel smoke run") {
    const fs::path out = scratch("smoke");
    ExperimentConfig c = ExperimentConfig::parse("scenario = \"rates\"\nreplications = 1\nlevels = 4\nhalf_width = 0\n");
    c.output_dir = out.string();
    const RunManifest m = run_experiment(c);
    CHECK(m.failures.empty());
    const Table rates = read_table((out / "rates.csv").string());
    REQUIRE(rates.rows.size() == 1);
    CHECK(std::get<std::string>(rates.rows[0][13]) == "1");  // underpowered
    CHECK(fs::exists(out / "manifest.json"));
    CHECK(fs::exists(out / "ledger_p0.csv"));
    fs::remove_all(out);
}

TEST_CASE("rates rows carry the theoretical exponent") {
    const fs::path out = scratch("rates");
    const ExperimentConfig c = small_rates(out);
    run_experiment(c);
    const Table t = read_table((out / "rates.csv").string());
    REQUIRE(t.rows.size() == 2);
    CHECK(t.header[5] == "e_star");
    // alpha = (beta - 1) / 2 = 1.8 for the power law; light tail for the Gaussian.
    const double expected[] = {std::max({2.0 - 1.2, 1.0 / 1.8, 0.5}), std::max({2.0 - 1.9, 0.5})};
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(std::abs(std::stod(std::get<std::string>(t.rows[i][5])) - expected[i]) <= 1e-12);
    fs::remove_all(out);
}

TEST_CASE("reports are byte-identical across runs and job counts") {
    const fs::path a = scratch("det_a"), b = scratch("det_b"), c4 = scratch("det_c");
    ExperimentConfig ca = small_rates(a), cb = small_rates(b), cc = small_rates(c4);
    cc.jobs = 4;
    const RunManifest ma = run_experiment(ca), mb = run_experiment(cb), mc = run_experiment(cc);
    REQUIRE(ma.files.size() == mb.files.size());
    REQUIRE(ma.files.size() == mc.files.size());
    for (std::size_t i = 0; i < ma.files.size(); ++i) {
        CHECK(ma.files[i].path == mc.files[i].path);
        CHECK(ma.files[i].sha256 == mb.files[i].sha256);
        CHECK(ma.files[i].sha256 == mc.files[i].sha256);
        CHECK(slurp(a / ma.files[i].path) == slurp(c4 / mc.files[i].path));
        CHECK(sha256_hex(slurp(a / ma.files[i].path)) == ma.files[i].sha256);
    }
    for (const auto& p : {a, b, c4}) fs::remove_all(p);
}

TEST_CASE("a failing point is recorded and the others still run") {
    const fs::path out = scratch("fail");
    ExperimentConfig c = small_rates(out);
    c.fit_lo = 2;
    c.fit_hi = 3;  // two levels, below the four-level minimum
    const RunManifest m = run_experiment(c);
    CHECK(m.failures.size() == 2);
    CHECK(m.failures[0].message.find("levels") != std::string::npos);

    ExperimentConfig bad = small_rates(out);
    bad.levels = 40;
    CHECK_THROWS_AS(run_experiment(bad), ValidationError);
    fs::remove_all(out);
}

TEST_CASE("json output and report tables") {
    const fs::path out = scratch("json");
    ExperimentConfig c = small_rates(out);
    c.format = "json";
    run_experiment(c);
    CHECK(fs::exists(out / "rates.json"));
    const RunManifest r = render_report(out.string(), "csv");
    CHECK(fs::exists(out / "report_rates.csv"));
    const Table ledger = read_table((out / "report_ledger.csv").string());
    CHECK(ledger.header == std::vector<std::string>{"point", "r", "n_r", "log2_median_M_r"});
    CHECK(ledger.rows.size() == 2 * 7);
    CHECK_FALSE(r.files.empty());
    CHECK_THROWS_AS(render_report((out / "missing").string(), "csv"), IoError);
    fs::remove_all(out);
}

TEST_CASE("every scenario runs at a small size") {
    for (auto s : {Scenario::Decompose, Scenario::Sa, Scenario::Autocov, Scenario::Appell, Scenario::Simulate}) {
        const fs::path out = scratch(std::string("scen_") + to_string(s));
        ExperimentConfig c = ExperimentConfig::defaults(s);
        c.levels = s == Scenario::Sa ? 8 : 6;
        c.replications = 2;
        c.half_width = 8;
        c.output_dir = out.string();
        const RunManifest m = run_experiment(c);
        CHECK_MESSAGE(m.failures.empty(), to_string(s));
        CHECK_FALSE(m.files.empty());
        fs::remove_all(out);
    }
}
