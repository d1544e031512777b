#include "mslln/mslln.h"

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

namespace fs = std::filesystem;

TEST_CASE("version and status strings") {
    CHECK(std::strlen(mslln_version()) > 0);
    CHECK(std::string(mslln_status_string(MSLLN_OK)) == "ok");
    CHECK(std::string(mslln_status_string(MSLLN_ERR_CAP)) == "cap exceeded");
}

TEST_CASE("config lifecycle") {
    mslln_config* cfg = nullptr;
    REQUIRE(mslln_config_default("rates", &cfg) == MSLLN_OK);
    const char* scen = nullptr;
    CHECK(mslln_config_scenario(cfg, &scen) == MSLLN_OK);
    CHECK(std::string(scen) == "rates");
    CHECK(mslln_config_set(cfg, "levels", "9") == MSLLN_OK);
    CHECK(mslln_config_validate(cfg) == MSLLN_OK);

    size_t need = 0;
    CHECK(mslln_config_serialize(cfg, nullptr, 0, &need) == MSLLN_ERR_INVALID_ARGUMENT);
    REQUIRE(need > 1);
    std::vector<char> buf(need);
    CHECK(mslln_config_serialize(cfg, buf.data(), buf.size(), nullptr) == MSLLN_OK);
    CHECK(std::string(buf.data()).find("levels = 9") != std::string::npos);

    mslln_config* again = nullptr;
    REQUIRE(mslln_config_parse(buf.data(), &again) == MSLLN_OK);
    std::vector<char> buf2(need);
    CHECK(mslln_config_serialize(again, buf2.data(), buf2.size(), nullptr) == MSLLN_OK);
    CHECK(std::string(buf.data()) == std::string(buf2.data()));
    mslln_config_destroy(again);

    CHECK(mslln_config_set(cfg, "levels", "99") == MSLLN_OK);
    CHECK(mslln_config_validate(cfg) == MSLLN_ERR_VALIDATION);
    CHECK(std::string(mslln_last_error()).find("levels") != std::string::npos);
    CHECK(mslln_config_set(cfg, "nonsense", "1") == MSLLN_ERR_CONFIG);
    mslln_config_destroy(cfg);
}

TEST_CASE("errors come back as codes") {
    mslln_config* cfg = nullptr;
    CHECK(mslln_config_parse("scenario = \"rates\"\nwhat = 1\n", &cfg) == MSLLN_ERR_CONFIG);
    CHECK(cfg == nullptr);
    CHECK(mslln_config_default("nope", &cfg) == MSLLN_ERR_CONFIG);
    CHECK(mslln_config_load("/nonexistent/x.toml", &cfg) == MSLLN_ERR_CONFIG);
    CHECK(mslln_config_parse(nullptr, &cfg) == MSLLN_ERR_INVALID_ARGUMENT);
    double m = 0.0;
    CHECK(mslln_power_law_moment(1.0, 5.0, 4.0, &m) == MSLLN_ERR_MOMENT);
    CHECK(mslln_power_law_moment(1.0, 5.0, 2.0, &m) == MSLLN_OK);
    CHECK(m == doctest::Approx(2.0));
    CHECK(mslln_power_law_moment(2.0, 4.0, 1.0, &m) == MSLLN_OK);
    CHECK(m == doctest::Approx(3.0));
    CHECK(mslln_result_file_count(nullptr) == 0);
    CHECK(mslln_result_file_path(nullptr, 0) == nullptr);
}

TEST_CASE("numeric helpers") {
    double e = 0.0;
    mslln_regime regime{};
    CHECK(mslln_theoretical_exponent(0.6, 0.6, 1.8, &e, &regime) == MSLLN_OK);
    CHECK(e == doctest::Approx(0.8));
    CHECK(regime == MSLLN_REGIME_LRD_DOMINANT);
    CHECK(mslln_theoretical_exponent(0.7, 0.7, 1.0 / 0.6, &e, &regime) == MSLLN_OK);
    CHECK(regime == MSLLN_REGIME_BIFURCATION);
    CHECK(mslln_theoretical_exponent(0.4, 0.7, 1.5, &e, nullptr) == MSLLN_ERR_VALIDATION);
    double g = 0.0;
    int no_rate = -1;
    CHECK(mslln_sa_rate(0.6, 0.95, 1.25, &g, &no_rate) == MSLLN_OK);
    CHECK(g == doctest::Approx(-0.2));
    CHECK(no_rate == 1);
    uint64_t a = 0, b = 0;
    mslln_replication_seed(1, 2, 3, &a);
    mslln_replication_seed(1, 2, 4, &b);
    CHECK(a != b);
}

TEST_CASE("run through the C interface") {
    const fs::path out = fs::temp_directory_path() / "mslln_capi_run";
    fs::remove_all(out);
    mslln_config* cfg = nullptr;
    REQUIRE(mslln_config_default("decompose", &cfg) == MSLLN_OK);
    const std::string quoted = "\"" + out.string() + "\"";
    REQUIRE(mslln_config_set(cfg, "output_dir", quoted.c_str()) == MSLLN_OK);
    REQUIRE(mslln_config_set(cfg, "replications", "2") == MSLLN_OK);
    mslln_result* res = nullptr;
    REQUIRE(mslln_run(cfg, &res) == MSLLN_OK);
    CHECK(mslln_result_failure_count(res) == 0);
    const size_t n = mslln_result_file_count(res);
    CHECK(n >= 2);
    for (size_t i = 0; i < n; ++i) {
        CHECK(fs::exists(out / mslln_result_file_path(res, i)));
        CHECK(std::strlen(mslln_result_file_sha256(res, i)) == 64);
    }
    CHECK(fs::exists(mslln_result_manifest_path(res)));
    CHECK(mslln_result_file_path(res, n) == nullptr);
    mslln_result_destroy(res);

    REQUIRE(mslln_config_set(cfg, "levels", "0") == MSLLN_OK);
    CHECK(mslln_run(cfg, &res) == MSLLN_ERR_VALIDATION);
    CHECK(res == nullptr);
    mslln_config_destroy(cfg);
    CHECK(mslln_report((out / "none").string().c_str(), "csv", &res) == MSLLN_ERR_IO);
    fs::remove_all(out);
}
