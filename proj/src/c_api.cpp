#include "mslln/mslln.h"

#include "mslln/config.hpp"
#include "mslln/error.hpp"
#include "mslln/estimators.hpp"
#include "mslln/harness.hpp"
#include "mslln/innovations.hpp"
#include "mslln/rng.hpp"
#include "mslln/stochastic_approx.hpp"

#include <new>
#include <string>

struct mslln_config {
    mslln::ExperimentConfig config;
};

struct mslln_result {
    mslln::RunManifest manifest;
};

namespace {

thread_local std::string last_error;

mslln_status fail(mslln_status s, const char* what) {
    last_error = what;
    return s;
}

template <class Fn>
mslln_status guarded(Fn&& fn) {
    try {
        fn();
        last_error.clear();
        return MSLLN_OK;
    } catch (const mslln::ConfigError& e) {
        return fail(MSLLN_ERR_CONFIG, e.what());
    } catch (const mslln::MomentDoesNotExist& e) {
        return fail(MSLLN_ERR_MOMENT, e.what());
    } catch (const mslln::CapExceeded& e) {
        return fail(MSLLN_ERR_CAP, e.what());
    } catch (const mslln::ValidationError& e) {
        return fail(MSLLN_ERR_VALIDATION, e.what());
    } catch (const mslln::DegenerateError& e) {
        return fail(MSLLN_ERR_DEGENERATE, e.what());
    } catch (const mslln::IllPosedTarget& e) {
        return fail(MSLLN_ERR_ILL_POSED, e.what());
    } catch (const mslln::IoError& e) {
        return fail(MSLLN_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(MSLLN_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(MSLLN_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MSLLN_ERR_INTERNAL, "unknown error");
    }
}

#define MSLLN_REQUIRE(cond)                                                   \
    do {                                                                      \
        if (!(cond)) return fail(MSLLN_ERR_INVALID_ARGUMENT, "null argument: " #cond); \
    } while (0)

}  // namespace

extern "C" {

const char* mslln_version(void) { return MSLLN_VERSION; }

const char* mslln_status_string(mslln_status status) {
    switch (status) {
        case MSLLN_OK: return "ok";
        case MSLLN_ERR_INVALID_ARGUMENT: return "invalid argument";
        case MSLLN_ERR_VALIDATION: return "validation error";
        case MSLLN_ERR_CONFIG: return "config error";
        case MSLLN_ERR_MOMENT: return "moment does not exist";
        case MSLLN_ERR_CAP: return "cap exceeded";
        case MSLLN_ERR_DEGENERATE: return "degenerate input";
        case MSLLN_ERR_ILL_POSED: return "ill-posed target";
        case MSLLN_ERR_IO: return "i/o error";
        case MSLLN_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* mslln_last_error(void) { return last_error.c_str(); }

mslln_status mslln_config_default(const char* scenario, mslln_config** out) {
    MSLLN_REQUIRE(scenario && out);
    *out = nullptr;
    return guarded([&] {
        *out = new mslln_config{mslln::ExperimentConfig::defaults(mslln::parse_scenario(scenario))};
    });
}

mslln_status mslln_config_parse(const char* text, mslln_config** out) {
    MSLLN_REQUIRE(text && out);
    *out = nullptr;
    return guarded([&] { *out = new mslln_config{mslln::ExperimentConfig::parse(text)}; });
}

mslln_status mslln_config_load(const char* path, mslln_config** out) {
    MSLLN_REQUIRE(path && out);
    *out = nullptr;
    return guarded([&] { *out = new mslln_config{mslln::ExperimentConfig::load(path)}; });
}

mslln_status mslln_config_set(mslln_config* config, const char* key, const char* value) {
    MSLLN_REQUIRE(config && key && value);
    return guarded([&] {
        mslln::ExperimentConfig copy = config->config;
        copy.set(key, value);
        config->config = std::move(copy);
    });
}

mslln_status mslln_config_validate(const mslln_config* config) {
    MSLLN_REQUIRE(config);
    return guarded([&] { config->config.validate(); });
}

mslln_status mslln_config_serialize(const mslln_config* config, char* buffer, size_t capacity, size_t* required) {
    MSLLN_REQUIRE(config);
    std::string text;
    const mslln_status s = guarded([&] { text = config->config.serialize(); });
    if (s != MSLLN_OK) return s;
    if (required) *required = text.size() + 1;
    if (!buffer || capacity < text.size() + 1) {
        if (buffer && capacity > 0) buffer[0] = '\0';
        return fail(MSLLN_ERR_INVALID_ARGUMENT, "buffer too small");
    }
    text.copy(buffer, text.size());
    buffer[text.size()] = '\0';
    return MSLLN_OK;
}

mslln_status mslln_config_scenario(const mslln_config* config, const char** scenario) {
    MSLLN_REQUIRE(config && scenario);
    *scenario = mslln::to_string(config->config.scenario);
    return MSLLN_OK;
}

void mslln_config_destroy(mslln_config* config) { delete config; }

mslln_status mslln_run(const mslln_config* config, mslln_result** out) {
    MSLLN_REQUIRE(config && out);
    *out = nullptr;
    return guarded([&] { *out = new mslln_result{mslln::run_experiment(config->config)}; });
}

mslln_status mslln_report(const char* dir, const char* format, mslln_result** out) {
    MSLLN_REQUIRE(dir && format && out);
    *out = nullptr;
    return guarded([&] { *out = new mslln_result{mslln::render_report(dir, format)}; });
}

size_t mslln_result_file_count(const mslln_result* result) { return result ? result->manifest.files.size() : 0; }

const char* mslln_result_file_path(const mslln_result* result, size_t index) {
    if (!result || index >= result->manifest.files.size()) return nullptr;
    return result->manifest.files[index].path.c_str();
}

const char* mslln_result_file_sha256(const mslln_result* result, size_t index) {
    if (!result || index >= result->manifest.files.size()) return nullptr;
    return result->manifest.files[index].sha256.c_str();
}

const char* mslln_result_manifest_path(const mslln_result* result) {
    return result ? result->manifest.manifest_path.c_str() : nullptr;
}

size_t mslln_result_failure_count(const mslln_result* result) {
    return result ? result->manifest.failures.size() : 0;
}

const char* mslln_result_failure_message(const mslln_result* result, size_t index) {
    if (!result || index >= result->manifest.failures.size()) return nullptr;
    return result->manifest.failures[index].message.c_str();
}

void mslln_result_destroy(mslln_result* result) { delete result; }

mslln_status mslln_theoretical_exponent(double sigma, double sigma_bar, double alpha, double* exponent,
                                        mslln_regime* regime) {
    MSLLN_REQUIRE(exponent);
    return guarded([&] {
        const auto t = mslln::theoretical_exponent(sigma, sigma_bar, alpha);
        *exponent = t.exponent;
        if (regime) {
            switch (t.regime) {
                case mslln::Regime::LrdDominant: *regime = MSLLN_REGIME_LRD_DOMINANT; break;
                case mslln::Regime::HtDominant: *regime = MSLLN_REGIME_HT_DOMINANT; break;
                case mslln::Regime::Clt: *regime = MSLLN_REGIME_CLT; break;
                case mslln::Regime::Bifurcation: *regime = MSLLN_REGIME_BIFURCATION; break;
            }
        }
    });
}

mslln_status mslln_sa_rate(double chi, double sigma, double alpha, double* gamma0, int* no_rate) {
    MSLLN_REQUIRE(gamma0);
    return guarded([&] {
        const auto r = mslln::sa_theoretical_rate(chi, sigma, alpha);
        *gamma0 = r.gamma0;
        if (no_rate) *no_rate = r.no_rate ? 1 : 0;
    });
}

mslln_status mslln_power_law_moment(double x_min, double beta, double r, double* out) {
    MSLLN_REQUIRE(out);
    return guarded([&] { *out = mslln::moment(mslln::InnovationSpec::power_law(x_min, beta), r); });
}

mslln_status mslln_replication_seed(uint64_t base_seed, uint64_t grid_index, uint64_t replication, uint64_t* out) {
    MSLLN_REQUIRE(out);
    *out = mslln::rng::replication_seed(base_seed, grid_index, replication);
    return MSLLN_OK;
}

}  // extern "C"
