// Command-line front end; talks to the library only through the C API.

#include "mslln/mslln.h"

#include <CLI11.hpp>

#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRunFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitValidation = 3;

struct Flags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> reps;
    std::optional<std::uint64_t> levels;
    std::optional<std::string> out;
    std::optional<std::uint64_t> jobs;
    std::optional<std::string> format;
};

bool is_validation(mslln_status s) {
    return s == MSLLN_ERR_VALIDATION || s == MSLLN_ERR_CONFIG || s == MSLLN_ERR_MOMENT || s == MSLLN_ERR_CAP ||
           s == MSLLN_ERR_INVALID_ARGUMENT || s == MSLLN_ERR_ILL_POSED;
}

int report_error(mslln_status s, const char* context) {
    std::cerr << "mslln: " << context << ": " << mslln_status_string(s) << ": " << mslln_last_error() << '\n';
    return is_validation(s) ? kExitValidation : kExitRunFailure;
}

void print_files(const mslln_result* result) {
    for (std::size_t i = 0; i < mslln_result_file_count(result); ++i)
        std::cout << "  " << mslln_result_file_path(result, i) << '\n';
    std::cout << "manifest: " << mslln_result_manifest_path(result) << '\n';
}

int run_report(const Flags& f) {
    std::string dir = f.out.value_or("mslln_out/rates");
    if (const char* env = std::getenv("MSLLN_OUT"); env && *env) dir = env;
    mslln_result* result = nullptr;
    const mslln_status s = mslln_report(dir.c_str(), f.format.value_or("csv").c_str(), &result);
    if (s != MSLLN_OK) return report_error(s, "report");
    std::cout << "report tables in " << dir << ":\n";
    print_files(result);
    mslln_result_destroy(result);
    return kExitOk;
}

int run_scenario(const std::string& scenario, const Flags& f) {
    mslln_config* cfg = nullptr;
    mslln_status s = f.config_path.empty() ? mslln_config_default(scenario.c_str(), &cfg)
                                           : mslln_config_load(f.config_path.c_str(), &cfg);
    if (s != MSLLN_OK) return report_error(s, "config");

    const char* declared = nullptr;
    mslln_config_scenario(cfg, &declared);
    if (scenario != declared) {
        std::cerr << "mslln: config declares scenario '" << declared << "' but the subcommand is '" << scenario
                  << "'\n";
        mslln_config_destroy(cfg);
        return kExitValidation;
    }

    std::vector<std::pair<const char*, std::string>> overrides;
    if (f.seed) overrides.emplace_back("base_seed", std::to_string(*f.seed));
    if (f.reps) overrides.emplace_back("replications", std::to_string(*f.reps));
    if (f.levels) overrides.emplace_back("levels", std::to_string(*f.levels));
    if (f.out) overrides.emplace_back("output_dir", *f.out);
    if (const char* env = std::getenv("MSLLN_OUT"); env && *env) overrides.emplace_back("output_dir", env);
    if (f.jobs) overrides.emplace_back("jobs", std::to_string(*f.jobs));
    if (f.format) overrides.emplace_back("format", *f.format);
    for (const auto& [key, value] : overrides) {
        // Quote string values so that paths with spaces or digits survive.
        const bool text = std::string(key) == "output_dir" || std::string(key) == "format";
        std::string literal = value;
        if (text) {
            literal = "\"";
            for (char c : value) {
                if (c == '"' || c == '\\') literal.push_back('\\');
                literal.push_back(c);
            }
            literal.push_back('"');
        }
        s = mslln_config_set(cfg, key, literal.c_str());
        if (s != MSLLN_OK) {
            mslln_config_destroy(cfg);
            return report_error(s, key);
        }
    }

    s = mslln_config_validate(cfg);
    if (s != MSLLN_OK) {
        mslln_config_destroy(cfg);
        return report_error(s, "validation");
    }

    mslln_result* result = nullptr;
    s = mslln_run(cfg, &result);
    mslln_config_destroy(cfg);
    if (s != MSLLN_OK) return report_error(s, "run");

    int code = kExitOk;
    const std::size_t failures = mslln_result_failure_count(result);
    for (std::size_t i = 0; i < failures; ++i)
        std::cerr << "mslln: grid point failed: " << mslln_result_failure_message(result, i) << '\n';
    if (failures > 0) code = kExitRunFailure;
    std::cout << scenario << ": wrote " << mslln_result_file_count(result) << " file(s)\n";
    print_files(result);
    mslln_result_destroy(result);
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo experiments for partial sums of products of linear processes"};
    app.set_version_flag("--version", std::string(mslln_version()));
    app.require_subcommand(1);

    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"simulate", "dump sample paths"},
        {"decompose", "seven-piece decomposition and tail diagnostics"},
        {"rates", "growth exponents of centered partial sums"},
        {"sa", "stochastic approximation error decay"},
        {"autocov", "normalized autocovariance deviations"},
        {"appell", "partial sums of x_k^2 - E x_k^2"},
        {"report", "plot-ready tables from a rates or appell run (--out names the run directory)"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", flags.config_path, "experiment config file");
        sub->add_option("--seed", flags.seed, "base seed (u64)");
        sub->add_option("--reps", flags.reps, "replications per grid point");
        sub->add_option("--levels", flags.levels, "R, horizon n = 2^R");
        sub->add_option("--out", flags.out, "output directory (MSLLN_OUT overrides)");
        sub->add_option("--jobs", flags.jobs, "worker threads; output does not depend on it");
        sub->add_option("--format", flags.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "mslln: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    return name == "report" ? run_report(flags) : run_scenario(name, flags);
}
