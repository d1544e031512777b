#pragma once

// Experiment configuration and its text format.
//
// The format is a flat subset of TOML: one `key = value` per line, `#`
// comments, values are numbers, "strings" or [arrays]. Grid keys take an
// array (or a single value, broadcast to every point); all arrays of length
// > 1 must agree in length. Unknown and duplicate keys are rejected.
//
//   scenario      "rates" | "decompose" | "sa" | "autocov" | "appell" | "simulate"
//   replications  replications per grid point (>= 1)
//   levels        R, horizon n = 2^R (1..24)
//   base_seed     64-bit base seed
//   half_width    truncation half-width L, -1 = automatic, 0 = delta kernel
//   jobs          worker threads (output does not depend on it)
//   output_dir    where result files go
//   format        "csv" | "json"
//   fit_lo/fit_hi dyadic fit range, -1 = automatic
//   hill_k        order statistics for the Hill index, 0 = n/100
//   sa_dimension  d of the stochastic-approximation regressor
//   min_replications  below this the rate estimates are flagged underpowered
//
// Grid keys (per point):
//   family, beta, x_min, variance            marginal of xi
//   family_bar, beta_bar, x_min_bar, variance_bar   marginal of xibar (default: same as xi)
//   coupling ("identical" | "independent"), sigma, sigma_bar (default: sigma),
//   scale, sidedness ("two_sided" | "causal"), chi, lag, p, nu

#include "mslln/coefficients.hpp"
#include "mslln/innovations.hpp"

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mslln {

enum class Scenario { Rates, Decompose, Sa, Autocov, Appell, Simulate };

const char* to_string(Scenario s) noexcept;
Scenario parse_scenario(const std::string& s);

inline constexpr std::size_t kMaxLevels = 24;
inline constexpr std::size_t kMaxAutoHalfWidth = std::size_t{1} << 22;

struct GridPoint {
    std::string family = "gaussian";
    double beta = 5.0;
    double x_min = 1.0;
    double variance = 1.0;
    std::string family_bar = "gaussian";
    double beta_bar = 5.0;
    double x_min_bar = 1.0;
    double variance_bar = 1.0;
    std::string coupling = "identical";
    double sigma = 0.75;
    double sigma_bar = 0.75;
    double scale = 1.0;
    std::string sidedness = "two_sided";
    double chi = 1.0;
    std::size_t lag = 0;
    double p = 1.0;
    double nu = 1.0;

    InnovationSpec innovation() const;
    InnovationSpec innovation_bar() const;
    Coupling coupling_mode() const { return parse_coupling(coupling); }
    Sidedness sidedness_mode() const { return parse_sidedness(sidedness); }

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

struct ExperimentConfig {
    Scenario scenario = Scenario::Rates;
    std::vector<GridPoint> grid;
    std::size_t replications = 64;
    std::size_t levels = 18;
    std::uint64_t base_seed = 0;
    std::int64_t half_width = -1;
    std::size_t jobs = 1;
    std::string output_dir = "mslln_out";
    std::string format = "csv";
    std::int64_t fit_lo = -1;
    std::int64_t fit_hi = -1;
    std::size_t hill_k = 0;
    std::size_t sa_dimension = 2;
    std::size_t min_replications = 32;

    // Built-in grid for each scenario.
    static ExperimentConfig defaults(Scenario scenario);
    // Throws ConfigError on syntax errors, unknown or duplicate keys.
    static ExperimentConfig parse(std::string_view text);
    static ExperimentConfig load(const std::string& path);

    std::string serialize() const;

    // Overrides one key with a value in the file syntax ("7", "\"out\"", "[0.6, 0.9]").
    // Bare words are accepted for string keys.
    void set(const std::string& key, const std::string& value);

    // Every grid point is checked against the scenario's hypotheses.
    void validate() const;

    // Half-width used for runs: the configured one or an automatic choice.
    std::size_t effective_half_width() const;

    friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

}  // namespace mslln
