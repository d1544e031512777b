#pragma once

// Growth-exponent thresholds and their empirical counterparts, plus the
// autocovariance and rank-2 Appell applications.

#include "mslln/coefficients.hpp"
#include "mslln/partial_sums.hpp"

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace mslln {

enum class Regime { LrdDominant, HtDominant, Clt, Bifurcation };

const char* to_string(Regime r) noexcept;

inline constexpr double kLightTail = std::numeric_limits<double>::infinity();
inline constexpr double kBifurcationTolerance = 1e-9;

// Partial sums of d_k - d grow like n^e* with
//   e* = max(2 - sigma - sigma_bar, 1/alpha, 1/2),   p* = 1/e*.
struct TheoreticalRate {
    double exponent = 0.5;
    Regime regime = Regime::Clt;
    double p_star = 2.0;
    double lrd_exponent = 0.0;  // 2 - sigma - sigma_bar
    double ht_exponent = 0.5;   // 1/(alpha ^ 2)
};

// alpha = kLightTail treats the heavy-tail constraint as 1/2.
// Throws ValidationError for sigma outside (1/2, 1] or alpha <= 1.
TheoreticalRate theoretical_exponent(double sigma, double sigma_bar, double alpha);

struct FitRange {
    std::size_t lo = 0;
    std::size_t hi = 0;
    std::size_t levels() const noexcept { return hi >= lo ? hi - lo + 1 : 0; }
};

// [max(8, R-8), R-1] when that leaves >= 4 levels, else the top four full
// blocks [R-4, R-1] clipped at 0.
FitRange default_fit_range(std::size_t levels);

struct RateFitOptions {
    std::size_t min_replications = 32;
    std::size_t min_levels = 4;
};

struct RateEstimate {
    double slope = 0.0;
    double standard_error = 0.0;
    FitRange range;
    std::size_t replications = 0;
    bool underpowered = false;  // fewer replications than RateFitOptions::min_replications
};

double median(std::vector<double> values);

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double standard_error = 0.0;  // of the slope
};

// Ordinary least squares y = intercept + slope * x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// Slope of log2(median over replications of M_r) against r. With
// enforce = false, too few replications only sets `underpowered`.
RateEstimate empirical_exponent(std::span<const PartialSumLedger> ledgers, FitRange range,
                                RateFitOptions options = {}, bool enforce = true);

// Population autocovariance iota * sum_j c_j c_{j+h} of a truncated causal kernel.
double population_autocov(const CoefficientSpec& coef, double iota, std::size_t lag, std::size_t half_width);

struct AutocovResult {
    std::size_t n = 0;
    std::size_t lag = 0;
    double gamma = 0.0;
    double gamma_hat = 0.0;               // over the prefix n
    std::vector<std::size_t> checkpoints; // n_r = 2^r
    std::vector<double> deviations;       // sum_{k <= n_r} (x_k x_{k+h} - gamma)
    std::vector<double> gamma_hat_at;     // gamma_hat over prefix n_r
};

// `extended` holds x_1 .. x_{n+h}. Checkpoints stop at the largest 2^r <= n.
AutocovResult autocov_pair(std::span<const double> extended, std::size_t n, std::int64_t lag, double gamma);

struct NormalizedDeviation {
    double value = 0.0;
    bool admissible = true;  // p < p*
};

// n^{1 - 1/p} (gamma_hat - gamma). Inadmissible p is still computed but flagged.
NormalizedDeviation normalized_deviation(std::size_t n, double p, double gamma_hat, double gamma,
                                         double p_star = std::numeric_limits<double>::infinity());

// Partial sums of A_2(x_k) = x_k^2 - mu2 on the dyadic grid.
PartialSumLedger appell2_sums(std::span<const double> x, double mu2, std::size_t levels);

}  // namespace mslln
