#include "mslln/estimators.hpp"

#include "mslln/error.hpp"

#include <algorithm>
#include <cmath>

namespace mslln {

const char* to_string(Regime r) noexcept {
    switch (r) {
        case Regime::LrdDominant: return "LRD-dominant";
        case Regime::HtDominant: return "HT-dominant";
        case Regime::Clt: return "CLT";
        case Regime::Bifurcation: return "Bifurcation";
    }
    return "?";
}

TheoreticalRate theoretical_exponent(double sigma, double sigma_bar, double alpha) {
    if (!(sigma > 0.5 && sigma <= 1.0) || !(sigma_bar > 0.5 && sigma_bar <= 1.0))
        throw ValidationError("theoretical_exponent: sigma and sigma_bar must lie in (1/2, 1]");
    if (!(alpha > 1.0)) throw ValidationError("theoretical_exponent: alpha must exceed 1");

    TheoreticalRate out;
    out.lrd_exponent = 2.0 - sigma - sigma_bar;
    const bool heavy = alpha < 2.0;
    out.ht_exponent = heavy ? 1.0 / alpha : 0.5;
    out.exponent = std::max({out.lrd_exponent, out.ht_exponent, 0.5});
    out.p_star = 1.0 / out.exponent;

    if (heavy && out.lrd_exponent > 0.0 && std::abs(alpha - 1.0 / out.lrd_exponent) <= kBifurcationTolerance)
        out.regime = Regime::Bifurcation;
    else if (out.lrd_exponent > 0.5 && out.lrd_exponent >= out.ht_exponent)
        out.regime = Regime::LrdDominant;
    else if (out.ht_exponent > 0.5)
        out.regime = Regime::HtDominant;
    else
        out.regime = Regime::Clt;
    return out;
}

FitRange default_fit_range(std::size_t levels) {
    if (levels >= 12) return {std::max<std::size_t>(8, levels - 8), levels - 1};
    const std::size_t hi = levels == 0 ? 0 : levels - 1;
    return {hi >= 3 ? hi - 3 : 0, hi};
}

double median(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of an empty set");
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ValidationError("fit_line needs >= 2 matched points");
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DegenerateError("fit_line: x values have no spread");
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (x.size() > 2) {
        double sse = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double e = y[i] - fit.intercept - fit.slope * x[i];
            sse += e * e;
        }
        fit.standard_error = std::sqrt(sse / (n - 2.0) / sxx);
    }
    return fit;
}

RateEstimate empirical_exponent(std::span<const PartialSumLedger> ledgers, FitRange range, RateFitOptions options,
                                bool enforce) {
    if (ledgers.empty()) throw ValidationError("empirical_exponent: no ledgers");
    const std::size_t levels = ledgers.front().levels;
    for (const auto& l : ledgers)
        if (l.levels != levels) throw ValidationError("empirical_exponent: ledgers disagree on R");
    if (range.hi < range.lo || range.hi > levels) throw ValidationError("empirical_exponent: fit range outside ledger");
    if (range.levels() < options.min_levels)
        throw ValidationError("empirical_exponent: fit range needs >= " + std::to_string(options.min_levels) + " levels");

    RateEstimate out;
    out.range = range;
    out.replications = ledgers.size();
    out.underpowered = ledgers.size() < options.min_replications;
    if (out.underpowered && enforce)
        throw ValidationError("empirical_exponent: needs >= " + std::to_string(options.min_replications) +
                              " replications");

    std::vector<double> rs, ys;
    std::vector<double> maxima(ledgers.size());
    for (std::size_t r = range.lo; r <= range.hi; ++r) {
        for (std::size_t i = 0; i < ledgers.size(); ++i) maxima[i] = ledgers[i].block_max[r];
        const double med = median(maxima);
        if (!(med > 0.0)) throw DegenerateError("empirical_exponent: block maxima vanish at level " + std::to_string(r));
        rs.push_back(static_cast<double>(r));
        ys.push_back(std::log2(med));
    }
    const LineFit fit = fit_line(rs, ys);
    out.slope = fit.slope;
    out.standard_error = fit.standard_error;
    return out;
}

double population_autocov(const CoefficientSpec& coef, double iota, std::size_t lag, std::size_t half_width) {
    if (coef.sidedness() != Sidedness::OneSidedCausal)
        throw ValidationError("population_autocov: causal kernel required");
    return iota * coefficient_inner(coef, coef, static_cast<std::int64_t>(lag), half_width).value;
}

AutocovResult autocov_pair(std::span<const double> extended, std::size_t n, std::int64_t lag, double gamma) {
    if (lag < 0) throw ValidationError("autocov_pair: lag must be >= 0");
    if (n == 0) throw ValidationError("autocov_pair: n must be >= 1");
    const auto h = static_cast<std::size_t>(lag);
    if (extended.size() < n + h) throw ValidationError("autocov_pair: path shorter than n + h");

    AutocovResult out;
    out.n = n;
    out.lag = h;
    out.gamma = gamma;
    double running = 0.0;
    double products = 0.0;
    std::size_t next = 1;
    for (std::size_t k = 0; k < n; ++k) {
        const double prod = extended[k] * extended[k + h];
        products += prod;
        running += prod - gamma;
        if (k + 1 == next) {
            out.checkpoints.push_back(next);
            out.deviations.push_back(running);
            out.gamma_hat_at.push_back(products / static_cast<double>(next));
            next <<= 1;
        }
    }
    out.gamma_hat = products / static_cast<double>(n);
    return out;
}

NormalizedDeviation normalized_deviation(std::size_t n, double p, double gamma_hat, double gamma, double p_star) {
    if (n == 0) throw ValidationError("normalized_deviation: n must be >= 1");
    if (!(p > 0.0)) throw ValidationError("normalized_deviation: p must be > 0");
    NormalizedDeviation out;
    out.value = std::pow(static_cast<double>(n), 1.0 - 1.0 / p) * (gamma_hat - gamma);
    out.admissible = p < p_star;
    return out;
}

PartialSumLedger appell2_sums(std::span<const double> x, double mu2, std::size_t levels) {
    if (levels >= 63 || x.size() < (std::size_t{1} << levels))
        throw ValidationError("appell2_sums: R too large for n (need n >= 2^R)");
    LedgerAccumulator acc(1, 1, levels);
    const std::size_t n = std::min(x.size(), acc.capacity());
    for (std::size_t k = 0; k < n; ++k) acc.push_scalar(x[k] * x[k] - mu2);
    return acc.finish();
}

}  // namespace mslln
