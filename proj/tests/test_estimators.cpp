#include "mslln/error.hpp"
#include "mslln/estimators.hpp"
#include "mslln/innovations.hpp"
#include "mslln/linear_process.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mslln;

namespace {

struct Expected {
    double e;
    Regime regime;
};

// Straight transcription of the threshold and the regime rule.
Expected oracle_exponent(double s, double sb, double alpha) {
    const double lrd = 2.0 - s - sb;
    const double ht = alpha < 2.0 ? 1.0 / alpha : 0.5;
    double e = 0.5;
    if (lrd > e) e = lrd;
    if (ht > e) e = ht;
    if (alpha < 2.0 && lrd > 0.0 && std::abs(alpha * lrd - 1.0) <= 1e-9 * alpha) return {e, Regime::Bifurcation};
    if (e == 0.5) return {e, Regime::Clt};
    return {e, lrd >= ht ? Regime::LrdDominant : Regime::HtDominant};
}

}  // namespace

TEST_CASE("threshold examples") {
    auto a = theoretical_exponent(0.6, 0.6, 1.8);
    CHECK(a.exponent == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(a.regime == Regime::LrdDominant);
    CHECK(a.p_star == doctest::Approx(1.25));
    auto b = theoretical_exponent(0.95, 0.95, 1.25);
    CHECK(b.exponent == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(b.regime == Regime::HtDominant);
    CHECK(theoretical_exponent(0.7, 0.7, 1.0 / 0.6).regime == Regime::Bifurcation);
    CHECK(theoretical_exponent(0.95, 0.95, kLightTail).regime == Regime::Clt);
    CHECK(theoretical_exponent(0.95, 0.95, kLightTail).exponent == 0.5);
    CHECK_THROWS_AS(theoretical_exponent(0.5, 0.8, 1.5), ValidationError);
    CHECK_THROWS_AS(theoretical_exponent(0.8, 0.8, 1.0), ValidationError);
    CHECK(std::string(to_string(Regime::HtDominant)) == "HT-dominant");
}

TEST_CASE("threshold on a 20-point grid") {
    const double pairs[][2] = {{0.55, 0.6}, {0.6, 0.6}, {0.7, 0.75}, {0.8, 0.9}, {0.95, 1.0}};
    const double alphas[] = {1.2, 1.6, 1.9, kLightTail};
    int count = 0;
    for (const auto& [s, sb] : pairs)
        for (double a : alphas) {
            const Expected o = oracle_exponent(s, sb, a);
            const auto t = theoretical_exponent(s, sb, a);
            CHECK(std::abs(t.exponent - o.e) <= 1e-12);
            CHECK(t.regime == o.regime);
            CHECK(std::abs(t.p_star * o.e - 1.0) <= 1e-12);
            ++count;
        }
    CHECK(count == 20);
}

TEST_CASE("exponent is monotone in sigma and alpha") {
    double prev = 1.0;
    for (double s = 0.55; s <= 1.0; s += 0.05) {
        const double e = theoretical_exponent(s, 0.7, 1.7).exponent;
        CHECK(e <= prev);
        prev = e;
    }
    prev = 1.0;
    for (double a = 1.1; a <= 3.0; a += 0.1) {
        const double e = theoretical_exponent(0.9, 0.9, a).exponent;
        CHECK(e <= prev);
        prev = e;
    }
}

TEST_CASE("default fit ranges") {
    CHECK(default_fit_range(18).lo == 10);
    CHECK(default_fit_range(18).hi == 17);
    CHECK(default_fit_range(12).lo == 8);
    CHECK(default_fit_range(12).hi == 11);
    CHECK(default_fit_range(6).lo == 2);
    CHECK(default_fit_range(6).hi == 5);
    CHECK(default_fit_range(4).levels() == 4);
}

TEST_CASE("median and least squares") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 3.0, 2.0}) == 2.5);
    CHECK_THROWS_AS(median({}), ValidationError);
    const std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
    const LineFit f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.standard_error == doctest::Approx(0.0));
    const std::vector<double> y2 = {0, 2, 1, 3};
    // slope 0.8, residuals (-.1, 1.1, -.7, .5): sse 1.8, sxx 5.
    CHECK(fit_line(x, y2).standard_error == doctest::Approx(std::sqrt(1.8 / 2.0 / 5.0)));
    CHECK_THROWS_AS(fit_line(std::vector<double>{1, 1}, std::vector<double>{0, 1}), DegenerateError);
}

TEST_CASE("deterministic unit terms have exponent one") {
    const std::size_t R = 18;
    const std::vector<double> ones((std::size_t{1} << (R + 1)) - 1, 1.0);
    const std::vector<PartialSumLedger> ledgers(32, scalar_ledger(ones, R));
    const FitRange range{8, 17};
    const RateEstimate e = empirical_exponent(ledgers, range);
    // M_r = 2^{r+1} - 1, so the fitted slope is that of log2(2^{r+1} - 1).
    std::vector<double> rs, ys;
    for (std::size_t r = 8; r <= 17; ++r) {
        rs.push_back(double(r));
        ys.push_back(std::log2(std::ldexp(1.0, int(r) + 1) - 1.0));
    }
    CHECK(std::abs(e.slope - fit_line(rs, ys).slope) <= 1e-12);
    CHECK(std::abs(e.slope - 1.0) < 5e-3);
    CHECK_FALSE(e.underpowered);
}

TEST_CASE("replication and level minimums") {
    const std::vector<double> ones(1 << 10, 1.0);
    const std::vector<PartialSumLedger> few(8, scalar_ledger(ones, 9));
    CHECK_THROWS_AS(empirical_exponent(few, {4, 8}), ValidationError);
    const RateEstimate e = empirical_exponent(few, {4, 8}, {}, false);
    CHECK(e.underpowered);
    CHECK(e.replications == 8);
    CHECK_THROWS_AS(empirical_exponent(few, {4, 6}, {}, false), ValidationError);
    CHECK_THROWS_AS(empirical_exponent(few, {4, 10}, {}, false), ValidationError);
    const std::vector<double> zeros(1 << 10, 0.0);
    const std::vector<PartialSumLedger> flat(32, scalar_ledger(zeros, 9));
    CHECK_THROWS_AS(empirical_exponent(flat, {4, 8}), DegenerateError);
}

TEST_CASE("iid gaussian squares grow like the square root") {
    const std::size_t R = 17;
    const std::size_t n = std::size_t{1} << R;
    std::vector<PartialSumLedger> ledgers;
    std::vector<double> terms(n);
    for (std::uint64_t rep = 0; rep < 64; ++rep) {
        const InnovationStream s(InnovationSpec::gaussian(), 1000 + rep, 1, n);
        for (std::size_t k = 0; k < n; ++k) {
            const double v = s.xi(static_cast<std::int64_t>(k) + 1);
            terms[k] = v * v - 1.0;
        }
        ledgers.push_back(scalar_ledger(terms, R));
    }
    const RateEstimate e = empirical_exponent(ledgers, {8, 16});
    CHECK(std::abs(e.slope - 0.5) <= 0.1);
}

TEST_CASE("population autocovariance against direct summation") {
    const CoefficientSpec c(0.8, Sidedness::OneSidedCausal, 1.0);
    for (std::size_t h : {0, 1, 2, 7}) {
        const std::size_t L = 500;
        double brute = 0.0;
        for (std::size_t j = 0; j + h <= L; ++j) brute += c.envelope(std::int64_t(j)) * c.envelope(std::int64_t(j + h));
        CHECK(std::abs(population_autocov(c, 1.5, h, L) - 1.5 * brute) <= 1e-12 * brute);
    }
    CHECK_THROWS_AS(population_autocov(CoefficientSpec(0.8, Sidedness::TwoSided, 1.0), 1.0, 0, 8), ValidationError);
}

TEST_CASE("autocovariance pair against naive sums") {
    std::vector<double> x(40);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = std::sin(double(k) * 1.3) + 0.5;
    const AutocovResult r = autocov_pair(x, 37, 3, 0.2);
    REQUIRE(r.checkpoints.size() == 6);
    CHECK(r.checkpoints.back() == 32);
    for (std::size_t i = 0; i < r.checkpoints.size(); ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < r.checkpoints[i]; ++k) s += x[k] * x[k + 3];
        CHECK(r.deviations[i] == doctest::Approx(s - 0.2 * double(r.checkpoints[i])).epsilon(1e-13));
        CHECK(r.gamma_hat_at[i] == doctest::Approx(s / double(r.checkpoints[i])).epsilon(1e-13));
    }
    double total = 0.0;
    for (std::size_t k = 0; k < 37; ++k) total += x[k] * x[k + 3];
    CHECK(r.gamma_hat == doctest::Approx(total / 37.0));
    CHECK_THROWS_AS(autocov_pair(x, 38, 3, 0.0), ValidationError);
    CHECK_THROWS_AS(autocov_pair(x, 10, -1, 0.0), ValidationError);
}

TEST_CASE("delta kernel autocovariances") {
    const std::size_t n = 1 << 16;
    const CoefficientSpec delta(0.8, Sidedness::OneSidedCausal, 1.0);
    const auto spec = InnovationSpec::gaussian(2.0);
    const auto stream = make_path_stream(spec, spec, Coupling::Identical, 12, n + 1, 0);
    const Eigen::MatrixXd path = generate_path(delta, stream, false, n + 1, 0);
    const std::vector<double> x(path.data(), path.data() + path.size());
    CHECK(population_autocov(delta, 2.0, 0, 0) == 2.0);
    const AutocovResult r1 = autocov_pair(x, n, 1, 0.0);
    CHECK(std::abs(r1.gamma_hat) < 5.0 * 2.0 / std::sqrt(double(n)));
    const AutocovResult r0 = autocov_pair(x, n, 0, 2.0);
    CHECK(std::abs(r0.gamma_hat - 2.0) < 5.0 * 2.0 * std::sqrt(2.0 / double(n)));
}

TEST_CASE("normalized deviation") {
    CHECK(normalized_deviation(1024, 1.3, 0.7, 0.7).value == 0.0);
    CHECK(normalized_deviation(1024, 1.0, 0.9, 0.7).value == doctest::Approx(0.2));
    CHECK(normalized_deviation(1024, 2.0, 0.9, 0.7).value == doctest::Approx(32.0 * 0.2));
    CHECK(normalized_deviation(16, 1.9, 1.0, 0.0, 1.8).admissible == false);
    CHECK(normalized_deviation(16, 1.15, 1.0, 0.0, 1.8).admissible);
    CHECK_THROWS_AS(normalized_deviation(0, 1.1, 0, 0), ValidationError);
}

TEST_CASE("appell sums coincide with the lag-zero ledgers") {
    for (std::uint64_t seed : {1, 2, 3}) {
        const std::size_t n = 1 << 12, L = 256;
        const CoefficientSpec c(0.6, Sidedness::OneSidedCausal, 1.0);
        const auto spec = InnovationSpec::gaussian();
        const auto stream = make_path_stream(spec, spec, Coupling::Identical, seed, n, L);
        const Eigen::MatrixXd path = generate_path(c, stream, false, n, L);
        const double mu2 = population_autocov(c, 1.0, 0, L);
        const std::vector<double> x(path.data(), path.data() + path.size());
        const PartialSumLedger a = appell2_sums(x, mu2, 12);
        const PartialSumLedger o =
            centered_ledger(outer_series(path, path), AnalyticMean{Eigen::MatrixXd::Constant(1, 1, mu2), 0.0}, 12);
        const AutocovResult h0 = autocov_pair(x, n, 0, mu2);
        for (std::size_t r = 0; r <= 12; ++r) {
            CHECK(std::abs(a.sums[r](0, 0) - o.sums[r](0, 0)) <= 1e-12 * (1.0 + std::abs(o.sums[r](0, 0))));
            CHECK(std::abs(a.sums[r](0, 0) - h0.deviations[r]) <= 1e-12 * (1.0 + std::abs(h0.deviations[r])));
            CHECK(a.block_max[r] == o.block_max[r]);
        }
    }
    CHECK_THROWS_AS(appell2_sums(std::vector<double>(10, 1.0), 1.0, 4), ValidationError);
}
