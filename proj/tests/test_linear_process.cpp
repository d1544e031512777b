#include "mslln/convolution.hpp"
#include "mslln/error.hpp"
#include "mslln/linear_process.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace mslln;

namespace {

// x_k = sum_{|j| <= L} C_j xi_{k-j}, straight from the definition.
Eigen::MatrixXd naive_path(const CoefficientSpec& coef, const InnovationStream& s, bool bar, std::size_t n,
                           std::size_t L) {
    const auto half = static_cast<std::int64_t>(L);
    const auto m = static_cast<Eigen::Index>(s.dimension());
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), coef.rows());
    for (std::int64_t k = 1; k <= static_cast<std::int64_t>(n); ++k)
        for (std::int64_t j = -half; j <= half; ++j) {
            Eigen::VectorXd xi(m);
            for (Eigen::Index c = 0; c < m; ++c)
                xi(c) = bar ? s.xi_bar(k - j, static_cast<std::size_t>(c)) : s.xi(k - j, static_cast<std::size_t>(c));
            out.row(k - 1) += (coef.matrix(j) * xi).transpose();
        }
    return out;
}

double max_rel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

TEST_CASE("convolution strategies agree with the defining sum") {
    for (std::size_t L : {0, 1, 5, 100})
        for (std::size_t n : {1, 7, 300}) {
            std::vector<double> taps(2 * L + 1), signal(n + 2 * L);
            for (std::size_t i = 0; i < taps.size(); ++i) taps[i] = std::sin(1.0 + double(i));
            for (std::size_t i = 0; i < signal.size(); ++i) signal[i] = std::cos(0.3 * double(i * i));
            const auto direct = convolve_window(taps, signal, ConvolutionStrategy::Direct);
            const auto fft = convolve_window(taps, signal, ConvolutionStrategy::Fft);
            const auto autos = convolve_window(taps, signal);
            REQUIRE(direct.size() == n);
            REQUIRE(fft.size() == n);
            for (std::size_t o = 0; o < n; ++o) {
                double ref = 0.0;
                for (std::size_t i = 0; i < taps.size(); ++i) ref += taps[i] * signal[o + 2 * L - i];
                CHECK(std::abs(direct[o] - ref) <= 1e-12 * (1.0 + std::abs(ref)));
                CHECK(std::abs(fft[o] - ref) <= 1e-10 * (1.0 + std::abs(ref)));
                CHECK(autos[o] == direct[o]);
            }
        }
}

TEST_CASE("convolution rejects a short signal") {
    std::vector<double> taps(5, 1.0), signal(4, 1.0);
    CHECK_THROWS_AS(convolve_window(taps, signal), ValidationError);
}

TEST_CASE("scalar paths match the naive double loop") {
    const auto spec = InnovationSpec::power_law(1.0, 4.0);
    for (auto side : {Sidedness::TwoSided, Sidedness::OneSidedCausal})
        for (std::size_t L : {0, 3, 64, 1024})
            for (std::size_t n : {1, 100, 1024}) {
                const CoefficientSpec coef(0.7, side, 1.2);
                const auto stream = make_path_stream(spec, spec, Coupling::Identical, 21, n, L);
                const Eigen::MatrixXd ref = naive_path(coef, stream, false, n, L);
                for (auto strategy : {ConvolutionStrategy::Direct, ConvolutionStrategy::Fft})
                    CHECK(max_rel(generate_path(coef, stream, false, n, L, strategy), ref) <= 1e-10);
            }
}

TEST_CASE("vector paths apply the direction matrix") {
    Eigen::MatrixXd dir(2, 3);
    dir << 1, 0.5, 0, -0.25, 1, 2;
    const CoefficientSpec coef(0.8, Sidedness::TwoSided, 0.9, dir);
    const auto spec = InnovationSpec::gaussian();
    const auto stream = make_path_stream(spec, spec, Coupling::Independent, 5, 200, 20, 3);
    CHECK(max_rel(generate_path(coef, stream, false, 200, 20), naive_path(coef, stream, false, 200, 20)) <= 1e-10);
    CHECK(max_rel(generate_path(coef, stream, true, 200, 20), naive_path(coef, stream, true, 200, 20)) <= 1e-10);
}

TEST_CASE("pair paths share work only when they must be equal") {
    const auto spec = InnovationSpec::folded_t(5.0);
    const std::size_t n = 256, L = 32;
    const CoefficientSpec a(0.75, Sidedness::TwoSided, 1.0), b(0.9, Sidedness::TwoSided, 1.0);
    const PathConfig same{a, a, make_path_stream(spec, spec, Coupling::Identical, 1, n, L), n, L};
    const PairPaths p = generate_pair_paths(same);
    CHECK(p.x == p.x_bar);
    const PathConfig diff{a, b, make_path_stream(spec, spec, Coupling::Identical, 1, n, L), n, L};
    const PairPaths q = generate_pair_paths(diff);
    CHECK(q.x == p.x);
    CHECK(max_rel(q.x_bar, naive_path(b, diff.stream, true, n, L)) <= 1e-10);
    const PathConfig ind{a, a, make_path_stream(spec, spec, Coupling::Independent, 1, n, L), n, L};
    const PairPaths r = generate_pair_paths(ind);
    CHECK(max_rel(r.x_bar, naive_path(a, ind.stream, true, n, L)) <= 1e-10);
    CHECK(r.x != r.x_bar);
}

TEST_CASE("path generation rejects a short stream") {
    const auto spec = InnovationSpec::gaussian();
    const CoefficientSpec coef(0.75, Sidedness::TwoSided, 1.0);
    const InnovationStream short_stream(spec, 1, 0, 50);
    CHECK_THROWS_WITH_AS(generate_path(coef, short_stream, false, 40, 8),
                         doctest::Contains("innovation stream shorter than n + 2L"), ValidationError);
}

TEST_CASE("lagged pairs are shifted copies of one causal path") {
    const auto spec = InnovationSpec::gaussian();
    const CoefficientSpec coef(0.8, Sidedness::OneSidedCausal, 1.0);
    const std::size_t n = 100, lag = 3, L = 16;
    const auto stream = make_path_stream(spec, spec, Coupling::Identical, 2, n + lag, L);
    const LaggedPair lp = generate_lagged_pair(coef, stream, n, lag, L);
    const Eigen::MatrixXd full = naive_path(coef, stream, false, n + lag, L);
    CHECK(max_rel(lp.x, full.topRows(n)) <= 1e-12);
    CHECK(max_rel(lp.shifted, full.middleRows(lag, n)) <= 1e-12);
    CHECK_THROWS_AS(generate_lagged_pair(CoefficientSpec(0.8, Sidedness::TwoSided, 1.0), stream, n, lag, L),
                    ValidationError);
}
