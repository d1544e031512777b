#include "mslln/partial_sums.hpp"

#include "mslln/convolution.hpp"
#include "mslln/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <variant>

namespace mslln {

OuterSeries::OuterSeries(std::size_t length, std::size_t rows, std::size_t cols)
    : length_(length), rows_(rows), cols_(cols), data_(length * rows * cols, 0.0) {}

Eigen::MatrixXd OuterSeries::matrix(std::size_t k) const {
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows_), static_cast<Eigen::Index>(cols_));
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = at(k, i, j);
    return m;
}

OuterSeries outer_series(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_bar) {
    if (x.rows() != x_bar.rows()) throw ValidationError("outer_series: path length mismatch");
    OuterSeries out(static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(x.cols()),
                    static_cast<std::size_t>(x_bar.cols()));
    for (Eigen::Index k = 0; k < x.rows(); ++k)
        for (Eigen::Index i = 0; i < x.cols(); ++i)
            for (Eigen::Index j = 0; j < x_bar.cols(); ++j)
                out.at(static_cast<std::size_t>(k), static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
                    x(k, i) * x_bar(k, j);
    return out;
}

AnalyticMean analytic_mean(const CoefficientSpec& coef, const CoefficientSpec& coef_bar,
                           const Eigen::MatrixXd& cross_moment, std::size_t half_width) {
    if (cross_moment.rows() != coef.cols() || cross_moment.cols() != coef_bar.cols())
        throw ValidationError("analytic_mean: cross-moment shape does not match kernel columns");
    const InnerProduct inner = coefficient_inner(coef, coef_bar, 0, half_width);
    const Eigen::MatrixXd core = coef.direction() * cross_moment * coef_bar.direction().transpose();
    AnalyticMean out;
    out.value = inner.value * core;
    out.remainder_bound = inner.remainder_bound * core.cwiseAbs().maxCoeff();
    return out;
}

Eigen::MatrixXd innovation_cross_moment(const InnovationStream& stream) {
    const auto m = static_cast<Eigen::Index>(stream.dimension());
    return cross_moment(stream.spec(), stream.spec_bar(), stream.coupling()) * Eigen::MatrixXd::Identity(m, m);
}

LedgerAccumulator::LedgerAccumulator(std::size_t rows, std::size_t cols, std::size_t levels)
    : running_(rows * cols, 0.0) {
    if (levels >= 63) throw ValidationError("ledger levels out of range");
    ledger_.levels = levels;
    ledger_.rows = rows;
    ledger_.cols = cols;
    ledger_.checkpoints.resize(levels + 1);
    ledger_.sums.assign(levels + 1, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols)));
    ledger_.block_max.assign(levels + 1, 0.0);
    for (std::size_t r = 0; r <= levels; ++r) ledger_.checkpoints[r] = std::size_t{1} << r;
}

std::size_t LedgerAccumulator::capacity() const noexcept {
    return (std::size_t{1} << (ledger_.levels + 1)) - 1;
}

void LedgerAccumulator::push(std::span<const double> term) {
    if (term.size() != running_.size()) throw ValidationError("ledger push: term shape mismatch");
    if (count_ >= capacity()) {
        ++count_;
        return;
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < running_.size(); ++i) {
        running_[i] += term[i];
        norm = std::max(norm, std::abs(running_[i]));
    }
    ++count_;
    const auto r = static_cast<std::size_t>(std::bit_width(count_) - 1);
    ledger_.block_max[r] = std::max(ledger_.block_max[r], norm);
    if (count_ == ledger_.checkpoints[r]) {
        auto& s = ledger_.sums[r];
        for (std::size_t i = 0; i < ledger_.rows; ++i)
            for (std::size_t j = 0; j < ledger_.cols; ++j)
                s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = running_[i * ledger_.cols + j];
    }
}

PartialSumLedger LedgerAccumulator::finish() const {
    if (count_ < ledger_.checkpoints.back())
        throw ValidationError("ledger: R too large for n (need n >= 2^R)");
    PartialSumLedger out = ledger_;
    out.length = std::min(count_, capacity());
    return out;
}

PartialSumLedger centered_ledger(const OuterSeries& series, const AnalyticMean& mean, std::size_t levels) {
    if (static_cast<std::size_t>(mean.value.rows()) != series.rows() ||
        static_cast<std::size_t>(mean.value.cols()) != series.cols())
        throw ValidationError("centered_ledger: mean shape mismatch");
    if (levels >= 63 || series.length() < (std::size_t{1} << levels))
        throw ValidationError("centered_ledger: R too large for n (need n >= 2^R)");
    LedgerAccumulator acc(series.rows(), series.cols(), levels);
    std::vector<double> centered(series.rows() * series.cols());
    const std::size_t n = std::min(series.length(), acc.capacity());
    for (std::size_t k = 0; k < n; ++k) {
        const auto t = series.term(k);
        for (std::size_t i = 0; i < series.rows(); ++i)
            for (std::size_t j = 0; j < series.cols(); ++j)
                centered[i * series.cols() + j] =
                    t[i * series.cols() + j] - mean.value(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        acc.push(centered);
    }
    return acc.finish();
}

PartialSumLedger scalar_ledger(std::span<const double> centered_terms, std::size_t levels) {
    if (levels >= 63 || centered_terms.size() < (std::size_t{1} << levels))
        throw ValidationError("scalar_ledger: R too large for n (need n >= 2^R)");
    LedgerAccumulator acc(1, 1, levels);
    const std::size_t n = std::min(centered_terms.size(), acc.capacity());
    for (std::size_t k = 0; k < n; ++k) acc.push_scalar(centered_terms[k]);
    return acc.finish();
}

std::string_view piece_name(Piece p) noexcept {
    switch (p) {
        case Piece::Diagonal: return "diagonal";
        case Piece::InWindowOffDiag: return "in_window_off_diag";
        case Piece::FarAbove: return "far_above";
        case Piece::FarBelow: return "far_below";
        case Piece::MixedAbove: return "mixed_above";
        case Piece::MixedBelow: return "mixed_below";
        case Piece::Cross: return "cross";
    }
    return "?";
}

std::vector<double> Decomposition::total() const {
    std::vector<double> out(pieces[0].size(), 0.0);
    for (const auto& p : pieces)
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
    return out;
}

namespace {

std::size_t window_for(std::size_t n, double nu) {
    const double raw = std::pow(static_cast<double>(n), nu);
    const double nearest = std::round(raw);
    const double t = std::abs(raw - nearest) <= 1e-9 * std::max(1.0, raw) ? nearest : std::floor(raw);
    if (t >= 9.0e18) return std::numeric_limits<std::size_t>::max();
    return static_cast<std::size_t>(t);
}

enum class Region { Window, Above, Below };

// Taps j = -L..L restricted to one region relative to T:
// window |j| <= T; above (l > k+T) is j < -T; below (l < k-T) is j > T.
std::vector<double> region_taps(const std::vector<double>& taps, std::size_t L, std::size_t T, Region region) {
    std::vector<double> out(taps.size(), 0.0);
    const auto half = static_cast<std::int64_t>(L);
    const auto t = static_cast<std::int64_t>(std::min(T, L));
    for (std::int64_t j = -half; j <= half; ++j) {
        const bool keep = region == Region::Window ? (j >= -t && j <= t)
                          : region == Region::Above ? j < -t
                                                    : j > t;
        if (keep) out[static_cast<std::size_t>(j + half)] = taps[static_cast<std::size_t>(j + half)];
    }
    return out;
}

}  // namespace

Decomposition decompose(const PathConfig& config, double nu) {
    if (!config.coef.is_scalar() || !config.coef_bar.is_scalar() || config.stream.dimension() != 1)
        throw ValidationError("decompose: only the scalar case (d = m = 1) is supported");
    if (!(nu > 0.0)) throw ValidationError("decompose: window exponent nu must be > 0");
    const std::size_t n = config.n;
    const std::size_t L = config.half_width;
    if (n == 0) throw ValidationError("decompose: n must be >= 1");
    const auto half = static_cast<std::int64_t>(L);
    if (!config.stream.covers(1 - half, static_cast<std::int64_t>(n) + half))
        throw ValidationError("decompose: innovation stream shorter than n + 2L");

    Decomposition out;
    out.nu = nu;
    out.window = window_for(n, nu);
    out.half_width = L;

    std::vector<double> xi(n + 2 * L), xi_bar(n + 2 * L), prod(n + 2 * L);
    config.stream.fill_coordinate(1 - half, 0, xi, xi_bar);
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = xi[i] * xi_bar[i];

    const std::vector<double> taps = envelope_table(config.coef, L);
    const std::vector<double> taps_bar = envelope_table(config.coef_bar, L);
    std::vector<double> taps_diag(taps.size());
    for (std::size_t i = 0; i < taps.size(); ++i) taps_diag[i] = taps[i] * taps_bar[i];

    auto part = [&](const std::vector<double>& t, const std::vector<double>& signal, Region region) {
        return convolve_window(region_taps(t, L, out.window, region), signal);
    };
    const auto w = part(taps, xi, Region::Window);
    const auto a = part(taps, xi, Region::Above);
    const auto b = part(taps, xi, Region::Below);
    const auto wb = part(taps_bar, xi_bar, Region::Window);
    const auto ab = part(taps_bar, xi_bar, Region::Above);
    const auto bb = part(taps_bar, xi_bar, Region::Below);
    const auto dw = part(taps_diag, prod, Region::Window);
    const auto da = part(taps_diag, prod, Region::Above);
    const auto db = part(taps_diag, prod, Region::Below);

    const double d = cross_moment(config.stream.spec(), config.stream.spec_bar(), config.stream.coupling()) *
                     coefficient_inner(config.coef, config.coef_bar, 0, L).value;
    out.centering = d;
    out.diagonal_centering = d;
    out.in_window_centering = 0.0;

    for (auto& p : out.pieces) p.resize(n);
    auto set = [&](Piece p, std::size_t k, double v) { out.pieces[static_cast<std::size_t>(p)][k] = v; };
    for (std::size_t k = 0; k < n; ++k) {
        set(Piece::Diagonal, k, dw[k] + da[k] + db[k] - d);
        set(Piece::InWindowOffDiag, k, w[k] * wb[k] - dw[k]);
        set(Piece::FarAbove, k, a[k] * ab[k] - da[k]);
        set(Piece::FarBelow, k, b[k] * bb[k] - db[k]);
        set(Piece::MixedAbove, k, w[k] * ab[k] + a[k] * wb[k]);
        set(Piece::MixedBelow, k, w[k] * bb[k] + b[k] * wb[k]);
        set(Piece::Cross, k, a[k] * bb[k] + b[k] * ab[k]);
    }
    return out;
}

namespace {

struct SquareLawIntegrals {
    double first;
    double second;
    double tolerance;
};

SquareLawIntegrals square_law_integrals(const InnovationSpec& spec, double u) {
    if (!(u > 0.0)) throw ValidationError("truncation level must be > 0");
    if (const auto* p = std::get_if<PowerLawSymmetric>(&spec.family())) {
        const double f = p->x_min * p->x_min;  // P(xi^2 > s) = 1 below f
        const double a = 0.5 * (p->beta - 1.0);
        if (u <= f) return {u, u * u, 0.0};
        const double first = a == 1.0 ? f + f * std::log(u / f) : f + f * (std::pow(u / f, 1.0 - a) - 1.0) / (1.0 - a);
        const double second = a == 2.0 ? f * f + 2.0 * f * f * std::log(u / f)
                                       : f * f + 2.0 * std::pow(f, a) * (std::pow(u, 2.0 - a) - std::pow(f, 2.0 - a)) / (2.0 - a);
        return {first, second, 0.0};
    }
    // Quadrature fallback; the integrands are smooth on (0, u].
    double err1 = 0.0, err2 = 0.0;
    using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double first = Quad::integrate([&](double s) { return square_survival(spec, s); }, 0.0, u, 15, 1e-12, &err1);
    const double second =
        Quad::integrate([&](double s) { return 2.0 * s * square_survival(spec, s); }, 0.0, u, 15, 1e-12, &err2);
    return {first, second, std::max(err1, err2)};
}

}  // namespace

double truncated_first_moment(const InnovationSpec& spec, double level) {
    return square_law_integrals(spec, level).first;
}

double truncated_second_moment(const InnovationSpec& spec, double level) {
    return square_law_integrals(spec, level).second;
}

TruncatedSplit truncated_split(std::span<const double> values, double level, const InnovationSpec& spec) {
    const SquareLawIntegrals ints = square_law_integrals(spec, level);
    TruncatedSplit out;
    out.level = level;
    out.vartheta = ints.first;
    out.quadrature_tolerance = ints.tolerance;
    out.mean = moment(spec, 2.0);
    out.bounded.resize(values.size());
    out.remainder.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] < 0.0) throw ValidationError("truncated_split: values must be non-negative");
        out.bounded[i] = std::min(values[i], level) - out.vartheta;
        out.remainder[i] = values[i] - out.mean - out.bounded[i];
    }
    return out;
}

}  // namespace mslln
