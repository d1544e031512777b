#include "mslln/coefficients.hpp"

#include "mslln/error.hpp"

#include <cmath>
#include <cstdlib>

namespace mslln {

namespace {

double side_factor(const CoefficientSpec& spec) {
    return spec.sidedness() == Sidedness::TwoSided ? 2.0 : 1.0;
}

// Bound on sum_{|l| > L} envelope^2, valid for L = 0 as well.
double tail_bound(const CoefficientSpec& spec, std::size_t L) {
    const double s2 = spec.scale() * spec.scale();
    const double q = 2.0 * spec.sigma() - 1.0;
    if (L == 0) return s2 * side_factor(spec) * (1.0 + 1.0 / q);
    return s2 * side_factor(spec) * std::pow(static_cast<double>(L), -q) / q;
}

// Bound on the full sum_l envelope^2.
double total_bound(const CoefficientSpec& spec) {
    return spec.scale() * spec.scale() + tail_bound(spec, 0);
}

}  // namespace

const char* to_string(Sidedness s) noexcept {
    return s == Sidedness::TwoSided ? "two_sided" : "causal";
}

Sidedness parse_sidedness(const std::string& s) {
    if (s == "two_sided") return Sidedness::TwoSided;
    if (s == "causal") return Sidedness::OneSidedCausal;
    throw ValidationError("unknown sidedness '" + s + "'");
}

CoefficientSpec::CoefficientSpec(double sigma, Sidedness sidedness, double scale,
                                 Eigen::MatrixXd direction, std::size_t half_width)
    : sigma_(sigma), sidedness_(sidedness), scale_(scale), direction_(std::move(direction)),
      half_width_(half_width) {
    if (!(sigma_ > 0.5 && sigma_ <= 1.0)) throw ValidationError("sigma must lie in (1/2, 1]");
    if (!(scale_ != 0.0) || !std::isfinite(scale_)) throw ValidationError("kernel scale must be finite and nonzero");
    if (direction_.size() == 0) throw ValidationError("direction matrix must be non-empty");
    if (!direction_.allFinite()) throw ValidationError("direction matrix must be finite");
    const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(direction_).singularValues()(0);
    if (!(norm > 0.0)) throw ValidationError("direction matrix must be nonzero");
    if (norm != 1.0) {
        direction_ /= norm;
        scale_ *= norm;
    }
}

CoefficientSpec CoefficientSpec::with_half_width(std::size_t L) const {
    CoefficientSpec copy = *this;
    copy.half_width_ = L;
    return copy;
}

double CoefficientSpec::envelope(std::int64_t l) const noexcept {
    if (l == 0) return scale_;
    if (l < 0 && sidedness_ == Sidedness::OneSidedCausal) return 0.0;
    return scale_ * std::pow(static_cast<double>(std::llabs(l)), -sigma_);
}

std::vector<double> envelope_table(const CoefficientSpec& spec, std::size_t L) {
    std::vector<double> taps(2 * L + 1);
    const auto half = static_cast<std::int64_t>(L);
    for (std::int64_t j = -half; j <= half; ++j) taps[static_cast<std::size_t>(j + half)] = spec.envelope(j);
    return taps;
}

double truncation_error(const CoefficientSpec& spec, std::size_t L) {
    if (L < 1) throw ValidationError("truncation_error requires L >= 1");
    return tail_bound(spec, L);
}

std::size_t choose_half_width(const CoefficientSpec& spec, double tol, std::size_t cap) {
    if (!(tol > 0.0)) throw ValidationError("choose_half_width requires tol > 0");
    const double target = tol * tol;
    for (std::size_t L = 1; L <= cap; L <<= 1) {
        if (truncation_error(spec, L) <= target) return L;
        if (L > cap / 2) break;
    }
    throw CapExceeded("half-width cap exceeded (cap = " + std::to_string(cap) + ")", cap);
}

InnerProduct coefficient_inner(const CoefficientSpec& spec, const CoefficientSpec& spec_bar,
                               std::int64_t h, std::size_t L) {
    const auto half = static_cast<std::int64_t>(L);
    if (std::llabs(h) > half) throw ValidationError("coefficient_inner requires L >= |h|");
    // Neumaier-compensated, fixed order.
    double sum = 0.0;
    double comp = 0.0;
    for (std::int64_t l = -half; l <= half; ++l) {
        const std::int64_t lb = l + h;
        if (lb < -half || lb > half) continue;
        const double term = spec.envelope(l) * spec_bar.envelope(lb);
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }
    InnerProduct out;
    out.value = sum + comp;
    // Dropped pairs have at least one index beyond L - |h|; Cauchy-Schwarz on each side.
    const std::size_t inner = L - static_cast<std::size_t>(std::llabs(h));
    out.remainder_bound = std::sqrt(tail_bound(spec, inner) * total_bound(spec_bar)) +
                          std::sqrt(total_bound(spec) * tail_bound(spec_bar, inner));
    return out;
}

}  // namespace mslln
