#pragma once

// Polynomially decaying coefficient kernels C_l = envelope(l) * M with
// envelope(0) = s and envelope(l) = s |l|^-sigma otherwise.

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mslln {

enum class Sidedness {
    TwoSided,
    OneSidedCausal,  // C_l = 0 for l < 0
};

const char* to_string(Sidedness s) noexcept;
Sidedness parse_sidedness(const std::string& s);

class CoefficientSpec {
public:
    // sigma in (1/2, 1], scale != 0. The direction matrix (d x m) is rescaled to
    // unit operator norm and its norm is folded into the scale, so the kernel
    // values C_l are exactly what was passed in.
    CoefficientSpec(double sigma, Sidedness sidedness, double scale,
                    Eigen::MatrixXd direction = Eigen::MatrixXd::Identity(1, 1),
                    std::size_t half_width = 0);

    double sigma() const noexcept { return sigma_; }
    Sidedness sidedness() const noexcept { return sidedness_; }
    double scale() const noexcept { return scale_; }
    const Eigen::MatrixXd& direction() const noexcept { return direction_; }
    std::size_t half_width() const noexcept { return half_width_; }
    Eigen::Index rows() const noexcept { return direction_.rows(); }
    Eigen::Index cols() const noexcept { return direction_.cols(); }
    bool is_scalar() const noexcept { return rows() == 1 && cols() == 1; }

    CoefficientSpec with_half_width(std::size_t L) const;

    double envelope(std::int64_t l) const noexcept;
    Eigen::MatrixXd matrix(std::int64_t l) const { return envelope(l) * direction_; }

private:
    double sigma_;
    Sidedness sidedness_;
    double scale_;
    Eigen::MatrixXd direction_;
    std::size_t half_width_;
};

inline double envelope(const CoefficientSpec& spec, std::int64_t l) noexcept { return spec.envelope(l); }

// Envelope taps for j = -L..L stored at index j + L.
std::vector<double> envelope_table(const CoefficientSpec& spec, std::size_t L);

// Upper bound on sum_{|l| > L} envelope(l)^2 (integral comparison). L >= 1.
double truncation_error(const CoefficientSpec& spec, std::size_t L);

inline constexpr std::size_t kDefaultHalfWidthCap = std::size_t{1} << 30;

// Smallest power of two L with truncation_error(L) <= tol^2. Throws
// CapExceeded when L would exceed `cap`.
std::size_t choose_half_width(const CoefficientSpec& spec, double tol,
                              std::size_t cap = kDefaultHalfWidthCap);

struct InnerProduct {
    double value = 0.0;
    // Bound on the part of the untruncated sum that was dropped.
    double remainder_bound = 0.0;
};

// sum_{|l| <= L, |l+h| <= L} envelope(l) * envelope_bar(l + h). Requires L >= |h|.
InnerProduct coefficient_inner(const CoefficientSpec& spec, const CoefficientSpec& spec_bar,
                               std::int64_t h, std::size_t L);

}  // namespace mslln
