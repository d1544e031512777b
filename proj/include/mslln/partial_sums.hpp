#pragma once

// Outer-product series D_k = X_k Xbar_k^T, their analytic mean, centered
// partial sums on the dyadic grid n_r = 2^r, and the diagonal/off-diagonal
// decomposition of the scalar partial sums.

#include "mslln/coefficients.hpp"
#include "mslln/innovations.hpp"
#include "mslln/linear_process.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace mslln {

class OuterSeries {
public:
    OuterSeries(std::size_t length, std::size_t rows, std::size_t cols);

    std::size_t length() const noexcept { return length_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    // k is 0-based (entry for D_{k+1}).
    double& at(std::size_t k, std::size_t i, std::size_t j) { return data_[(k * rows_ + i) * cols_ + j]; }
    double at(std::size_t k, std::size_t i, std::size_t j) const { return data_[(k * rows_ + i) * cols_ + j]; }
    std::span<const double> term(std::size_t k) const {
        return {data_.data() + k * rows_ * cols_, rows_ * cols_};
    }
    Eigen::MatrixXd matrix(std::size_t k) const;

private:
    std::size_t length_, rows_, cols_;
    std::vector<double> data_;
};

// Throws ValidationError on length mismatch.
OuterSeries outer_series(const Eigen::MatrixXd& x, const Eigen::MatrixXd& x_bar);

struct AnalyticMean {
    Eigen::MatrixXd value;
    double remainder_bound = 0.0;  // max-entry bound on the truncation error
};

// D = sum_{|l| <= L} C_l Sigma Cbar_l^T with Sigma = E[Xi Xibar^T].
AnalyticMean analytic_mean(const CoefficientSpec& coef, const CoefficientSpec& coef_bar,
                           const Eigen::MatrixXd& cross_moment, std::size_t half_width);

// E[Xi Xibar^T] for the stream's marginals and coupling.
Eigen::MatrixXd innovation_cross_moment(const InnovationStream& stream);

struct PartialSumLedger {
    std::size_t levels = 0;  // R
    std::size_t rows = 1;
    std::size_t cols = 1;
    std::size_t length = 0;  // number of terms consumed
    std::vector<std::size_t> checkpoints;  // n_r = 2^r, r = 0..R
    std::vector<Eigen::MatrixXd> sums;     // S_{n_r}
    // M_r = max_{n_r <= n < n_{r+1}} ||S_n||_max; the last block stops at `length`.
    std::vector<double> block_max;

    double sum_norm(std::size_t r) const { return sums[r].cwiseAbs().maxCoeff(); }
};

// Streaming builder for a ledger; pushing a sequence in pieces gives the same
// ledger as pushing it whole.
class LedgerAccumulator {
public:
    LedgerAccumulator(std::size_t rows, std::size_t cols, std::size_t levels);

    // Adds one centered term (rows * cols values, row-major).
    void push(std::span<const double> centered_term);
    void push_scalar(double centered_term) { push(std::span<const double>(&centered_term, 1)); }
    std::size_t count() const noexcept { return count_; }
    // Number of terms that still affect the ledger (2^{R+1} - 1).
    std::size_t capacity() const noexcept;
    // Throws ValidationError unless at least 2^R terms were pushed.
    PartialSumLedger finish() const;

private:
    PartialSumLedger ledger_;
    std::vector<double> running_;
    std::size_t count_ = 0;
};

PartialSumLedger centered_ledger(const OuterSeries& series, const AnalyticMean& mean, std::size_t levels);

// Ledger of already-centered scalar terms.
PartialSumLedger scalar_ledger(std::span<const double> centered_terms, std::size_t levels);

inline constexpr std::size_t kPieceCount = 7;

enum class Piece : std::size_t {
    Diagonal = 0,     // l = m
    InWindowOffDiag,  // l != m, both in [k-T, k+T]
    FarAbove,         // l != m, both > k+T
    FarBelow,         // l != m, both < k-T
    MixedAbove,       // one in window, one > k+T
    MixedBelow,       // one in window, one < k-T
    Cross,            // one < k-T, one > k+T
};

std::string_view piece_name(Piece p) noexcept;

struct Decomposition {
    double nu = 1.0;
    std::size_t window = 0;       // T = floor(n^nu)
    std::size_t half_width = 0;   // L of the truncated support
    double centering = 0.0;       // d, carried entirely by the Diagonal piece
    double diagonal_centering = 0.0;
    double in_window_centering = 0.0;
    std::array<std::vector<double>, kPieceCount> pieces;  // series over k = 1..n

    const std::vector<double>& piece(Piece p) const { return pieces[static_cast<std::size_t>(p)]; }
    // Per-k sum of all pieces, equal to d_k - d.
    std::vector<double> total() const;
};

// Scalar case only (1x1 kernels, one innovation coordinate). The window
// T = floor(n^nu) is fixed for the whole horizon n.
Decomposition decompose(const PathConfig& config, double nu = 1.0);

struct TruncatedSplit {
    double level = 0.0;     // u
    double vartheta = 0.0;  // int_0^u P(v > s) ds = E[v ^ u]
    double mean = 0.0;      // E[v]
    double quadrature_tolerance = 0.0;  // 0 when closed form
    std::vector<double> bounded;    // (v_i ^ u) - vartheta
    std::vector<double> remainder;  // v_i - E[v] - bounded_i
};

// Split of v_i = xi_i^2 into a bounded zero-mean part and a zero-mean remainder.
TruncatedSplit truncated_split(std::span<const double> values, double level, const InnovationSpec& spec);

// int_0^u P(xi^2 > s) ds.
double truncated_first_moment(const InnovationSpec& spec, double level);
// E[(xi^2 ^ u)^2] = 2 int_0^u s P(xi^2 > s) ds.
double truncated_second_moment(const InnovationSpec& spec, double level);

}  // namespace mslln
