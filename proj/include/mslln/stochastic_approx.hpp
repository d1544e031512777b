#pragma once

// Stochastic approximation h_{k+1} = h_k + k^-chi (b_k - A_k h_k) with
// A_k = z_k z_k^T and b_k = y_{k+1} z_k, driven by the joint linear process
// (z_k^T, y_{k+1})^T = sum_l C_{k-l} Xi_l.

#include "mslln/coefficients.hpp"
#include "mslln/estimators.hpp"
#include "mslln/innovations.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace mslln {

inline constexpr double kDivergenceThreshold = 1e12;
inline constexpr double kMaxConditionNumber = 1e8;

struct SAConfig {
    double chi = 1.0;
    CoefficientSpec joint_kernel;  // (d+1) x m; the last row generates y_{k+1}
    InnovationSpec innovation;     // Xibar = Xi
    Eigen::VectorXd initial;       // h_1; empty means zero
    std::size_t levels = 10;       // horizon n = 2^levels
    std::size_t half_width = 0;
    std::uint64_t seed = 0;

    std::size_t dimension() const noexcept { return static_cast<std::size_t>(joint_kernel.rows()) - 1; }
    // Throws ValidationError when chi is outside (1/2, 1] or shapes disagree.
    void validate() const;
};

struct SATarget {
    Eigen::MatrixXd a;       // E[z z^T]
    Eigen::VectorXd b;       // E[y z]
    Eigen::VectorXd h_star;  // a^{-1} b
    double condition = 1.0;
};

// Throws IllPosedTarget when cond(A) > 1e8.
SATarget sa_target(const CoefficientSpec& joint_kernel, const Eigen::MatrixXd& cross_moment, std::size_t half_width);

struct SATrace {
    std::vector<std::size_t> checkpoints;  // n_r = 2^r reached before any abort
    std::vector<double> errors;            // |h_{n_r} - h*|
    bool aborted = false;
    std::size_t abort_step = 0;
    Eigen::VectorXd final_iterate;
    double decay_exponent = 0.0;  // fitted over the top five recorded levels (NaN if unavailable)
};

// Per-step record used to check the recursion against stored data.
struct SAStep {
    Eigen::VectorXd before;
    Eigen::VectorXd after;
    double gain = 0.0;
};

// Runs the recursion over a given joint path (row k-1 = (z_k^T, y_{k+1})).
// Steps k = 1 .. 2^levels - 1 are taken so that h_{2^levels} is reached.
SATrace sa_run_on_path(const Eigen::MatrixXd& joint_path, double chi, const Eigen::VectorXd& initial,
                       const Eigen::VectorXd& h_star, std::size_t levels, std::vector<SAStep>* history = nullptr);

// Generates the joint path from the config and runs the recursion.
SATrace sa_iterate(const SAConfig& config);

// Joint path used by sa_iterate.
Eigen::MatrixXd sa_joint_path(const SAConfig& config);

struct SARate {
    double gamma0 = 0.0;
    bool no_rate = false;  // gamma0 <= 0
};

// gamma0 = (chi - 1/alpha) ^ (chi + 2 sigma - 2); alpha = kLightTail uses 1/alpha -> 1/2.
SARate sa_theoretical_rate(double chi, double sigma, double alpha);

// -slope of log2(median error) over `range`, skipping aborted traces.
RateEstimate sa_decay_exponent(std::span<const SATrace> traces, FitRange range);

}  // namespace mslln
