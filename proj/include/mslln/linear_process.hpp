#pragma once

// Finite paths of the truncated linear processes
//   X_k    = sum_{|j| <= L} C_j    Xi_{k-j},
//   Xbar_k = sum_{|j| <= L} Cbar_j Xibar_{k-j},     k = 1..n.

#include "mslln/coefficients.hpp"
#include "mslln/convolution.hpp"
#include "mslln/innovations.hpp"

#include <Eigen/Dense>

#include <cstddef>

namespace mslln {

struct PathConfig {
    CoefficientSpec coef;
    CoefficientSpec coef_bar;
    InnovationStream stream;  // must cover [1 - L, n + L]
    std::size_t n = 0;
    std::size_t half_width = 0;
};

// Stream covering exactly the innovations a path of length n with half-width L
// consumes.
InnovationStream make_path_stream(const InnovationSpec& spec, const InnovationSpec& spec_bar,
                                  Coupling coupling, std::uint64_t seed, std::size_t n,
                                  std::size_t half_width, std::size_t dimension = 1);

// Row k-1 holds X_k (resp. Xbar_k).
struct PairPaths {
    Eigen::MatrixXd x;
    Eigen::MatrixXd x_bar;
};

PairPaths generate_pair_paths(const PathConfig& config,
                              ConvolutionStrategy strategy = ConvolutionStrategy::Auto);

// One path only; `bar` selects (coef_bar, xibar) instead of (coef, xi).
Eigen::MatrixXd generate_path(const CoefficientSpec& coef, const InnovationStream& stream, bool bar,
                              std::size_t n, std::size_t half_width,
                              ConvolutionStrategy strategy = ConvolutionStrategy::Auto);

struct LaggedPair {
    Eigen::MatrixXd x;        // X_1 .. X_n
    Eigen::MatrixXd shifted;  // X_{1+h} .. X_{n+h}
};

// Requires a causal kernel and a stream covering [1 - L, n + h + L].
LaggedPair generate_lagged_pair(const CoefficientSpec& coef, const InnovationStream& stream,
                                std::size_t n, std::size_t lag, std::size_t half_width,
                                ConvolutionStrategy strategy = ConvolutionStrategy::Auto);

}  // namespace mslln
