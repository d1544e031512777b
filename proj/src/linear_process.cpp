#include "mslln/linear_process.hpp"

#include "mslln/error.hpp"

#include <string>
#include <vector>

namespace mslln {

InnovationStream make_path_stream(const InnovationSpec& spec, const InnovationSpec& spec_bar,
                                  Coupling coupling, std::uint64_t seed, std::size_t n,
                                  std::size_t half_width, std::size_t dimension) {
    const auto L = static_cast<std::int64_t>(half_width);
    return InnovationStream(spec, spec_bar, coupling, seed, 1 - L, n + 2 * half_width, dimension);
}

Eigen::MatrixXd generate_path(const CoefficientSpec& coef, const InnovationStream& stream, bool bar,
                              std::size_t n, std::size_t half_width, ConvolutionStrategy strategy) {
    if (n == 0) throw ValidationError("path length must be >= 1");
    if (static_cast<std::size_t>(coef.cols()) != stream.dimension())
        throw ValidationError("kernel column count does not match innovation dimension");
    const auto L = static_cast<std::int64_t>(half_width);
    const auto last = static_cast<std::int64_t>(n) + L;
    if (!stream.covers(1 - L, last))
        throw ValidationError("innovation stream shorter than n + 2L (needs indices " + std::to_string(1 - L) +
                              ".." + std::to_string(last) + ")");

    const std::vector<double> taps = envelope_table(coef, half_width);
    const std::size_t m = stream.dimension();
    Eigen::MatrixXd y(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
    std::vector<double> signal(n + 2 * half_width);
    for (std::size_t c = 0; c < m; ++c) {
        if (bar)
            for (std::size_t i = 0; i < signal.size(); ++i)
                signal[i] = stream.xi_bar(1 - L + static_cast<std::int64_t>(i), c);
        else
            stream.fill_coordinate(1 - L, c, signal, {});
        const std::vector<double> col = convolve_window(taps, signal, strategy);
        for (std::size_t k = 0; k < n; ++k) y(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(c)) = col[k];
    }
    if (coef.is_scalar() && coef.direction()(0, 0) == 1.0) return y;
    return y * coef.direction().transpose();
}

PairPaths generate_pair_paths(const PathConfig& config, ConvolutionStrategy strategy) {
    PairPaths out;
    out.x = generate_path(config.coef, config.stream, false, config.n, config.half_width, strategy);
    const bool same_kernel = config.coef.sigma() == config.coef_bar.sigma() &&
                             config.coef.sidedness() == config.coef_bar.sidedness() &&
                             config.coef.scale() == config.coef_bar.scale() &&
                             config.coef.direction() == config.coef_bar.direction();
    if (config.stream.coupling() == Coupling::Identical && same_kernel)
        out.x_bar = out.x;
    else
        out.x_bar = generate_path(config.coef_bar, config.stream, true, config.n, config.half_width, strategy);
    return out;
}

LaggedPair generate_lagged_pair(const CoefficientSpec& coef, const InnovationStream& stream, std::size_t n,
                                std::size_t lag, std::size_t half_width, ConvolutionStrategy strategy) {
    if (coef.sidedness() != Sidedness::OneSidedCausal)
        throw ValidationError("lagged pairs require a causal kernel");
    const Eigen::MatrixXd full = generate_path(coef, stream, false, n + lag, half_width, strategy);
    const auto rows = static_cast<Eigen::Index>(n);
    LaggedPair out;
    out.x = full.topRows(rows);
    out.shifted = full.middleRows(static_cast<Eigen::Index>(lag), rows);
    return out;
}

}  // namespace mslln
