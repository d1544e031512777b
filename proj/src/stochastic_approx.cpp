#include "mslln/stochastic_approx.hpp"

#include "mslln/error.hpp"
#include "mslln/linear_process.hpp"
#include "mslln/partial_sums.hpp"

#include <cmath>
#include <limits>

namespace mslln {

void SAConfig::validate() const {
    if (!(chi > 0.5 && chi <= 1.0)) throw ValidationError("sa: chi must lie in (1/2, 1]");
    if (joint_kernel.rows() < 2) throw ValidationError("sa: joint kernel needs d + 1 >= 2 rows");
    if (initial.size() != 0 && static_cast<std::size_t>(initial.size()) != dimension())
        throw ValidationError("sa: initial iterate has the wrong dimension");
    if (levels >= 40) throw ValidationError("sa: horizon levels out of range");
}

SATarget sa_target(const CoefficientSpec& joint_kernel, const Eigen::MatrixXd& cross_moment, std::size_t half_width) {
    const Eigen::Index d = joint_kernel.rows() - 1;
    if (d < 1) throw ValidationError("sa_target: joint kernel needs d + 1 >= 2 rows");
    const AnalyticMean mean = analytic_mean(joint_kernel, joint_kernel, cross_moment, half_width);
    SATarget t;
    t.a = mean.value.topLeftCorner(d, d);
    t.b = mean.value.topRightCorner(d, 1);
    const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(t.a).singularValues();
    const double smin = sv(sv.size() - 1);
    t.condition = smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
    if (!(t.condition <= kMaxConditionNumber))
        throw IllPosedTarget("ill-posed target: condition number of A is " + std::to_string(t.condition));
    t.h_star = t.a.colPivHouseholderQr().solve(t.b);
    return t;
}

SATrace sa_run_on_path(const Eigen::MatrixXd& joint_path, double chi, const Eigen::VectorXd& initial,
                       const Eigen::VectorXd& h_star, std::size_t levels, std::vector<SAStep>* history) {
    const Eigen::Index d = joint_path.cols() - 1;
    const std::size_t horizon = std::size_t{1} << levels;
    if (joint_path.rows() < static_cast<Eigen::Index>(horizon - 1))
        throw ValidationError("sa: joint path shorter than the horizon");
    if (h_star.size() != d) throw ValidationError("sa: target dimension mismatch");

    SATrace trace;
    Eigen::VectorXd h = initial.size() == 0 ? Eigen::VectorXd::Zero(d) : initial;
    Eigen::VectorXd step(d);
    std::size_t next = 1;
    for (std::size_t k = 1;; ++k) {
        // h currently holds h_k.
        if (k == next) {
            trace.checkpoints.push_back(k);
            trace.errors.push_back((h - h_star).norm());
            if (k == horizon) break;
            next <<= 1;
        }
        const auto row = joint_path.row(static_cast<Eigen::Index>(k - 1));
        const Eigen::VectorXd z = row.head(d).transpose();
        const double y = row(d);
        const double gain = std::pow(static_cast<double>(k), -chi);
        // b_k - A_k h_k = z (y - z^T h_k)
        step = z * (y - z.dot(h));
        if (history) history->push_back({h, h + gain * step, gain});
        h += gain * step;
        if (!(h.norm() <= kDivergenceThreshold)) {
            trace.aborted = true;
            trace.abort_step = k;
            break;
        }
    }
    trace.final_iterate = h;

    trace.decay_exponent = std::numeric_limits<double>::quiet_NaN();
    if (!trace.aborted && trace.errors.size() >= 5) {
        std::vector<double> rs, ys;
        bool ok = true;
        for (std::size_t r = trace.errors.size() - 5; r < trace.errors.size(); ++r) {
            if (!(trace.errors[r] > 0.0)) ok = false;
            rs.push_back(static_cast<double>(r));
            ys.push_back(std::log2(trace.errors[r]));
        }
        if (ok) trace.decay_exponent = -fit_line(rs, ys).slope;
    }
    return trace;
}

Eigen::MatrixXd sa_joint_path(const SAConfig& config) {
    config.validate();
    const std::size_t n = std::size_t{1} << config.levels;
    const auto stream = make_path_stream(config.innovation, config.innovation, Coupling::Identical, config.seed, n,
                                         config.half_width, static_cast<std::size_t>(config.joint_kernel.cols()));
    return generate_path(config.joint_kernel, stream, false, n, config.half_width);
}

SATrace sa_iterate(const SAConfig& config) {
    config.validate();
    const auto m = config.joint_kernel.cols();
    const Eigen::MatrixXd sigma = cross_moment(config.innovation, config.innovation, Coupling::Identical) *
                                  Eigen::MatrixXd::Identity(m, m);
    const SATarget target = sa_target(config.joint_kernel, sigma, config.half_width);
    return sa_run_on_path(sa_joint_path(config), config.chi, config.initial, target.h_star, config.levels);
}

SARate sa_theoretical_rate(double chi, double sigma, double alpha) {
    if (!(chi > 0.5 && chi <= 1.0)) throw ValidationError("sa_theoretical_rate: chi must lie in (1/2, 1]");
    if (!(sigma > 0.5 && sigma <= 1.0)) throw ValidationError("sa_theoretical_rate: sigma must lie in (1/2, 1]");
    if (!(alpha > 1.0)) throw ValidationError("sa_theoretical_rate: alpha must exceed 1");
    const double inv_alpha = std::isinf(alpha) ? 0.5 : 1.0 / alpha;
    SARate out;
    out.gamma0 = std::min(chi - inv_alpha, chi + 2.0 * sigma - 2.0);
    out.no_rate = out.gamma0 <= 0.0;
    return out;
}

RateEstimate sa_decay_exponent(std::span<const SATrace> traces, FitRange range) {
    std::vector<const SATrace*> usable;
    for (const auto& t : traces)
        if (!t.aborted) usable.push_back(&t);
    if (usable.empty()) throw DegenerateError("sa_decay_exponent: every replication aborted");
    if (range.hi < range.lo || range.levels() < 2) throw ValidationError("sa_decay_exponent: bad fit range");
    for (const auto* t : usable)
        if (t->errors.size() <= range.hi) throw ValidationError("sa_decay_exponent: fit range beyond trace");

    std::vector<double> rs, ys, errs(usable.size());
    for (std::size_t r = range.lo; r <= range.hi; ++r) {
        for (std::size_t i = 0; i < usable.size(); ++i) errs[i] = usable[i]->errors[r];
        const double med = median(errs);
        if (!(med > 0.0)) throw DegenerateError("sa_decay_exponent: median error vanishes");
        rs.push_back(static_cast<double>(r));
        ys.push_back(std::log2(med));
    }
    const LineFit fit = fit_line(rs, ys);
    RateEstimate out;
    out.slope = -fit.slope;
    out.standard_error = fit.standard_error;
    out.range = range;
    out.replications = usable.size();
    return out;
}

}  // namespace mslln
