#include "mslln/innovations.hpp"

#include "mslln/error.hpp"
#include "mslln/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace mslln {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double signed_magnitude(double magnitude, std::uint64_t sign_bits) {
    return (sign_bits >> 63) ? -magnitude : magnitude;
}

// Maps two raw 64-bit draws onto one innovation coordinate.
double draw(const InnovationSpec& spec, std::uint64_t a, std::uint64_t b) {
    return std::visit(
        overloaded{
            [&](const PowerLawSymmetric& p) {
                const double u = rng::to_unit(a);
                return signed_magnitude(p.x_min * std::pow(1.0 - u, -1.0 / (p.beta - 1.0)), b);
            },
            [&](const FoldedTSymmetric& f) {
                const double q = 0.5 * (1.0 - rng::to_unit(a));
                const boost::math::students_t_distribution<double> t(f.beta - 1.0);
                const double mag = q >= 0.5 ? 0.0 : boost::math::quantile(boost::math::complement(t, q));
                return signed_magnitude(mag, b);
            },
            [&](const Gaussian& g) {
                const double r = std::sqrt(-2.0 * std::log(1.0 - rng::to_unit(a)));
                return std::sqrt(g.variance) * r * std::cos(2.0 * std::numbers::pi * rng::to_unit(b));
            },
        },
        spec.family());
}

}  // namespace

InnovationSpec::InnovationSpec(Family family) : family_(std::move(family)) {
    std::visit(overloaded{
                   [](const PowerLawSymmetric& p) {
                       if (!(p.x_min > 0.0) || !std::isfinite(p.x_min))
                           throw ValidationError("power law requires x_min > 0");
                       if (!(p.beta > 3.0) || !std::isfinite(p.beta))
                           throw ValidationError("power law requires beta > 3 for a finite variance");
                   },
                   [](const FoldedTSymmetric& f) {
                       if (!(f.beta > 3.0) || !std::isfinite(f.beta))
                           throw ValidationError("folded t requires beta > 3 for a finite variance");
                   },
                   [](const Gaussian& g) {
                       if (!(g.variance > 0.0) || !std::isfinite(g.variance))
                           throw ValidationError("gaussian requires variance > 0");
                   },
               },
               family_);
}

double InnovationSpec::beta() const noexcept {
    return std::visit(overloaded{
                          [](const PowerLawSymmetric& p) { return p.beta; },
                          [](const FoldedTSymmetric& f) { return f.beta; },
                          [](const Gaussian&) { return std::numeric_limits<double>::infinity(); },
                      },
                      family_);
}

std::string InnovationSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](const PowerLawSymmetric& p) { os << "powerlaw(" << p.x_min << "," << p.beta << ")"; },
                   [&](const FoldedTSymmetric& f) { os << "foldedt(" << f.beta << ")"; },
                   [&](const Gaussian& g) { os << "gaussian(" << g.variance << ")"; },
               },
               family_);
    return os.str();
}

const char* to_string(Coupling c) noexcept {
    return c == Coupling::Identical ? "identical" : "independent";
}

Coupling parse_coupling(const std::string& s) {
    if (s == "identical") return Coupling::Identical;
    if (s == "independent") return Coupling::Independent;
    throw ValidationError("unknown coupling '" + s + "'");
}

InnovationStream::InnovationStream(InnovationSpec spec, InnovationSpec spec_bar, Coupling coupling,
                                   std::uint64_t seed, std::int64_t first_index, std::size_t length,
                                   std::size_t dimension)
    : spec_(std::move(spec)),
      spec_bar_(std::move(spec_bar)),
      coupling_(coupling),
      seed_(seed),
      first_(first_index),
      length_(length),
      dim_(dimension) {
    if (length_ == 0) throw ValidationError("innovation stream length must be >= 1");
    if (dim_ == 0) throw ValidationError("innovation dimension must be >= 1");
    if (coupling_ == Coupling::Identical && !(spec_ == spec_bar_))
        throw ValidationError("identical coupling requires equal marginal specs");
}

InnovationStream::InnovationStream(InnovationSpec spec, std::uint64_t seed, std::int64_t first_index,
                                   std::size_t length, std::size_t dimension)
    : InnovationStream(spec, spec, Coupling::Identical, seed, first_index, length, dimension) {}

double InnovationStream::xi(std::int64_t index, std::size_t coord) const {
    const std::uint64_t key = rng::combine(seed_, rng::zigzag(index));
    return draw(spec_, rng::combine(key, 2 * coord), rng::combine(key, 2 * coord + 1));
}

double InnovationStream::xi_bar(std::int64_t index, std::size_t coord) const {
    if (coupling_ == Coupling::Identical) return xi(index, coord);
    const std::uint64_t key = rng::combine(seed_, rng::zigzag(index));
    const std::uint64_t base = 2 * dim_ + 2 * coord;
    return draw(spec_bar_, rng::combine(key, base), rng::combine(key, base + 1));
}

void InnovationStream::fill(std::int64_t first, std::size_t count, std::span<double> xi_out,
                            std::span<double> xi_bar_out) const {
    if (xi_out.size() < count * dim_) throw ValidationError("fill: xi buffer too small");
    const bool want_bar = !xi_bar_out.empty();
    if (want_bar && xi_bar_out.size() < count * dim_) throw ValidationError("fill: xi_bar buffer too small");
    for (std::size_t i = 0; i < count; ++i) {
        const auto index = first + static_cast<std::int64_t>(i);
        for (std::size_t c = 0; c < dim_; ++c) {
            const double v = xi(index, c);
            xi_out[i * dim_ + c] = v;
            if (want_bar)
                xi_bar_out[i * dim_ + c] = coupling_ == Coupling::Identical ? v : xi_bar(index, c);
        }
    }
}

void InnovationStream::fill_coordinate(std::int64_t first, std::size_t coord, std::span<double> xi_out,
                                       std::span<double> xi_bar_out) const {
    if (coord >= dim_) throw ValidationError("fill_coordinate: coordinate out of range");
    const bool want_bar = !xi_bar_out.empty();
    if (want_bar && xi_bar_out.size() != xi_out.size())
        throw ValidationError("fill_coordinate: buffer size mismatch");
    for (std::size_t i = 0; i < xi_out.size(); ++i) {
        const auto index = first + static_cast<std::int64_t>(i);
        const double v = xi(index, coord);
        xi_out[i] = v;
        if (want_bar) xi_bar_out[i] = coupling_ == Coupling::Identical ? v : xi_bar(index, coord);
    }
}

PairSequence sample_pair_sequence(const InnovationStream& stream) {
    PairSequence seq;
    seq.first_index = stream.first_index();
    seq.length = stream.length();
    seq.dimension = stream.dimension();
    seq.xi.resize(seq.length * seq.dimension);
    seq.xi_bar.resize(seq.length * seq.dimension);
    stream.fill(seq.first_index, seq.length, seq.xi, seq.xi_bar);
    return seq;
}

double moment(const InnovationSpec& spec, double r) {
    if (!(r > 0.0)) throw ValidationError("moment order must be positive");
    if (!spec.is_gaussian() && r >= spec.beta() - 1.0)
        throw MomentDoesNotExist("moment does not exist: r >= beta - 1");
    return std::visit(
        overloaded{
            [&](const PowerLawSymmetric& p) {
                return std::pow(p.x_min, r) * (p.beta - 1.0) / (p.beta - 1.0 - r);
            },
            [&](const FoldedTSymmetric& f) {
                const double nu = f.beta - 1.0;
                const double norm = 2.0 * std::exp(std::lgamma(0.5 * f.beta) - std::lgamma(0.5 * nu)) /
                                    std::sqrt(nu * std::numbers::pi);
                // Log domain keeps the far tail finite.
                auto integrand = [&](double x) {
                    if (!(x > 0.0) || !std::isfinite(x)) return 0.0;
                    const double t = x > 1e100 ? 2.0 * std::log(x) - std::log(nu) : std::log1p(x * x / nu);
                    return norm * std::exp(r * std::log(x) - 0.5 * f.beta * t);
                };
                boost::math::quadrature::exp_sinh<double> integrator;
                return integrator.integrate(integrand, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
            },
            [&](const Gaussian& g) {
                return std::pow(g.variance, 0.5 * r) * std::pow(2.0, 0.5 * r) *
                       std::exp(std::lgamma(0.5 * (r + 1.0))) / std::sqrt(std::numbers::pi);
            },
        },
        spec.family());
}

double cross_moment(const InnovationSpec& spec, const InnovationSpec& spec_bar, Coupling coupling) {
    (void)spec_bar;
    // Independent zero-mean marginals have zero cross moment.
    return coupling == Coupling::Identical ? moment(spec, 2.0) : 0.0;
}

double square_survival(const InnovationSpec& spec, double s) {
    if (s <= 0.0) return 1.0;
    return std::visit(overloaded{
                          [&](const PowerLawSymmetric& p) {
                              const double floor = p.x_min * p.x_min;
                              return s < floor ? 1.0 : std::pow(s / floor, -0.5 * (p.beta - 1.0));
                          },
                          [&](const FoldedTSymmetric& f) {
                              const boost::math::students_t_distribution<double> t(f.beta - 1.0);
                              return 2.0 * boost::math::cdf(boost::math::complement(t, std::sqrt(s)));
                          },
                          [&](const Gaussian& g) { return std::erfc(std::sqrt(s / (2.0 * g.variance))); },
                      },
                      spec.family());
}

TailExponent product_tail_alpha(const InnovationSpec& spec, const InnovationSpec& spec_bar,
                                Coupling coupling) {
    TailExponent out;
    if (coupling == Coupling::Identical) {
        // xi * xibar = xi^2 and P(xi^2 > t) ~ t^{-(beta-1)/2} for both heavy families.
        if (spec.is_gaussian()) {
            out.light_tail = true;
            out.alpha = std::numeric_limits<double>::infinity();
        } else {
            out.alpha = 0.5 * (spec.beta() - 1.0);
        }
        return out;
    }
    // Independent factors: the heavier marginal dominates. When both marginal
    // exponents tie the product picks up a log factor, so the bound is reported
    // as conservative.
    const double a = spec.beta() - 1.0;
    const double b = spec_bar.beta() - 1.0;
    if (spec.is_gaussian() && spec_bar.is_gaussian()) {
        out.light_tail = true;
        out.alpha = std::numeric_limits<double>::infinity();
        return out;
    }
    out.alpha = std::min(a, b);
    out.conservative = true;
    return out;
}

double hill_tail_index(std::span<const double> sample, std::size_t k) {
    if (k < 50) throw ValidationError("hill_tail_index: k must be >= 50");
    if (k >= sample.size()) throw ValidationError("hill_tail_index: sample too short for k");
    std::vector<double> v(sample.begin(), sample.end());
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
    const double threshold = v[k];
    if (!(threshold > 0.0)) throw DegenerateError("hill_tail_index: non-positive threshold order statistic");
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(v[i] / threshold);
    const double h = acc / static_cast<double>(k);
    if (!(h > 0.0)) throw DegenerateError("hill_tail_index: no tail variation in sample");
    return 1.0 / h;
}

}  // namespace mslln
