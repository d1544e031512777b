#pragma once

// I.i.d. zero-mean innovation pairs (xi_l, xibar_l) and their moment/tail
// oracles.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mslln {

// Sign-symmetrized power law: |xi| has density
//   (beta - 1)/x_min * (x/x_min)^(-beta),  x >= x_min.
struct PowerLawSymmetric {
    double x_min = 1.0;
    double beta = 5.0;
    friend bool operator==(const PowerLawSymmetric&, const PowerLawSymmetric&) = default;
};

// Sign-symmetrized folded Student-t: |xi| ~ |t_{beta-1}|.
struct FoldedTSymmetric {
    double beta = 5.0;
    friend bool operator==(const FoldedTSymmetric&, const FoldedTSymmetric&) = default;
};

struct Gaussian {
    double variance = 1.0;
    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

class InnovationSpec {
public:
    using Family = std::variant<PowerLawSymmetric, FoldedTSymmetric, Gaussian>;

    // Throws ValidationError unless beta > 3 (finite variance), x_min > 0,
    // variance > 0.
    explicit InnovationSpec(Family family);

    static InnovationSpec power_law(double x_min, double beta) {
        return InnovationSpec(PowerLawSymmetric{x_min, beta});
    }
    static InnovationSpec folded_t(double beta) { return InnovationSpec(FoldedTSymmetric{beta}); }
    static InnovationSpec gaussian(double variance = 1.0) {
        return InnovationSpec(Gaussian{variance});
    }

    const Family& family() const noexcept { return family_; }
    bool is_gaussian() const noexcept { return std::holds_alternative<Gaussian>(family_); }
    // beta of the heavy families; +inf for Gaussian.
    double beta() const noexcept;
    std::string describe() const;

    friend bool operator==(const InnovationSpec&, const InnovationSpec&) = default;

private:
    Family family_;
};

enum class Coupling {
    Identical,    // xibar_l = xi_l
    Independent,  // xibar_l drawn independently of xi_l
};

const char* to_string(Coupling c) noexcept;
Coupling parse_coupling(const std::string& s);

// Random-access innovation source. Values are a pure function of
// (specs, coupling, seed, index, coordinate); the stream nominally covers the
// index range [first_index, first_index + length).
class InnovationStream {
public:
    InnovationStream(InnovationSpec spec, InnovationSpec spec_bar, Coupling coupling,
                     std::uint64_t seed, std::int64_t first_index, std::size_t length,
                     std::size_t dimension = 1);

    // Identical coupling shorthand.
    InnovationStream(InnovationSpec spec, std::uint64_t seed, std::int64_t first_index,
                     std::size_t length, std::size_t dimension = 1);

    const InnovationSpec& spec() const noexcept { return spec_; }
    const InnovationSpec& spec_bar() const noexcept { return spec_bar_; }
    Coupling coupling() const noexcept { return coupling_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::int64_t first_index() const noexcept { return first_; }
    std::int64_t end_index() const noexcept { return first_ + static_cast<std::int64_t>(length_); }
    std::size_t length() const noexcept { return length_; }
    std::size_t dimension() const noexcept { return dim_; }

    bool covers(std::int64_t lo, std::int64_t hi_inclusive) const noexcept {
        return lo >= first_ && hi_inclusive < end_index();
    }

    double xi(std::int64_t index, std::size_t coord = 0) const;
    double xi_bar(std::int64_t index, std::size_t coord = 0) const;

    // Row-major fill of `count` consecutive indices starting at `first`
    // (count * dimension values each). xi_bar may be empty to skip it.
    void fill(std::int64_t first, std::size_t count, std::span<double> xi,
              std::span<double> xi_bar) const;

    // Single coordinate over consecutive indices.
    void fill_coordinate(std::int64_t first, std::size_t coord, std::span<double> xi,
                         std::span<double> xi_bar) const;

private:
    InnovationSpec spec_;
    InnovationSpec spec_bar_;
    Coupling coupling_;
    std::uint64_t seed_;
    std::int64_t first_;
    std::size_t length_;
    std::size_t dim_;
};

// Materialized innovations over the whole stream range, row-major
// (length x dimension).
struct PairSequence {
    std::int64_t first_index = 0;
    std::size_t length = 0;
    std::size_t dimension = 1;
    std::vector<double> xi;
    std::vector<double> xi_bar;

    double at(std::int64_t index, std::size_t coord = 0) const {
        return xi[static_cast<std::size_t>(index - first_index) * dimension + coord];
    }
    double bar_at(std::int64_t index, std::size_t coord = 0) const {
        return xi_bar[static_cast<std::size_t>(index - first_index) * dimension + coord];
    }
};

PairSequence sample_pair_sequence(const InnovationStream& stream);

// E|xi|^r. Throws MomentDoesNotExist for r >= beta - 1 (heavy families).
double moment(const InnovationSpec& spec, double r);

// E[xi * xibar] for one coordinate (the cross-moment matrix is this times I).
double cross_moment(const InnovationSpec& spec, const InnovationSpec& spec_bar,
                    Coupling coupling);

// P(xi^2 > s).
double square_survival(const InnovationSpec& spec, double s);

struct TailExponent {
    double alpha = 0.0;        // meaningful unless light_tail
    bool light_tail = false;   // every moment of |xi xibar| is finite
    bool conservative = false; // lower bound on the true exponent
};

// Largest alpha with sup_t t^alpha P(|xi xibar| > t) < inf.
TailExponent product_tail_alpha(const InnovationSpec& spec, const InnovationSpec& spec_bar,
                                Coupling coupling);

// Hill estimator of the tail index over the top-k order statistics.
// Requires 50 <= k < sample.size(); throws DegenerateError when the top of the
// sample carries no spread.
double hill_tail_index(std::span<const double> sample, std::size_t k);

}  // namespace mslln
