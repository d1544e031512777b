#include "mslln/harness.hpp"

#include "mslln/error.hpp"
#include "mslln/linear_process.hpp"
#include "mslln/rng.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <bit>
#include <limits>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#ifndef MSLLN_VERSION
#define MSLLN_VERSION "0.0.0"
#endif

namespace mslln {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

std::string format_cell(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, double>) {
                if (std::isnan(v)) return "nan";
                if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
                char buf[40];
                std::snprintf(buf, sizeof buf, "%.17g", v);
                return buf;
            } else {
                return std::to_string(v);
            }
        },
        c);
}

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t) {
    ojson arr = ojson::array();
    for (const auto& row : t.rows) {
        ojson obj = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v)) obj[t.header[i]] = v;
                        else obj[t.header[i]] = format_cell(v);
                    } else {
                        obj[t.header[i]] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(1) + "\n";
}

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Table read_table(const std::string& path) {
    const std::string text = read_file(path);
    Table t;
    if (fs::path(path).extension() == ".json") {
        ojson arr;
        try {
            arr = ojson::parse(text);
        } catch (const std::exception& e) {
            throw IoError("malformed JSON table '" + path + "': " + e.what());
        }
        for (const auto& obj : arr) {
            if (t.header.empty())
                for (const auto& [k, v] : obj.items()) t.header.push_back(k);
            std::vector<Cell> row;
            for (const auto& key : t.header) {
                const auto& v = obj.at(key);
                if (v.is_string()) row.emplace_back(v.get<std::string>());
                else if (v.is_number_float()) row.emplace_back(format_cell(v.get<double>()));
                else row.emplace_back(v.dump());
            }
            t.rows.push_back(std::move(row));
        }
        return t;
    }
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty table '" + path + "'");
    t.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != t.header.size()) throw IoError("ragged row in '" + path + "'");
        std::vector<Cell> row(cells.begin(), cells.end());
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::string sha256_hex(const std::string& bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 15]);
    }
    return out;
}

void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, count));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

double point_alpha(const GridPoint& p) {
    const TailExponent t = product_tail_alpha(p.innovation(), p.innovation_bar(), p.coupling_mode());
    return t.light_tail ? kLightTail : t.alpha;
}

namespace {

CoefficientSpec point_coef(const GridPoint& p, bool bar, std::size_t L) {
    return CoefficientSpec(bar ? p.sigma_bar : p.sigma, p.sidedness_mode(), p.scale, Eigen::MatrixXd::Identity(1, 1),
                           L);
}

PathConfig point_path(const GridPoint& p, std::size_t n, std::size_t L, std::uint64_t seed) {
    return PathConfig{point_coef(p, false, L), point_coef(p, true, L),
                      make_path_stream(p.innovation(), p.innovation_bar(), p.coupling_mode(), seed, n, L), n, L};
}

// x_1 .. x_{n+extra} of a scalar process with identical marginals.
std::vector<double> scalar_path(const GridPoint& p, std::size_t length, std::size_t L, std::uint64_t seed) {
    const CoefficientSpec coef = point_coef(p, false, L);
    const auto stream = make_path_stream(p.innovation(), p.innovation(), Coupling::Identical, seed, length, L);
    const Eigen::MatrixXd x = generate_path(coef, stream, false, length, L);
    return std::vector<double>(x.data(), x.data() + x.rows());
}

}  // namespace

PartialSumLedger rates_replication(const GridPoint& p, std::size_t levels, std::size_t L, std::uint64_t seed) {
    const std::size_t n = std::size_t{1} << levels;
    const PathConfig cfg = point_path(p, n, L, seed);
    const PairPaths paths = generate_pair_paths(cfg);
    const AnalyticMean mean = analytic_mean(cfg.coef, cfg.coef_bar, innovation_cross_moment(cfg.stream), L);
    return centered_ledger(outer_series(paths.x, paths.x_bar), mean, levels);
}

PartialSumLedger appell_replication(const GridPoint& p, std::size_t levels, std::size_t L, std::uint64_t seed) {
    const std::size_t n = std::size_t{1} << levels;
    const std::vector<double> x = scalar_path(p, n, L, seed);
    const double mu2 = coefficient_inner(point_coef(p, false, L), point_coef(p, false, L), 0, L).value *
                       moment(p.innovation(), 2.0);
    return appell2_sums(x, mu2, levels);
}

AutocovResult autocov_replication(const GridPoint& p, std::size_t levels, std::size_t L, std::uint64_t seed) {
    const std::size_t n = std::size_t{1} << levels;
    const std::vector<double> x = scalar_path(p, n + p.lag, L, seed);
    const double gamma = population_autocov(point_coef(p, false, L), moment(p.innovation(), 2.0), p.lag, L);
    return autocov_pair(x, n, static_cast<std::int64_t>(p.lag), gamma);
}

CoefficientSpec sa_joint_kernel(const GridPoint& p, std::size_t dimension, std::size_t L) {
    const auto m = static_cast<Eigen::Index>(dimension + 1);
    Eigen::MatrixXd dir = Eigen::MatrixXd::Identity(m, m);
    for (Eigen::Index j = 0; j + 1 < m; ++j) dir(m - 1, j) = 1.0 / static_cast<double>(j + 2);
    return CoefficientSpec(p.sigma, p.sidedness_mode(), p.scale, dir, L);
}

SATrace sa_replication(const GridPoint& p, std::size_t levels, std::size_t L, std::size_t dimension,
                       std::uint64_t seed) {
    SAConfig cfg{p.chi, sa_joint_kernel(p, dimension, L), p.innovation(), {}, levels, L, seed};
    return sa_iterate(cfg);
}

double reconstruction_error(double pieces_sum, double reference, double scale) {
    const double diff = std::abs(pieces_sum - reference);
    if (diff == 0.0) return 0.0;
    return scale > 0.0 ? diff / scale : std::numeric_limits<double>::infinity();
}

double kurtosis_growth(const std::vector<double>& v) {
    const std::size_t levels = v.empty() ? 0 : static_cast<std::size_t>(std::bit_width(v.size())) - 1;
    if (levels < 5) return std::numeric_limits<double>::quiet_NaN();
    const std::size_t lo = levels >= 11 ? levels - 7 : 4;
    std::vector<double> rs, ys;
    double m2 = 0.0, m4 = 0.0;
    std::size_t next = 1, r = 0;
    for (std::size_t k = 0; k < (std::size_t{1} << levels); ++k) {
        const double s = v[k] * v[k];
        m2 += s;
        m4 += s * s;
        if (k + 1 == next) {
            if (r >= lo && m2 > 0.0) {
                const double cnt = static_cast<double>(next);
                rs.push_back(static_cast<double>(r));
                ys.push_back(std::log2((m4 / cnt) / ((m2 / cnt) * (m2 / cnt))));
            }
            next <<= 1;
            ++r;
        }
    }
    if (rs.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_line(rs, ys).slope;
}

DecomposeReplication decompose_replication(const GridPoint& p, std::size_t levels, std::size_t L, std::size_t hill_k,
                                           std::uint64_t seed) {
    const std::size_t n = std::size_t{1} << levels;
    const PathConfig cfg = point_path(p, n, L, seed);
    DecomposeReplication out;
    out.pieces = decompose(cfg, p.nu);
    const PairPaths paths = generate_pair_paths(cfg);
    out.reference.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        out.reference[k] = paths.x(static_cast<Eigen::Index>(k), 0) * paths.x_bar(static_cast<Eigen::Index>(k), 0) -
                           out.pieces.centering;

    const std::vector<double> total = out.pieces.total();
    double sum = 0.0, ref = 0.0, abs_d = 0.0;
    std::size_t next = 1;
    for (std::size_t k = 0; k < n; ++k) {
        sum += total[k];
        ref += out.reference[k];
        abs_d += std::abs(out.reference[k] + out.pieces.centering);
        if (k + 1 == next) {
            const double scale = abs_d + static_cast<double>(next) * std::abs(out.pieces.centering);
            out.max_rel_error = std::max(out.max_rel_error, reconstruction_error(sum, ref, scale));
            next <<= 1;
        }
    }

    const auto& diag = out.pieces.piece(Piece::Diagonal);
    out.hill_k = hill_k != 0 ? hill_k : std::max<std::size_t>(50, n / 100);
    out.hill_diagonal = std::numeric_limits<double>::quiet_NaN();
    if (out.hill_k < n) {
        std::vector<double> mags(n);
        for (std::size_t k = 0; k < n; ++k) mags[k] = std::abs(diag[k]);
        out.hill_diagonal = hill_tail_index(mags, out.hill_k);
    }
    out.kurtosis_growth_diagonal = kurtosis_growth(diag);
    out.kurtosis_growth_in_window = kurtosis_growth(out.pieces.piece(Piece::InWindowOffDiag));
    return out;
}

namespace {

struct Writer {
    fs::path dir;
    std::string format;
    std::vector<ManifestEntry> files;

    void write(const std::string& stem, const Table& t) {
        const std::string name = stem + "." + format;
        const std::string body = format == "json" ? to_json(t) : to_csv(t);
        std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write '" + (dir / name).string() + "'");
        out << body;
        out.close();
        if (!out) throw IoError("write failed for '" + (dir / name).string() + "'");
        files.push_back({name, sha256_hex(body), t.rows.size()});
    }
};

using I = std::int64_t;
using U = std::uint64_t;

FitRange rate_range(const ExperimentConfig& c) {
    if (c.fit_lo >= 0) return {static_cast<std::size_t>(c.fit_lo), static_cast<std::size_t>(c.fit_hi)};
    return default_fit_range(c.levels);
}

Cell alpha_cell(double alpha) { return std::isinf(alpha) ? Cell{std::string("inf")} : Cell{alpha}; }

// Tasks are laid out point-major: task = point * reps + rep.
template <class Result, class Fn>
std::vector<std::vector<Result>> run_tasks(const ExperimentConfig& c, std::vector<std::string>& point_errors, Fn fn) {
    const std::size_t reps = c.replications;
    const std::size_t total = c.grid.size() * reps;
    std::vector<std::vector<Result>> results(c.grid.size(), std::vector<Result>(reps));
    std::vector<std::string> task_errors(total);
    std::vector<std::atomic<bool>> failed(c.grid.size());
    parallel_for(total, c.jobs, [&](std::size_t task) {
        const std::size_t point = task / reps, rep = task % reps;
        if (failed[point].load()) return;
        try {
            results[point][rep] = fn(c.grid[point], rng::replication_seed(c.base_seed, point, rep));
        } catch (const std::exception& e) {
            task_errors[task] = e.what();
            failed[point] = true;
        }
    });
    // The first failing replication (in task order) names the point's error.
    for (std::size_t point = 0; point < c.grid.size(); ++point)
        for (std::size_t rep = 0; rep < reps && point_errors[point].empty(); ++rep) {
            const auto& msg = task_errors[point * reps + rep];
            if (!msg.empty()) point_errors[point] = "replication " + std::to_string(rep) + ": " + msg;
        }
    return results;
}

template <class Fn>
void per_point(const ExperimentConfig& c, std::vector<std::string>& errors, Fn fn) {
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
        if (!errors[i].empty()) continue;
        try {
            fn(i);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    }
}

void ledger_rows(Table& t, std::size_t rep, const PartialSumLedger& l) {
    for (std::size_t r = 0; r <= l.levels; ++r)
        t.rows.push_back({U{rep}, U{r}, U{l.checkpoints[r]}, l.sum_norm(r), l.block_max[r]});
}

void rate_tables(const ExperimentConfig& c, Writer& w, std::vector<std::string>& errors, bool appell) {
    const std::size_t L = c.effective_half_width();
    auto results = run_tasks<PartialSumLedger>(c, errors, [&](const GridPoint& p, std::uint64_t seed) {
        return appell ? appell_replication(p, c.levels, L, seed) : rates_replication(p, c.levels, L, seed);
    });
    Table summary{{"point", "sigma", "sigma_bar", "alpha", "regime", "e_star", "e_hat", "stderr", "r_lo", "r_hi",
                   "reps", "n_max", "seed", "underpowered"},
                  {}};
    per_point(c, errors, [&](std::size_t i) {
        const GridPoint& p = c.grid[i];
        const double alpha = point_alpha(p);
        const double sigma_bar = appell ? p.sigma : p.sigma_bar;
        const TheoreticalRate th = theoretical_exponent(p.sigma, sigma_bar, alpha);
        const RateEstimate est = empirical_exponent(results[i], rate_range(c), {c.min_replications, 4}, false);
        summary.rows.push_back({U{i}, p.sigma, sigma_bar, alpha_cell(alpha), std::string(to_string(th.regime)),
                                th.exponent, est.slope, est.standard_error, U{est.range.lo}, U{est.range.hi},
                                U{c.replications}, U{std::size_t{1} << c.levels}, U{c.base_seed},
                                I{est.underpowered ? 1 : 0}});
        Table ledger{{"replication", "r", "n_r", "S_norm", "M_r"}, {}};
        for (std::size_t rep = 0; rep < results[i].size(); ++rep) ledger_rows(ledger, rep, results[i][rep]);
        w.write((appell ? "appell_ledger_p" : "ledger_p") + std::to_string(i), ledger);
    });
    w.write(appell ? "appell" : "rates", summary);
}

void decompose_tables(const ExperimentConfig& c, Writer& w, std::vector<std::string>& errors) {
    const std::size_t L = c.effective_half_width();
    struct Slim {
        std::vector<std::vector<Cell>> rows;
        std::vector<Cell> summary;
    };
    auto results = run_tasks<Slim>(c, errors, [&](const GridPoint& p, std::uint64_t seed) {
        const DecomposeReplication d = decompose_replication(p, c.levels, L, c.hill_k, seed);
        Slim s;
        std::array<double, kPieceCount> cum{};
        double total = 0.0, ref = 0.0, abs_d = 0.0;
        std::size_t next = 1, r = 0;
        for (std::size_t k = 0; k < d.reference.size(); ++k) {
            for (std::size_t j = 0; j < kPieceCount; ++j) {
                cum[j] += d.pieces.pieces[j][k];
                total += d.pieces.pieces[j][k];
            }
            ref += d.reference[k];
            abs_d += std::abs(d.reference[k] + d.pieces.centering);
            if (k + 1 == next) {
                std::vector<Cell> row{U{0}, U{r}, U{next}};
                for (double v : cum) row.emplace_back(v);
                const double scale = abs_d + static_cast<double>(next) * std::abs(d.pieces.centering);
                row.emplace_back(total);
                row.emplace_back(ref);
                row.emplace_back(reconstruction_error(total, ref, scale));
                s.rows.push_back(std::move(row));
                next <<= 1;
                ++r;
            }
        }
        s.summary = {d.pieces.nu, U{d.pieces.window}, U{d.pieces.half_width}, d.pieces.centering, d.max_rel_error,
                     d.hill_diagonal, U{d.hill_k}, d.kurtosis_growth_diagonal, d.kurtosis_growth_in_window};
        return s;
    });
    Table summary{{"point", "replication", "sigma", "sigma_bar", "nu", "window", "half_width", "centering",
                   "max_rel_error", "hill_diagonal", "hill_k", "kurtosis_growth_diagonal",
                   "kurtosis_growth_in_window", "seed"},
                  {}};
    per_point(c, errors, [&](std::size_t i) {
        Table pieces{{"replication", "r", "n_r"}, {}};
        for (std::size_t j = 0; j < kPieceCount; ++j) pieces.header.emplace_back(piece_name(static_cast<Piece>(j)));
        for (const char* h : {"sum_of_pieces", "reference", "rel_error"}) pieces.header.emplace_back(h);
        for (std::size_t rep = 0; rep < results[i].size(); ++rep) {
            for (auto row : results[i][rep].rows) {
                row[0] = U{rep};
                pieces.rows.push_back(std::move(row));
            }
            std::vector<Cell> row{U{i}, U{rep}, c.grid[i].sigma, c.grid[i].sigma_bar};
            for (const auto& cell : results[i][rep].summary) row.push_back(cell);
            row.emplace_back(U{c.base_seed});
            summary.rows.push_back(std::move(row));
        }
        w.write("pieces_p" + std::to_string(i), pieces);
    });
    w.write("decompose", summary);
}

void sa_tables(const ExperimentConfig& c, Writer& w, std::vector<std::string>& errors) {
    const std::size_t L = c.effective_half_width();
    auto results = run_tasks<SATrace>(c, errors, [&](const GridPoint& p, std::uint64_t seed) {
        return sa_replication(p, c.levels, L, c.sa_dimension, seed);
    });
    Table summary{{"point", "chi", "sigma", "alpha", "gamma0", "gamma_hat", "stderr", "r_lo", "r_hi", "reps",
                   "n_max", "aborted_count", "no_rate", "seed"},
                  {}};
    per_point(c, errors, [&](std::size_t i) {
        const GridPoint& p = c.grid[i];
        const double alpha = point_alpha(p);
        const SARate th = sa_theoretical_rate(p.chi, p.sigma, alpha);
        const FitRange range{c.levels >= 4 ? c.levels - 4 : 0, c.levels};
        const RateEstimate est = sa_decay_exponent(results[i], range);
        std::size_t aborted = 0;
        Table trace{{"replication", "r", "n_r", "error"}, {}};
        for (std::size_t rep = 0; rep < results[i].size(); ++rep) {
            const SATrace& t = results[i][rep];
            aborted += t.aborted ? 1 : 0;
            for (std::size_t r = 0; r < t.errors.size(); ++r)
                trace.rows.push_back({U{rep}, U{r}, U{t.checkpoints[r]}, t.errors[r]});
        }
        summary.rows.push_back({U{i}, p.chi, p.sigma, alpha_cell(alpha), th.gamma0, est.slope, est.standard_error,
                                U{range.lo}, U{range.hi}, U{c.replications}, U{std::size_t{1} << c.levels},
                                U{aborted}, I{th.no_rate ? 1 : 0}, U{c.base_seed}});
        w.write("sa_trace_p" + std::to_string(i), trace);
    });
    w.write("sa", summary);
}

void autocov_tables(const ExperimentConfig& c, Writer& w, std::vector<std::string>& errors) {
    const std::size_t L = c.effective_half_width();
    auto results = run_tasks<AutocovResult>(c, errors, [&](const GridPoint& p, std::uint64_t seed) {
        return autocov_replication(p, c.levels, L, seed);
    });
    Table t{{"point", "sigma", "alpha", "lag", "p", "p_star", "admissible", "gamma", "r", "n_r",
             "median_abs_deviation", "reps", "seed"},
            {}};
    per_point(c, errors, [&](std::size_t i) {
        const GridPoint& p = c.grid[i];
        const double alpha = point_alpha(p);
        const double p_star = theoretical_exponent(p.sigma, p.sigma, alpha).p_star;
        const auto& reps = results[i];
        for (std::size_t r = 0; r < reps.front().checkpoints.size(); ++r) {
            std::vector<double> devs;
            NormalizedDeviation nd;
            for (const auto& res : reps) {
                nd = normalized_deviation(res.checkpoints[r], p.p, res.gamma_hat_at[r], res.gamma, p_star);
                devs.push_back(std::abs(nd.value));
            }
            t.rows.push_back({U{i}, p.sigma, alpha_cell(alpha), U{p.lag}, p.p, p_star, I{nd.admissible ? 1 : 0},
                              reps.front().gamma, U{r}, U{reps.front().checkpoints[r]}, median(devs),
                              U{c.replications}, U{c.base_seed}});
        }
    });
    w.write("autocov", t);
}

void simulate_tables(const ExperimentConfig& c, Writer& w, std::vector<std::string>& errors) {
    const std::size_t L = c.effective_half_width();
    const std::size_t n = std::size_t{1} << c.levels;
    auto results = run_tasks<PairPaths>(c, errors, [&](const GridPoint& p, std::uint64_t seed) {
        return generate_pair_paths(point_path(p, n, L, seed));
    });
    per_point(c, errors, [&](std::size_t i) {
        Table t{{"replication", "k", "x", "x_bar"}, {}};
        for (std::size_t rep = 0; rep < results[i].size(); ++rep) {
            const auto& pp = results[i][rep];
            for (Eigen::Index k = 0; k < pp.x.rows(); ++k)
                t.rows.push_back({U{rep}, U{static_cast<std::size_t>(k) + 1}, pp.x(k, 0), pp.x_bar(k, 0)});
        }
        w.write("path_p" + std::to_string(i), t);
    });
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_manifest(RunManifest& m, const ExperimentConfig* config, const std::string& kind) {
    ojson j;
    j["version"] = MSLLN_VERSION;
    j["kind"] = kind;
    j["created_utc"] = utc_timestamp();
    j["wall_seconds"] = m.wall_seconds;
    j["config_echo"] = config ? config->serialize() : std::string();
    j["files"] = ojson::array();
    for (const auto& f : m.files) j["files"].push_back({{"path", f.path}, {"sha256", f.sha256}, {"rows", f.rows}});
    j["failures"] = ojson::array();
    for (const auto& f : m.failures) j["failures"].push_back({{"point", f.point}, {"message", f.message}});
    const fs::path path = fs::path(m.output_dir) / (kind == "run" ? "manifest.json" : "report_manifest.json");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << j.dump(2) << '\n';
    m.manifest_path = path.string();
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();
    RunManifest m;
    m.output_dir = config.output_dir;
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + config.output_dir + "': " + ec.message());

    Writer w{config.output_dir, config.format, {}};
    std::vector<std::string> errors(config.grid.size());
    switch (config.scenario) {
        case Scenario::Rates: rate_tables(config, w, errors, false); break;
        case Scenario::Appell: rate_tables(config, w, errors, true); break;
        case Scenario::Decompose: decompose_tables(config, w, errors); break;
        case Scenario::Sa: sa_tables(config, w, errors); break;
        case Scenario::Autocov: autocov_tables(config, w, errors); break;
        case Scenario::Simulate: simulate_tables(config, w, errors); break;
    }
    m.files = std::move(w.files);
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) m.failures.push_back({i, errors[i]});
    m.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(m, &config, "run");
    return m;
}

namespace detail {
void write_report_manifest(RunManifest& m) { write_manifest(m, nullptr, "report"); }
ManifestEntry write_table(const std::string& dir, const std::string& stem, const std::string& format,
                          const Table& t) {
    Writer w{dir, format, {}};
    w.write(stem, t);
    return w.files.front();
}
}  // namespace detail

}  // namespace mslln
