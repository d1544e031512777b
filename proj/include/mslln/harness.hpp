#pragma once

// Deterministic execution of replication grids and persistence of reports.
//
// Every (grid point, replication) pair is an independent task seeded with
// replication_seed(base_seed, point, replication). Results are gathered in
// task order, so the files written do not depend on the number of workers.
//
// Files per scenario (CSV header rows; JSON holds the same records):
//   rates     rates.csv     point,sigma,sigma_bar,alpha,regime,e_star,e_hat,stderr,r_lo,r_hi,reps,n_max,seed,underpowered
//             ledger_p<i>.csv  replication,r,n_r,S_norm,M_r
//   appell    appell.csv    same columns as rates.csv, plus appell_ledger_p<i>.csv
//   decompose pieces_p<i>.csv  replication,r,n_r,<seven piece partial sums>,sum_of_pieces,reference,rel_error
//             decompose.csv    point,replication,sigma,sigma_bar,nu,window,half_width,centering,max_rel_error,
//                              hill_diagonal,hill_k,kurtosis_growth_diagonal,kurtosis_growth_in_window,seed
//   sa        sa.csv        point,chi,sigma,alpha,gamma0,gamma_hat,stderr,r_lo,r_hi,reps,n_max,aborted_count,no_rate,seed
//             sa_trace_p<i>.csv  replication,r,n_r,error
//   autocov   autocov.csv   point,sigma,alpha,lag,p,p_star,admissible,gamma,r,n_r,median_abs_deviation,reps,seed
//   simulate  path_p<i>.csv replication,k,x,x_bar
// plus manifest.json {files:[{path,sha256,rows}], config_echo, version, ...}.

#include "mslln/config.hpp"
#include "mslln/estimators.hpp"
#include "mslln/partial_sums.hpp"
#include "mslln/stochastic_approx.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

namespace mslln {

using Cell = std::variant<std::int64_t, std::uint64_t, double, std::string>;

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<Cell>> rows;
};

// Doubles are written with 17 significant digits.
std::string format_cell(const Cell& c);
std::string to_csv(const Table& t);
std::string to_json(const Table& t);
// Reads a table written by to_csv or to_json; every cell comes back as a string.
Table read_table(const std::string& path);

std::string sha256_hex(const std::string& bytes);

struct ManifestEntry {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::size_t rows = 0;
};

struct PointFailure {
    std::size_t point = 0;
    std::string message;
};

struct RunManifest {
    std::string output_dir;
    std::string manifest_path;
    std::vector<ManifestEntry> files;
    std::vector<PointFailure> failures;
    double wall_seconds = 0.0;
};

// Runs fn(0..count-1) on `jobs` threads. Exceptions propagate after all
// workers stop (the first one in index order wins).
void parallel_for(std::size_t count, std::size_t jobs, const std::function<void(std::size_t)>& fn);

// Per-replication workers; the harness and the acceptance suite share them.
double point_alpha(const GridPoint& p);
PartialSumLedger rates_replication(const GridPoint& p, std::size_t levels, std::size_t half_width, std::uint64_t seed);
PartialSumLedger appell_replication(const GridPoint& p, std::size_t levels, std::size_t half_width,
                                    std::uint64_t seed);
AutocovResult autocov_replication(const GridPoint& p, std::size_t levels, std::size_t half_width, std::uint64_t seed);
SATrace sa_replication(const GridPoint& p, std::size_t levels, std::size_t half_width, std::size_t dimension,
                       std::uint64_t seed);

// The SA joint kernel: d regressor rows plus a response row, each a fixed
// mixture of the d + 1 innovation coordinates.
CoefficientSpec sa_joint_kernel(const GridPoint& p, std::size_t dimension, std::size_t half_width);

struct DecomposeReplication {
    Decomposition pieces;
    std::vector<double> reference;  // d_k - d
    double max_rel_error = 0.0;     // over dyadic checkpoints
    double hill_diagonal = 0.0;
    std::size_t hill_k = 0;
    double kurtosis_growth_diagonal = 0.0;
    double kurtosis_growth_in_window = 0.0;
};

DecomposeReplication decompose_replication(const GridPoint& p, std::size_t levels, std::size_t half_width,
                                           std::size_t hill_k, std::uint64_t seed);

// Normwise reconstruction error |a - b| / (sum_k |d_k| + n |d|).
double reconstruction_error(double pieces_sum, double reference, double scale);

// Slope of log2(m4 / m2^2) over the prefixes 2^r, r in the top eight levels.
// Bounded for increments with a finite fourth moment, grows for heavy tails.
double kurtosis_growth(const std::vector<double>& increments);

// Writes all reports and the manifest. Per-point failures are recorded and
// do not stop other points. Throws ValidationError before doing any work if
// the config is invalid.
RunManifest run_experiment(const ExperimentConfig& config);

// Plot-ready tables from the reports in `dir`:
//   report_ledger.csv  point,r,n_r,log2_median_M_r
//   report_rates.csv   point,e_star,e_hat,stderr,regime
RunManifest render_report(const std::string& dir, const std::string& format);

}  // namespace mslln
