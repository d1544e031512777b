#include "mslln/error.hpp"
#include "mslln/estimators.hpp"
#include "mslln/harness.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <string>

namespace mslln {

namespace detail {
void write_report_manifest(RunManifest& m);
ManifestEntry write_table(const std::string& dir, const std::string& stem, const std::string& format,
                          const Table& t);
}  // namespace detail

namespace {

namespace fs = std::filesystem;

std::string cell(const Table& t, const std::vector<Cell>& row, const std::string& column) {
    for (std::size_t i = 0; i < t.header.size(); ++i)
        if (t.header[i] == column) return std::get<std::string>(row[i]);
    throw IoError("table lacks column '" + column + "'");
}

double number(const std::string& s) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw IoError("bad number '" + s + "'");
        return v;
    } catch (const std::logic_error&) {
        throw IoError("bad number '" + s + "'");
    }
}

// Finds stem.csv or stem.json in dir.
std::string locate(const fs::path& dir, const std::string& stem) {
    for (const char* ext : {".csv", ".json"}) {
        const fs::path p = dir / (stem + ext);
        if (fs::exists(p)) return p.string();
    }
    return {};
}

}  // namespace

RunManifest render_report(const std::string& dir, const std::string& format) {
    if (format != "csv" && format != "json") throw ValidationError("report: format must be csv or json");
    if (!fs::is_directory(dir)) throw IoError("report: '" + dir + "' is not a directory");

    std::string summary_path, ledger_stem;
    if (!(summary_path = locate(dir, "rates")).empty()) ledger_stem = "ledger_p";
    else if (!(summary_path = locate(dir, "appell")).empty()) ledger_stem = "appell_ledger_p";
    else throw IoError("report: no rates or appell results in '" + dir + "'");

    const Table summary = read_table(summary_path);
    Table scatter{{"point", "e_star", "e_hat", "stderr", "regime"}, {}};
    Table curves{{"point", "r", "n_r", "log2_median_M_r"}, {}};
    for (const auto& row : summary.rows) {
        const std::string point = cell(summary, row, "point");
        scatter.rows.push_back({point, number(cell(summary, row, "e_star")), number(cell(summary, row, "e_hat")),
                                number(cell(summary, row, "stderr")), cell(summary, row, "regime")});

        const std::string ledger_path = locate(dir, ledger_stem + point);
        if (ledger_path.empty()) throw IoError("report: missing ledger for point " + point);
        const Table ledger = read_table(ledger_path);
        std::map<std::uint64_t, std::pair<std::string, std::vector<double>>> by_level;
        for (const auto& lrow : ledger.rows) {
            const auto r = static_cast<std::uint64_t>(number(cell(ledger, lrow, "r")));
            auto& slot = by_level[r];
            slot.first = cell(ledger, lrow, "n_r");
            slot.second.push_back(number(cell(ledger, lrow, "M_r")));
        }
        for (auto& [r, slot] : by_level) {
            const double med = median(slot.second);
            curves.rows.push_back({point, std::uint64_t{r}, slot.first,
                                   med > 0.0 ? std::log2(med) : -std::numeric_limits<double>::infinity()});
        }
    }

    RunManifest m;
    m.output_dir = dir;
    m.files.push_back(detail::write_table(dir, "report_rates", format, scatter));
    m.files.push_back(detail::write_table(dir, "report_ledger", format, curves));
    detail::write_report_manifest(m);
    return m;
}

}  // namespace mslln
