#include "mslln/config.hpp"

#include "mslln/error.hpp"
#include "mslln/estimators.hpp"
#include "mslln/stochastic_approx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace mslln {

const char* to_string(Scenario s) noexcept {
    switch (s) {
        case Scenario::Rates: return "rates";
        case Scenario::Decompose: return "decompose";
        case Scenario::Sa: return "sa";
        case Scenario::Autocov: return "autocov";
        case Scenario::Appell: return "appell";
        case Scenario::Simulate: return "simulate";
    }
    return "?";
}

Scenario parse_scenario(const std::string& s) {
    for (auto sc : {Scenario::Rates, Scenario::Decompose, Scenario::Sa, Scenario::Autocov, Scenario::Appell,
                    Scenario::Simulate})
        if (s == to_string(sc)) return sc;
    throw ConfigError("unknown scenario '" + s + "'");
}

namespace {

InnovationSpec make_innovation(const std::string& family, double beta, double x_min, double variance) {
    if (family == "power_law") return InnovationSpec::power_law(x_min, beta);
    if (family == "folded_t") return InnovationSpec::folded_t(beta);
    if (family == "gaussian") return InnovationSpec::gaussian(variance);
    throw ConfigError("unknown family '" + family + "' (power_law, folded_t, gaussian)");
}

// One parsed value: either a string or a number kept as its source text.
struct Scalar {
    bool is_string = false;
    std::string text;
};
using Value = std::vector<Scalar>;  // arrays; a bare scalar is a one-element array

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

class ValueParser {
public:
    ValueParser(std::string_view text, std::size_t line, bool bare_strings)
        : s_(text), line_(line), bare_(bare_strings) {}

    Value parse() {
        Value out;
        skip_ws();
        if (peek() == '[') {
            ++pos_;
            skip_ws();
            if (peek() == ']') fail("empty array");
            for (;;) {
                out.push_back(scalar());
                skip_ws();
                if (peek() == ',') {
                    ++pos_;
                    skip_ws();
                    if (peek() == ']') break;  // trailing comma
                    continue;
                }
                if (peek() == ']') break;
                fail("expected ',' or ']'");
            }
            ++pos_;
        } else {
            out.push_back(scalar());
        }
        skip_ws();
        if (peek() == '#') pos_ = s_.size();
        if (pos_ != s_.size()) fail("trailing characters");
        return out;
    }

private:
    char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\r')) ++pos_;
    }
    [[noreturn]] void fail(const std::string& what) const {
        throw ConfigError("line " + std::to_string(line_) + ": " + what);
    }

    Scalar scalar() {
        Scalar v;
        if (peek() == '"') {
            ++pos_;
            v.is_string = true;
            while (pos_ < s_.size() && s_[pos_] != '"') {
                if (s_[pos_] == '\\') {
                    if (pos_ + 1 >= s_.size()) fail("dangling escape");
                    const char c = s_[pos_ + 1];
                    if (c != '"' && c != '\\') fail("unsupported escape");
                    v.text.push_back(c);
                    pos_ += 2;
                } else {
                    v.text.push_back(s_[pos_++]);
                }
            }
            if (pos_ >= s_.size()) fail("unterminated string");
            ++pos_;
            return v;
        }
        const auto start = pos_;
        while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']' && s_[pos_] != '#' && s_[pos_] != ' ' &&
               s_[pos_] != '\t')
            ++pos_;
        v.text = std::string(s_.substr(start, pos_ - start));
        if (v.text.empty()) fail("missing value");
        const char c = v.text.front();
        const bool numeric = (c >= '0' && c <= '9') || c == '-' || c == '+' || c == '.' || v.text == "inf" ||
                             v.text == "nan";
        if (!numeric) {
            if (!bare_) fail("strings must be quoted: " + v.text);
            v.is_string = true;
        }
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    std::size_t line_;
    bool bare_;
};

double to_double(const Scalar& v, const std::string& key) {
    if (v.is_string) throw ConfigError(key + ": expected a number, got a string");
    std::string t = v.text;
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    double out = 0.0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) throw ConfigError(key + ": bad number '" + v.text + "'");
    return out;
}

std::int64_t to_int(const Scalar& v, const std::string& key) {
    if (v.is_string) throw ConfigError(key + ": expected an integer, got a string");
    std::string t = v.text;
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    std::int64_t out = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(key + ": bad integer '" + v.text + "'");
    return out;
}

std::uint64_t to_uint(const Scalar& v, const std::string& key) {
    if (v.is_string) throw ConfigError(key + ": expected an integer, got a string");
    std::string t = v.text;
    if (!t.empty() && t.front() == '+') t.erase(0, 1);
    std::uint64_t out = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size())
        throw ConfigError(key + ": bad non-negative integer '" + v.text + "'");
    return out;
}

std::string to_str(const Scalar& v, const std::string& key) {
    if (!v.is_string) throw ConfigError(key + ": expected a string");
    return v.text;
}

const Scalar& single(const Value& v, const std::string& key) {
    if (v.size() != 1) throw ConfigError(key + ": expected a single value");
    return v.front();
}

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    // Shortest representation that round-trips.
    for (int prec = 1; prec <= 17; ++prec) {
        char shorter[64];
        std::snprintf(shorter, sizeof shorter, "%.*g", prec, x);
        double back = 0.0;
        std::from_chars(shorter, shorter + std::char_traits<char>::length(shorter), back);
        if (back == x) return shorter;
    }
    return buf;
}

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

struct GridField {
    const char* key;
    std::function<void(GridPoint&, const Scalar&, const std::string&)> assign;
    std::function<std::string(const GridPoint&)> render;
};

const std::vector<GridField>& grid_fields() {
    static const std::vector<GridField> fields = [] {
        std::vector<GridField> f;
        auto num = [&f](const char* key, double GridPoint::*m) {
            f.push_back({key, [m](GridPoint& p, const Scalar& v, const std::string& k) { p.*m = to_double(v, k); },
                         [m](const GridPoint& p) { return format_double(p.*m); }});
        };
        auto str = [&f](const char* key, std::string GridPoint::*m) {
            f.push_back({key, [m](GridPoint& p, const Scalar& v, const std::string& k) { p.*m = to_str(v, k); },
                         [m](const GridPoint& p) { return quote(p.*m); }});
        };
        str("family", &GridPoint::family);
        num("beta", &GridPoint::beta);
        num("x_min", &GridPoint::x_min);
        num("variance", &GridPoint::variance);
        str("family_bar", &GridPoint::family_bar);
        num("beta_bar", &GridPoint::beta_bar);
        num("x_min_bar", &GridPoint::x_min_bar);
        num("variance_bar", &GridPoint::variance_bar);
        str("coupling", &GridPoint::coupling);
        num("sigma", &GridPoint::sigma);
        num("sigma_bar", &GridPoint::sigma_bar);
        num("scale", &GridPoint::scale);
        str("sidedness", &GridPoint::sidedness);
        num("chi", &GridPoint::chi);
        f.push_back({"lag",
                     [](GridPoint& p, const Scalar& v, const std::string& k) {
                         p.lag = static_cast<std::size_t>(to_uint(v, k));
                     },
                     [](const GridPoint& p) { return std::to_string(p.lag); }});
        num("p", &GridPoint::p);
        num("nu", &GridPoint::nu);
        return f;
    }();
    return fields;
}

const GridField* find_grid_field(const std::string& key) {
    for (const auto& f : grid_fields())
        if (key == f.key) return &f;
    return nullptr;
}

const std::set<std::string>& global_keys() {
    static const std::set<std::string> keys = {"scenario",  "replications", "levels",       "base_seed",
                                               "half_width", "jobs",         "output_dir",   "format",
                                               "fit_lo",     "fit_hi",       "hill_k",       "sa_dimension",
                                               "min_replications"};
    return keys;
}

void assign_global(ExperimentConfig& c, const std::string& key, const Value& value) {
    const Scalar& v = single(value, key);
    if (key == "scenario") c.scenario = parse_scenario(to_str(v, key));
    else if (key == "replications") c.replications = to_uint(v, key);
    else if (key == "levels") c.levels = to_uint(v, key);
    else if (key == "base_seed") c.base_seed = to_uint(v, key);
    else if (key == "half_width") c.half_width = to_int(v, key);
    else if (key == "jobs") c.jobs = to_uint(v, key);
    else if (key == "output_dir") c.output_dir = to_str(v, key);
    else if (key == "format") c.format = to_str(v, key);
    else if (key == "fit_lo") c.fit_lo = to_int(v, key);
    else if (key == "fit_hi") c.fit_hi = to_int(v, key);
    else if (key == "hill_k") c.hill_k = to_uint(v, key);
    else if (key == "sa_dimension") c.sa_dimension = to_uint(v, key);
    else if (key == "min_replications") c.min_replications = to_uint(v, key);
    else throw ConfigError("unknown key '" + key + "'");
}

// Applies grid columns onto a base point; columns broadcast when of length 1.
std::vector<GridPoint> build_grid(const std::map<std::string, Value>& columns, const std::vector<GridPoint>& base) {
    std::size_t points = 0;
    for (const auto& [key, col] : columns)
        if (col.size() > 1) {
            if (points > 1 && points != col.size())
                throw ConfigError("grid arrays disagree in length ('" + key + "' has " + std::to_string(col.size()) +
                                  ", expected " + std::to_string(points) + ")");
            points = col.size();
        }
    if (points == 0) points = std::max<std::size_t>(1, base.size());
    if (base.size() > 1 && base.size() != points)
        throw ConfigError("grid length " + std::to_string(points) + " conflicts with the existing grid of " +
                          std::to_string(base.size()) + " points");

    std::vector<GridPoint> grid(points, base.empty() ? GridPoint{} : base.front());
    if (base.size() == points)
        grid = base;

    const bool bar_family_given = columns.count("family_bar") != 0;
    const bool sigma_bar_given = columns.count("sigma_bar") != 0;
    for (std::size_t i = 0; i < points; ++i) {
        for (const auto& [key, col] : columns) {
            const Scalar& v = col.size() == 1 ? col.front() : col[i];
            find_grid_field(key)->assign(grid[i], v, key);
        }
        if (base.empty()) {
            // Fresh file: unspecified conjugate parameters follow the primary ones.
            if (!bar_family_given) {
                grid[i].family_bar = grid[i].family;
                if (!columns.count("beta_bar")) grid[i].beta_bar = grid[i].beta;
                if (!columns.count("x_min_bar")) grid[i].x_min_bar = grid[i].x_min;
                if (!columns.count("variance_bar")) grid[i].variance_bar = grid[i].variance;
            }
            if (!sigma_bar_given) grid[i].sigma_bar = grid[i].sigma;
        }
    }
    return grid;
}

}  // namespace

InnovationSpec GridPoint::innovation() const { return make_innovation(family, beta, x_min, variance); }
InnovationSpec GridPoint::innovation_bar() const {
    return make_innovation(family_bar, beta_bar, x_min_bar, variance_bar);
}

ExperimentConfig ExperimentConfig::defaults(Scenario scenario) {
    ExperimentConfig c;
    c.scenario = scenario;
    c.output_dir = std::string("mslln_out/") + to_string(scenario);
    auto point = [](const std::string& family, double beta, double sigma) {
        GridPoint p;
        p.family = p.family_bar = family;
        p.beta = p.beta_bar = beta;
        p.sigma = p.sigma_bar = sigma;
        return p;
    };
    switch (scenario) {
        case Scenario::Rates:
            c.grid = {point("power_law", 4.6, 0.6), point("power_law", 3.5, 0.95), point("gaussian", 5.0, 0.95)};
            c.replications = 64;
            c.levels = 18;
            break;
        case Scenario::Decompose:
            c.grid = {point("power_law", 5.0, 0.75)};
            c.replications = 4;
            c.levels = 10;
            c.half_width = 32;
            break;
        case Scenario::Sa: {
            GridPoint p = point("power_law", 4.0, 0.8);
            p.chi = 1.0;
            p.scale = 0.25;
            c.grid = {p};
            c.replications = 64;
            c.levels = 18;
            break;
        }
        case Scenario::Autocov: {
            for (std::size_t lag : {0, 1, 2}) {
                GridPoint p = point("power_law", 4.6, 0.8);
                p.sidedness = "causal";
                p.lag = lag;
                p.p = 1.15;
                c.grid.push_back(p);
            }
            c.replications = 64;
            c.levels = 18;
            break;
        }
        case Scenario::Appell: {
            GridPoint p = point("gaussian", 5.0, 0.6);
            p.sidedness = "causal";
            c.grid = {p};
            c.replications = 64;
            c.levels = 18;
            break;
        }
        case Scenario::Simulate:
            c.grid = {point("gaussian", 5.0, 0.75)};
            c.replications = 1;
            c.levels = 10;
            break;
    }
    return c;
}

ExperimentConfig ExperimentConfig::parse(std::string_view text) {
    std::map<std::string, Value> columns;
    std::map<std::string, Value> globals;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(std::string_view(t).substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": missing key");
        if (!seen.insert(key).second) throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
        Value v = ValueParser(std::string_view(t).substr(eq + 1), lineno, false).parse();
        if (find_grid_field(key)) columns[key] = std::move(v);
        else if (global_keys().count(key)) globals[key] = std::move(v);
        else throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
    if (!globals.count("scenario")) throw ConfigError("missing required key 'scenario'");

    ExperimentConfig c;
    c.scenario = parse_scenario(to_str(single(globals.at("scenario"), "scenario"), "scenario"));
    for (const auto& [key, v] : globals) assign_global(c, key, v);
    c.grid = build_grid(columns, {});
    return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out << "scenario = " << quote(to_string(scenario)) << '\n';
    out << "replications = " << replications << '\n';
    out << "levels = " << levels << '\n';
    out << "base_seed = " << base_seed << '\n';
    out << "half_width = " << half_width << '\n';
    out << "jobs = " << jobs << '\n';
    out << "output_dir = " << quote(output_dir) << '\n';
    out << "format = " << quote(format) << '\n';
    out << "fit_lo = " << fit_lo << '\n';
    out << "fit_hi = " << fit_hi << '\n';
    out << "hill_k = " << hill_k << '\n';
    out << "sa_dimension = " << sa_dimension << '\n';
    out << "min_replications = " << min_replications << '\n';
    out << "# grid: " << grid.size() << " point(s)\n";
    for (const auto& f : grid_fields()) {
        out << f.key << " = [";
        for (std::size_t i = 0; i < grid.size(); ++i) out << (i ? ", " : "") << f.render(grid[i]);
        out << "]\n";
    }
    return out.str();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    Value v = ValueParser(value, 0, true).parse();
    if (find_grid_field(key)) {
        grid = build_grid({{key, v}}, grid);
    } else if (global_keys().count(key)) {
        assign_global(*this, key, v);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

std::size_t ExperimentConfig::effective_half_width() const {
    if (half_width >= 0) return static_cast<std::size_t>(half_width);
    if (scenario == Scenario::Decompose) return 32;
    return std::min(kMaxAutoHalfWidth, std::size_t{4} << std::min<std::size_t>(levels, 40));
}

void ExperimentConfig::validate() const {
    if (grid.empty()) throw ValidationError("config: the grid is empty");
    if (replications == 0) throw ValidationError("config: replications must be >= 1");
    if (levels == 0 || levels > kMaxLevels)
        throw ValidationError("config: levels must lie in [1, " + std::to_string(kMaxLevels) + "], got " +
                              std::to_string(levels));
    if (jobs == 0) throw ValidationError("config: jobs must be >= 1");
    if (half_width < -1) throw ValidationError("config: half_width must be >= 0 or -1 (automatic)");
    if ((scenario == Scenario::Rates || scenario == Scenario::Appell) && fit_lo < 0 && levels < 4)
        throw ValidationError("config: rate fits need levels >= 4");
    if (format != "csv" && format != "json") throw ValidationError("config: format must be csv or json");
    if (output_dir.empty()) throw ValidationError("config: output_dir is empty");
    if (fit_lo >= 0 || fit_hi >= 0) {
        if (fit_lo < 0 || fit_hi < 0) throw ValidationError("config: fit_lo and fit_hi must be set together");
        if (fit_hi < fit_lo || static_cast<std::size_t>(fit_hi) > levels)
            throw ValidationError("config: fit range must satisfy fit_lo <= fit_hi <= levels");
    }
    if (sa_dimension == 0 || sa_dimension > 16) throw ValidationError("config: sa_dimension must lie in [1, 16]");
    const std::size_t n = std::size_t{1} << levels;
    if (hill_k != 0 && (hill_k < 50 || hill_k >= n))
        throw ValidationError("config: hill_k must lie in [50, n) or be 0");

    for (std::size_t i = 0; i < grid.size(); ++i) {
        const GridPoint& p = grid[i];
        const std::string where = "grid point " + std::to_string(i) + ": ";
        try {
            const InnovationSpec spec = p.innovation();
            const InnovationSpec spec_bar = p.innovation_bar();
            const Coupling coupling = p.coupling_mode();
            const Sidedness sidedness = p.sidedness_mode();
            if (coupling == Coupling::Identical && !(spec == spec_bar))
                throw ValidationError("identical coupling needs equal marginals for xi and xibar");
            CoefficientSpec(p.sigma, sidedness, p.scale);
            CoefficientSpec(p.sigma_bar, sidedness, p.scale);
            const TailExponent tail = product_tail_alpha(spec, spec_bar, coupling);
            const double alpha = tail.light_tail ? kLightTail : tail.alpha;
            switch (scenario) {
                case Scenario::Rates:
                case Scenario::Simulate:
                    theoretical_exponent(p.sigma, p.sigma_bar, alpha);
                    break;
                case Scenario::Decompose:
                    if (!(p.nu > 0.0 && std::isfinite(p.nu))) throw ValidationError("nu must be a positive number");
                    theoretical_exponent(p.sigma, p.sigma_bar, alpha);
                    break;
                case Scenario::Sa:
                    if (coupling != Coupling::Identical) throw ValidationError("sa needs identical coupling");
                    if (!(p.chi > 0.5 && p.chi <= 1.0)) throw ValidationError("chi must lie in (1/2, 1]");
                    sa_theoretical_rate(p.chi, p.sigma, alpha);
                    break;
                case Scenario::Autocov:
                    if (sidedness != Sidedness::OneSidedCausal)
                        throw ValidationError("autocov needs a causal kernel");
                    if (coupling != Coupling::Identical) throw ValidationError("autocov needs identical coupling");
                    if (!(p.p > 0.0)) throw ValidationError("p must be > 0");
                    if (p.lag > effective_half_width()) throw ValidationError("lag exceeds the half-width");
                    theoretical_exponent(p.sigma, p.sigma, alpha);
                    break;
                case Scenario::Appell:
                    if (coupling != Coupling::Identical) throw ValidationError("appell needs identical coupling");
                    theoretical_exponent(p.sigma, p.sigma, alpha);
                    break;
            }
        } catch (const ValidationError& e) {
            throw ValidationError(where + e.what());
        }
    }
}

}  // namespace mslln
