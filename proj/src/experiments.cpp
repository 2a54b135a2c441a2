#include "berry/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "berry/asymptotics.hpp"
#include "berry/chaos.hpp"
#include "berry/errors.hpp"
#include "berry/rng.hpp"

namespace berry {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxGridPoints = std::size_t{1} << 27;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep))
        out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& s, long line, const std::string& key) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("'" + key + "' expects a number, got '" + s + "'", line);
    return v;
}

long long to_int(const std::string& s, long line, const std::string& key) {
    long long v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size())
        throw ConfigError("'" + key + "' expects an integer, got '" + s + "'", line);
    return v;
}

bool to_bool(const std::string& s, long line, const std::string& key) {
    if (s == "true" || s == "yes" || s == "1")
        return true;
    if (s == "false" || s == "no" || s == "0")
        return false;
    throw ConfigError("'" + key + "' expects true or false, got '" + s + "'", line);
}

// Runs f(i) for i in [0, n) on `jobs` threads; results are kept in index order.
template <class T, class F>
std::vector<T> run_parallel(int n, int jobs, F&& f) {
    std::vector<T> out(n);
    std::vector<std::exception_ptr> err(n);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i; (i = next.fetch_add(1)) < n;) {
            try {
                out[i] = f(i);
            } catch (...) {
                err[i] = std::current_exception();
            }
        }
    };
    const int threads = std::clamp(jobs, 1, std::max(1, n));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t)
        pool.emplace_back(worker);
    worker();
    for (auto& t : pool)
        t.join();
    for (auto& e : err)
        if (e)
            std::rethrow_exception(e);
    return out;
}

std::pair<Vec2, Vec2> union_bounds(const std::vector<Domain>& domains) {
    auto [lo, hi] = domains.front().bounds();
    for (const auto& D : domains) {
        const auto [l, h] = D.bounds();
        lo = {std::min(lo[0], l[0]), std::min(lo[1], l[1])};
        hi = {std::max(hi[0], h[0]), std::max(hi[1], h[1])};
    }
    return {lo, hi};
}

// Spacing at most 1/(grid_factor sqrt E) that divides the x-extent of the domains.
double aligned_spacing(const std::vector<Domain>& domains, double E, double grid_factor) {
    const auto [lo, hi] = union_bounds(domains);
    const double target = default_spacing(E, grid_factor);
    const double width = hi[0] - lo[0];
    return width / std::ceil(width / target - 1e-9);
}

void check_grid_size(const Grid& g) {
    if (g.size() > kMaxGridPoints)
        throw ResolutionError("grid of " + std::to_string(g.size()) + " points exceeds the supported size");
}

Grid node_grid_for(const std::vector<Domain>& domains, double E, double grid_factor) {
    const auto [lo, hi] = union_bounds(domains);
    const Grid g = node_grid(lo, hi, aligned_spacing(domains, E, grid_factor));
    check_grid_size(g);
    return g;
}

Grid midpoint_grid_for(const std::vector<Domain>& domains, double E, double grid_factor) {
    const auto [lo, hi] = union_bounds(domains);
    const Grid g = midpoint_grid(lo, hi, aligned_spacing(domains, E, grid_factor));
    check_grid_size(g);
    return g;
}

double series_radius(const std::vector<Domain>& domains) {
    const auto [lo, hi] = union_bounds(domains);
    double r = 0.0;
    for (double x : {lo[0], hi[0]})
        for (double y : {lo[1], hi[1]})
            r = std::max(r, std::hypot(x, y));
    return r * (1.0 + 1e-9);
}

WaveSpec wave_spec(const ExperimentConfig& c, double E, int J, std::uint64_t seed) {
    WaveSpec s;
    s.E = E;
    s.J = J;
    s.model = c.model;
    s.direction_rule = c.directions;
    s.M = c.M;
    s.disk_radius = series_radius(c.domains);
    s.seed = seed;
    return s;
}

int wave_count(const ExperimentConfig& c, double E) { return c.J.empty() ? auto_wave_count(E, c.domains) : c.J.front(); }

std::uint64_t replicate_seed(std::uint64_t seed, std::size_t energy_index, int replicate) {
    return derive_seed(derive_seed(seed, energy_index), static_cast<std::uint64_t>(replicate));
}

// values[r][d] for one statistic.
using Matrix = std::vector<std::vector<double>>;

Matrix transpose(const Matrix& m) {
    if (m.empty())
        return {};
    Matrix t(m.front().size(), std::vector<double>(m.size()));
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t d = 0; d < m[r].size(); ++d)
            t[d][r] = m[r][d];
    return t;
}

Matrix standardize_empirical(const Matrix& m) {
    const auto s = summarize(transpose(m));
    Matrix out = m;
    for (auto& row : out)
        for (std::size_t d = 0; d < row.size(); ++d) {
            const double sd = std::sqrt(s.variance[d]);
            row[d] = sd > 0.0 ? (row[d] - s.mean[d]) / sd : 0.0;
        }
    return out;
}

// Appends records and a summary block per statistic; stats[k] is values[r][d].
void add_block(ExperimentResult& res, double E, const std::vector<std::uint64_t>& seeds,
               const std::vector<std::pair<std::string, Matrix>>& stats) {
    const std::size_t n = seeds.size();
    for (std::size_t r = 0; r < n; ++r)
        for (const auto& [name, m] : stats)
            for (std::size_t d = 0; d < m[r].size(); ++d)
                res.records.push_back({static_cast<int>(r), seeds[r], E, static_cast<int>(d), name, m[r][d]});
    for (const auto& [name, m] : stats)
        res.summaries.push_back({E, name, summarize(transpose(m))});
}

ExperimentResult new_result(const ExperimentConfig& c) {
    c.validate();
    ExperimentResult r;
    r.experiment = to_string(c.experiment);
    r.config_text = c.canonical();
    r.config_hash = c.hash();
    return r;
}

std::string num(double x) { return format_double(x); }

void add_prediction_tables(ExperimentResult& res, const ExperimentConfig& c) {
    Table t{"predictions", {"E", "domain_id", "area", "mean_length", "var_length", "mean_count", "var_count"}, {}};
    Table ct{"limit_covariance", {"E", "i", "j", "C"}, {}};
    for (double E : c.energies) {
        const auto p = predictions(E, c.domains);
        for (std::size_t d = 0; d < c.domains.size(); ++d)
            t.rows.push_back({num(E), std::to_string(d), num(area(c.domains[d])), num(p.mean_length[d]),
                              num(p.var_length[d]), num(p.mean_count[d]), num(p.var_count[d])});
        for (std::size_t i = 0; i < c.domains.size(); ++i)
            for (std::size_t j = 0; j < c.domains.size(); ++j)
                ct.rows.push_back({num(E), std::to_string(i), std::to_string(j), num(p.C[i][j])});
    }
    res.tables.push_back(std::move(t));
    res.tables.push_back(std::move(ct));
}

std::string key_at(const std::string& stat, double E) { return stat + "@E=" + format_double(E); }

struct ReplicateValues {
    std::vector<double> length, count;
};

std::vector<double> lengths_of(const WaveRealization& w, const Grid& g, const std::vector<Domain>& domains) {
    const auto f = eval_grid(w, g, false);
    const auto res = nodal_lengths(f, domains, [&w](Vec2 x) { return w.value(x); });
    std::vector<double> out;
    for (const auto& r : res)
        out.push_back(r.length);
    return out;
}

std::vector<double> counts_of(const ComplexRealization& w, const Grid& g, const std::vector<Domain>& domains) {
    const auto [re, im] = eval_grid(w, g, false);
    const auto res = vortex_counts(re, im, domains);
    std::vector<double> out;
    for (const auto& r : res)
        out.push_back(static_cast<double>(r.count));
    return out;
}

// Nodal lengths and/or vortex counts per replicate, standardized by the predicted mean and variance.
ExperimentResult run_lengths_counts(const ExperimentConfig& c, const RunOptions& opt, bool lengths, bool counts) {
    auto res = new_result(c);
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
        const double E = c.energies[e];
        const int J = wave_count(c, E);
        const Grid g = node_grid_for(c.domains, E, c.grid_factor);
        std::vector<std::uint64_t> seeds(c.replicates);
        for (int r = 0; r < c.replicates; ++r)
            seeds[r] = replicate_seed(c.seed, e, r);
        const auto vals = run_parallel<ReplicateValues>(c.replicates, opt.jobs, [&](int r) {
            ReplicateValues v;
            const auto spec = wave_spec(c, E, J, seeds[r]);
            if (lengths)
                v.length = lengths_of(sample_wave(spec), g, c.domains);
            if (counts)
                v.count = counts_of(sample_complex(spec), g, c.domains);
            return v;
        });
        const auto p = predictions(E, c.domains);
        std::vector<std::pair<std::string, Matrix>> stats;
        auto add = [&](const std::string& name, const std::vector<double>& mean, const std::vector<double>& var,
                       std::vector<double> ReplicateValues::*field) {
            Matrix raw, scaled;
            for (const auto& v : vals) {
                raw.push_back(v.*field);
                std::vector<double> s(mean.size());
                for (std::size_t d = 0; d < s.size(); ++d)
                    s[d] = ((v.*field)[d] - mean[d]) / std::sqrt(var[d]);
                scaled.push_back(s);
            }
            const auto emp = standardize_empirical(raw);
            stats.push_back({name, raw});
            stats.push_back({name + "_std", scaled});
            stats.push_back({name + "_emp", emp});
        };
        if (lengths)
            add("length", p.mean_length, p.var_length, &ReplicateValues::length);
        if (counts)
            add("count", p.mean_count, p.var_count, &ReplicateValues::count);
        add_block(res, E, seeds, stats);
        for (const auto& [name, m] : stats)
            res.scalars[key_at("min_eigenvalue:" + name, E)] = min_eigenvalue(res.summary(E, name)->stats.correlation);
    }
    add_prediction_tables(res, c);
    return res;
}

} // namespace

ExperimentKind parse_experiment_kind(const std::string& name) {
    static const std::pair<const char*, ExperimentKind> names[] = {
        {"clt", ExperimentKind::clt},
        {"vortex", ExperimentKind::vortex},
        {"sheet", ExperimentKind::sheet},
        {"variance-scaling", ExperimentKind::variance_scaling},
        {"superposition", ExperimentKind::superposition},
        {"chaos", ExperimentKind::chaos},
        {"asymptotics", ExperimentKind::asymptotics},
    };
    for (const auto& [n, k] : names)
        if (name == n)
            return k;
    throw InvalidArgument("unknown experiment '" + name + "'");
}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
    case ExperimentKind::clt: return "clt";
    case ExperimentKind::vortex: return "vortex";
    case ExperimentKind::sheet: return "sheet";
    case ExperimentKind::variance_scaling: return "variance-scaling";
    case ExperimentKind::superposition: return "superposition";
    case ExperimentKind::chaos: return "chaos";
    case ExperimentKind::asymptotics: return "asymptotics";
    }
    return "?";
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    auto list = [](const auto& v, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? "," : "") + fmt(v[i]);
        return s;
    };
    out << "experiment = " << to_string(experiment) << '\n';
    out << "energies = " << list(energies, [](double x) { return format_double(x); }) << '\n';
    for (const auto& D : domains)
        out << "domain = " << D.describe() << '\n';
    out << "replicates = " << replicates << '\n';
    out << "grid_factor = " << format_double(grid_factor) << '\n';
    out << "seed = " << seed << '\n';
    out << "output = " << output << '\n';
    out << "format = " << format << '\n';
    out << "sampler.model = " << to_string(model) << '\n';
    out << "sampler.J = " << (J.empty() ? std::string("auto") : list(J, [](int x) { return std::to_string(x); }))
        << '\n';
    out << "sampler.directions = " << to_string(directions) << '\n';
    out << "sampler.M = " << M << '\n';
    out << "clt.counts = " << (counts ? "true" : "false") << '\n';
    out << "chaos.counts = " << (chaos_counts ? "true" : "false") << '\n';
    out << "scaling.counts = " << (scaling_counts ? "true" : "false") << '\n';
    out << "superposition.baseline = " << (baseline ? "true" : "false") << '\n';
    out << "sheet.lattice = " << sheet_lattice << '\n';
    out << "sheet.pairs = " << sheet_pairs << '\n';
    out << "asymptotics.pairs = " << pairs << '\n';
    out << "asymptotics.leading_order = " << (leading_order ? "true" : "false") << '\n';
    return out.str();
}

void ExperimentConfig::validate() const {
    auto fail = [](const std::string& m) { throw ConfigError(m, 0); };
    if (energies.empty())
        fail("at least one energy is required");
    for (double E : energies)
        if (!(E > 1.0) || !std::isfinite(E))
            fail("energies must exceed 1");
    if (domains.empty())
        fail("at least one domain is required");
    if (experiment != ExperimentKind::asymptotics && replicates < 2)
        fail("replicates must be at least 2");
    if (!(grid_factor >= 8.0))
        fail("grid_factor must be at least 8");
    if (format != "csv" && format != "json")
        fail("format must be csv or json");
    for (int j : J)
        if (j < 1)
            fail("sampler.J entries must be positive");
    if (M < 0)
        fail("sampler.M must be non-negative");
    if (experiment == ExperimentKind::variance_scaling) {
        if (energies.size() < 3)
            fail("variance-scaling needs at least three energies");
        const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
        if (*hi < 100.0 * *lo * (1.0 - 1e-12))
            fail("variance-scaling energies must span at least two decades");
    }
    if (experiment == ExperimentKind::superposition) {
        if (model != WaveModel::berry_phase)
            fail("superposition needs sampler.model = berry-phase");
        if (J.empty())
            fail("superposition needs an explicit sampler.J list");
    }
    if (experiment == ExperimentKind::sheet) {
        if (domains.size() != 1 || !domains[0].is_rectangle())
            fail("sheet needs exactly one rectangle domain");
        const auto [lo, hi] = domains[0].bounds();
        if (std::abs((hi[0] - lo[0]) - (hi[1] - lo[1])) > 1e-12 * (hi[0] - lo[0]))
            fail("sheet domain must be a square");
        if (sheet_lattice < 2)
            fail("sheet.lattice must be at least 2");
        if (sheet_pairs < 1)
            fail("sheet.pairs must be positive");
    }
    if (experiment == ExperimentKind::asymptotics && domains.size() > 2)
        fail("asymptotics takes one or two domains");
    if (model == WaveModel::bessel_series && experiment != ExperimentKind::asymptotics) {
        const double R = series_radius(domains);
        if (M != 0)
            for (double E : energies)
                if (M <= wavenumber(E) * R)
                    fail("sampler.M is too small for the domains at E = " + format_double(E));
    }
}

ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> force) {
    ExperimentConfig c;
    bool domains_seen = false;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    long line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty())
            continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        if (key != "domain" && !seen.insert(key).second)
            throw ConfigError("duplicate key '" + key + "'", line);
        try {
            if (key == "experiment") {
                c.experiment = parse_experiment_kind(value);
            } else if (key == "energies") {
                c.energies.clear();
                for (const auto& s : split(value, ','))
                    c.energies.push_back(to_double(s, line, key));
            } else if (key == "domain") {
                if (!domains_seen)
                    c.domains.clear();
                domains_seen = true;
                c.domains.push_back(parse_domain(value));
            } else if (key == "replicates") {
                c.replicates = static_cast<int>(to_int(value, line, key));
            } else if (key == "grid_factor") {
                c.grid_factor = to_double(value, line, key);
            } else if (key == "seed") {
                std::uint64_t s = 0;
                const auto r = std::from_chars(value.data(), value.data() + value.size(), s);
                if (r.ec != std::errc() || r.ptr != value.data() + value.size())
                    throw ConfigError("'seed' expects an unsigned 64-bit integer", line);
                c.seed = s;
            } else if (key == "output") {
                c.output = value;
            } else if (key == "format") {
                c.format = value;
            } else if (key == "sampler.model") {
                c.model = parse_wave_model(value);
            } else if (key == "sampler.J") {
                c.J.clear();
                if (value != "auto")
                    for (const auto& s : split(value, ','))
                        c.J.push_back(static_cast<int>(to_int(s, line, key)));
            } else if (key == "sampler.directions") {
                c.directions = parse_direction_rule(value);
            } else if (key == "sampler.M") {
                c.M = static_cast<int>(to_int(value, line, key));
            } else if (key == "clt.counts") {
                c.counts = to_bool(value, line, key);
            } else if (key == "chaos.counts") {
                c.chaos_counts = to_bool(value, line, key);
            } else if (key == "scaling.counts") {
                c.scaling_counts = to_bool(value, line, key);
            } else if (key == "superposition.baseline") {
                c.baseline = to_bool(value, line, key);
            } else if (key == "sheet.lattice") {
                c.sheet_lattice = static_cast<int>(to_int(value, line, key));
            } else if (key == "sheet.pairs") {
                c.sheet_pairs = static_cast<int>(to_int(value, line, key));
            } else if (key == "asymptotics.pairs") {
                c.pairs = value;
            } else if (key == "asymptotics.leading_order") {
                c.leading_order = to_bool(value, line, key);
            } else {
                throw ConfigError("unknown key '" + key + "'", line);
            }
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what(), line);
        }
    }
    if (force)
        c.experiment = *force;
    if (!domains_seen && c.experiment == ExperimentKind::sheet)
        c.domains.push_back(Domain::rectangle(0.0, 0.0, 1.0, 1.0));
    if (c.experiment == ExperimentKind::asymptotics && c.pairs != "all" && c.pairs != "a" && c.pairs != "b") {
        for (const auto& p : split(c.pairs, ' '))
            if (!p.empty()) {
                try {
                    parse_pair(p);
                } catch (const InvalidArgument& e) {
                    throw ConfigError(std::string("asymptotics.pairs: ") + e.what(), 0);
                }
            }
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> force) {
    std::ifstream in(path);
    if (!in)
        throw IoError("cannot read config '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), force);
}

int auto_wave_count(double E, const std::vector<Domain>& domains) {
    const auto [lo, hi] = union_bounds(domains);
    const double kd = wavenumber(E) * std::hypot(hi[0] - lo[0], hi[1] - lo[1]);
    const double need = 0.5 * (kd + 8.0 * std::cbrt(kd));
    const int rounded = static_cast<int>(std::ceil(need / 64.0)) * 64;
    return std::max(256, rounded);
}

const SummaryBlock* ExperimentResult::summary(double E, const std::string& stat) const {
    for (const auto& s : summaries)
        if (s.E == E && s.stat == stat)
            return &s;
    return nullptr;
}

const Table* ExperimentResult::table(const std::string& name) const {
    for (const auto& t : tables)
        if (t.name == name)
            return &t;
    return nullptr;
}

double ExperimentResult::scalar(const std::string& name) const {
    const auto it = scalars.find(name);
    return it == scalars.end() ? NAN : it->second;
}

ExperimentResult run_clt(const ExperimentConfig& config, const RunOptions& opt) {
    return run_lengths_counts(config, opt, true, config.counts);
}

ExperimentResult run_vortex(const ExperimentConfig& config, const RunOptions& opt) {
    return run_lengths_counts(config, opt, false, true);
}

ExperimentResult run_sheet(const ExperimentConfig& c, const RunOptions& opt) {
    auto res = new_result(c);
    const Domain& outer = c.domains.front();
    const auto [lo, hi] = outer.bounds();
    const double side = hi[0] - lo[0];
    const int n = c.sheet_lattice;
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
        const double E = c.energies[e];
        const int J = wave_count(c, E);
        // Cell-centred grid whose cells tile every lattice rectangle exactly.
        const int per = static_cast<int>(std::ceil(side / n / default_spacing(E, c.grid_factor) - 1e-9));
        Grid g;
        g.spacing = side / (n * per);
        g.origin = {lo[0] + 0.5 * g.spacing, lo[1] + 0.5 * g.spacing};
        g.nx = g.ny = n * per;
        check_grid_size(g);
        check_resolution(g.spacing, E);
        const double scale = 1.0 / std::sqrt(area(outer) * std::log(E) / (512.0 * kPi));
        std::vector<std::uint64_t> seeds(c.replicates);
        for (int r = 0; r < c.replicates; ++r)
            seeds[r] = replicate_seed(c.seed, e, r);
        const auto X = run_parallel<std::vector<double>>(c.replicates, opt.jobs, [&](int r) {
            const auto f = eval_grid(sample_wave(wave_spec(c, E, J, seeds[r])), g, true);
            const auto cells = length4_cell_values(f, E);
            // Block sums, then two-dimensional prefix sums over the lattice.
            std::vector<double> block(n * n, 0.0);
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    block[(j / per) * n + i / per] += cells[g.index(i, j)];
            std::vector<double> out(n * n, 0.0);
            for (int b = 0; b < n; ++b)
                for (int a = 0; a < n; ++a) {
                    double s = block[b * n + a];
                    if (a > 0)
                        s += out[b * n + a - 1];
                    if (b > 0)
                        s += out[(b - 1) * n + a];
                    if (a > 0 && b > 0)
                        s -= out[(b - 1) * n + a - 1];
                    out[b * n + a] = s;
                }
            for (double& v : out)
                v *= scale;
            return out;
        });
        // Lattice index d = (t2 index) * n + (t1 index); t = (a + 1) / n.
        add_block(res, E, seeds, {{"X4", X}});
        const auto& s = res.summaries.back().stats;
        auto tval = [n](int idx) { return static_cast<double>(idx + 1) / n; };
        Table cov{key_at("sheet_covariance", E), {"t1", "t2", "s1", "s2", "empirical", "predicted"}, {}};
        double max_dev = 0.0;
        for (int d1 = 0; d1 < n * n; ++d1)
            for (int d2 = d1; d2 < n * n; ++d2) {
                const double t1 = tval(d1 % n), t2 = tval(d1 / n), s1 = tval(d2 % n), s2 = tval(d2 / n);
                const double pred = std::min(t1, s1) * std::min(t2, s2);
                max_dev = std::max(max_dev, std::abs(s.covariance[d1][d2] - pred));
                cov.rows.push_back({num(t1), num(t2), num(s1), num(s2), num(s.covariance[d1][d2]), num(pred)});
            }
        res.tables.push_back(std::move(cov));
        res.scalars[key_at("sheet_max_abs_deviation", E)] = max_dev;

        // Sixth-moment increments at random lattice pairs; the restricted set keeps t, s in [1/2, 1]^2.
        std::mt19937_64 rng(derive_seed(c.seed, 0x5EE7));
        Table kol{key_at("kolmogorov", E), {"restricted", "t1", "t2", "s1", "s2", "moment6", "distance", "ratio"}, {}};
        for (int restricted = 1; restricted >= 0; --restricted) {
            std::vector<int> pts;
            for (int d = 0; d < n * n; ++d)
                if (!restricted || (tval(d % n) >= 0.5 && tval(d / n) >= 0.5))
                    pts.push_back(d);
            const std::size_t available = pts.size() * (pts.size() - 1) / 2;
            const std::size_t want = std::min<std::size_t>(c.sheet_pairs, available);
            std::set<std::pair<int, int>> chosen;
            std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
            double lo_ratio = INFINITY, hi_ratio = 0.0;
            while (chosen.size() < want) {
                int a = pts[pick(rng)], b = pts[pick(rng)];
                if (a == b)
                    continue;
                if (a > b)
                    std::swap(a, b);
                if (!chosen.insert({a, b}).second)
                    continue;
                double m6 = 0.0;
                for (const auto& x : X)
                    m6 += std::pow(x[a] - x[b], 6);
                m6 /= static_cast<double>(X.size());
                const double dist = std::hypot(tval(a % n) - tval(b % n), tval(a / n) - tval(b / n));
                const double ratio = m6 / std::pow(dist, 3);
                lo_ratio = std::min(lo_ratio, ratio);
                hi_ratio = std::max(hi_ratio, ratio);
                kol.rows.push_back({std::to_string(restricted), num(tval(a % n)), num(tval(a / n)), num(tval(b % n)),
                                    num(tval(b / n)), num(m6), num(dist), num(ratio)});
            }
            res.scalars[key_at(restricted ? "kolmogorov_max_min" : "kolmogorov_unrestricted_max_min", E)] =
                hi_ratio / lo_ratio;
        }
        res.tables.push_back(std::move(kol));
    }
    return res;
}

ExperimentResult run_superposition(const ExperimentConfig& c, const RunOptions& opt) {
    auto res = new_result(c);
    Table means{"superposition_mean", {"E", "sampler", "domain_id", "mean", "mean_se", "baseline_mean", "baseline_se", "z"}, {}};
    Table corrs{"superposition_correlation", {"E", "sampler", "i", "j", "corr", "baseline_corr", "C", "z"}, {}};
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
        const double E = c.energies[e];
        const Grid g = node_grid_for(c.domains, E, c.grid_factor);
        const auto p = predictions(E, c.domains);
        const double k = wavenumber(E);
        std::vector<std::uint64_t> seeds(c.replicates);
        for (int r = 0; r < c.replicates; ++r)
            seeds[r] = replicate_seed(c.seed, e, r);
        auto run = [&](WaveModel model, int J, std::uint64_t salt) {
            return run_parallel<std::vector<double>>(c.replicates, opt.jobs, [&](int r) {
                auto spec = wave_spec(c, E, J, derive_seed(seeds[r], salt));
                spec.model = model;
                return lengths_of(sample_wave(spec), g, c.domains);
            });
        };
        auto standardized = [&](const Matrix& m) {
            Matrix out = m;
            for (auto& row : out)
                for (std::size_t d = 0; d < row.size(); ++d) {
                    const double a = area(c.domains[d]);
                    row[d] = (row[d] - a * k / std::sqrt(8.0)) / std::sqrt(a * std::log(k) / (256.0 * kPi));
                }
            return out;
        };
        Matrix base;
        std::vector<std::pair<std::string, Matrix>> stats;
        if (c.baseline) {
            base = run(WaveModel::gaussian_spectral, auto_wave_count(E, c.domains), 0xBA5E);
            stats.push_back({"length@gaussian", base});
            stats.push_back({"length_std@gaussian", standardized(base)});
        }
        const auto sb = c.baseline ? summarize(transpose(base)) : SummaryStats{};
        for (int J : c.J) {
            const auto m = run(WaveModel::berry_phase, J, static_cast<std::uint64_t>(J));
            const std::string tag = "@J=" + std::to_string(J);
            stats.push_back({"length" + tag, m});
            stats.push_back({"length_std" + tag, standardized(m)});
            const auto s = summarize(transpose(m));
            for (std::size_t d = 0; d < c.domains.size(); ++d) {
                std::vector<std::string> row{num(E), "J=" + std::to_string(J), std::to_string(d), num(s.mean[d]),
                                             num(s.mean_se[d])};
                if (c.baseline) {
                    const double z = (s.mean[d] - sb.mean[d]) / std::hypot(s.mean_se[d], sb.mean_se[d]);
                    row.insert(row.end(), {num(sb.mean[d]), num(sb.mean_se[d]), num(z)});
                } else {
                    row.insert(row.end(), {"", "", ""});
                }
                means.rows.push_back(row);
            }
            const double nn = static_cast<double>(c.replicates);
            for (std::size_t i = 0; i < c.domains.size(); ++i)
                for (std::size_t j = i + 1; j < c.domains.size(); ++j) {
                    std::vector<std::string> row{num(E), "J=" + std::to_string(J), std::to_string(i), std::to_string(j),
                                                 num(s.correlation[i][j])};
                    if (c.baseline) {
                        // Fisher z difference of two independent correlation estimates.
                        const double z = (std::atanh(std::clamp(s.correlation[i][j], -0.999999, 0.999999)) -
                                          std::atanh(std::clamp(sb.correlation[i][j], -0.999999, 0.999999))) /
                                         std::sqrt(2.0 / (nn - 3.0));
                        row.insert(row.end(), {num(sb.correlation[i][j]), num(p.C[i][j]), num(z)});
                    } else {
                        row.insert(row.end(), {"", num(p.C[i][j]), ""});
                    }
                    corrs.rows.push_back(row);
                }
        }
        add_block(res, E, seeds, stats);
    }
    res.tables.push_back(std::move(means));
    res.tables.push_back(std::move(corrs));
    return res;
}

ExperimentResult run_variance_scaling(const ExperimentConfig& c, const RunOptions& opt) {
    auto sub = c;
    sub.experiment = ExperimentKind::clt;
    sub.counts = c.scaling_counts;
    auto res = run_lengths_counts(sub, opt, true, c.scaling_counts);
    res.experiment = to_string(c.experiment);
    res.config_text = c.canonical();
    res.config_hash = c.hash();
    Table fit{"variance_fit",
              {"stat", "domain_id", "area", "slope", "slope_ci_low", "slope_ci_high", "slope_se", "slope_se_mc",
               "predicted_slope", "ratio", "intercept"},
              {}};
    for (const std::string stat : {"length", "count"}) {
        if (stat == "count" && !c.scaling_counts)
            continue;
        for (std::size_t d = 0; d < c.domains.size(); ++d) {
            std::vector<double> x, y, se;
            for (double E : c.energies) {
                const auto* b = res.summary(E, stat);
                const double norm = stat == "count" ? E : 1.0;
                x.push_back(std::log(E));
                y.push_back(b->stats.variance[d] / norm);
                se.push_back(b->stats.variance_se[d] / norm);
            }
            const auto f = linear_fit(x, y, se);
            const double a = area(c.domains[d]);
            const double pred = stat == "count" ? 11.0 * a / (32.0 * kPi) : a / (512.0 * kPi);
            fit.rows.push_back({stat, std::to_string(d), num(a), num(f.slope), num(f.slope_ci_low),
                                num(f.slope_ci_high), num(f.slope_se), num(f.slope_se_mc), num(pred),
                                num(f.slope / pred), num(f.intercept)});
            res.scalars[stat + "_slope_ratio:" + std::to_string(d)] = f.slope / pred;
        }
    }
    res.tables.push_back(std::move(fit));
    return res;
}

ExperimentResult run_chaos(const ExperimentConfig& c, const RunOptions& opt) {
    auto res = new_result(c);
    Table tv{"chaos_variance", {"E", "domain_id", "stat", "variance", "variance_se", "predicted", "ratio"}, {}};
    for (std::size_t e = 0; e < c.energies.size(); ++e) {
        const double E = c.energies[e];
        const int J = wave_count(c, E);
        const Grid g = midpoint_grid_for(c.domains, E, c.grid_factor);
        check_resolution(g.spacing, E);
        std::vector<std::uint64_t> seeds(c.replicates);
        for (int r = 0; r < c.replicates; ++r)
            seeds[r] = replicate_seed(c.seed, e, r);
        struct Row {
            std::vector<double> L4, L2, N4;
        };
        const auto rows = run_parallel<Row>(c.replicates, opt.jobs, [&](int r) {
            Row row;
            const auto spec = wave_spec(c, E, J, seeds[r]);
            ComplexRealization w;
            if (c.chaos_counts)
                w = sample_complex(spec);
            else
                w.re = sample_wave(spec);
            const auto fre = eval_grid(w.re, g, true);
            for (const auto& D : c.domains) {
                row.L4.push_back(fourth_chaos_length(fre, E, D).value);
                row.L2.push_back(second_chaos_length(w.re, D));
            }
            if (c.chaos_counts) {
                const auto fim = eval_grid(w.im, g, true);
                for (const auto& D : c.domains)
                    row.N4.push_back(fourth_chaos_count(fre, fim, E, D).value);
            }
            return row;
        });
        Matrix L4, L2, N4;
        for (const auto& r : rows) {
            L4.push_back(r.L4);
            L2.push_back(r.L2);
            if (c.chaos_counts)
                N4.push_back(r.N4);
        }
        std::vector<std::pair<std::string, Matrix>> stats{{"L4", L4}, {"L2", L2}};
        if (c.chaos_counts)
            stats.push_back({"N4", N4});
        add_block(res, E, seeds, stats);
        const auto p = predictions(E, c.domains);
        for (const auto& [name, m] : stats) {
            const auto* b = res.summary(E, name);
            for (std::size_t d = 0; d < c.domains.size(); ++d) {
                std::vector<std::string> row{num(E), std::to_string(d), name, num(b->stats.variance[d]),
                                             num(b->stats.variance_se[d])};
                if (name == "L2") {
                    row.insert(row.end(), {"", ""});
                } else {
                    const double pred = name == "L4" ? p.var_length[d] : p.var_count[d];
                    row.insert(row.end(), {num(pred), num(b->stats.variance[d] / pred)});
                }
                tv.rows.push_back(row);
            }
        }
    }
    res.tables.push_back(std::move(tv));
    return res;
}

ExperimentResult run_asymptotics(const ExperimentConfig& c) {
    auto res = new_result(c);
    std::vector<FunctionalPair> pairs;
    if (c.pairs == "all" || c.pairs == "a")
        pairs = all_a_pairs();
    if (c.pairs == "all" || c.pairs == "b") {
        const auto b = all_b_pairs();
        pairs.insert(pairs.end(), b.begin(), b.end());
    }
    if (pairs.empty())
        for (const auto& p : split(c.pairs, ' '))
            if (!p.empty())
                pairs.push_back(parse_pair(p));
    const Domain& D1 = c.domains.front();
    const Domain& D2 = c.domains.size() > 1 ? c.domains[1] : c.domains.front();
    RadialOptions opt;
    opt.leading_order = c.leading_order;
    Table t{"rates", {"pair", "E", "numeric", "predicted", "ratio"}, {}};
    for (double E : c.energies)
        for (const auto& rc : covariance_rate_checks(pairs, E, D1, D2, opt))
            t.rows.push_back({rc.pair, num(rc.E), num(rc.numeric), num(rc.predicted), num(rc.ratio)});
    res.tables.push_back(std::move(t));
    return res;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opt) {
    switch (config.experiment) {
    case ExperimentKind::clt: return run_clt(config, opt);
    case ExperimentKind::vortex: return run_vortex(config, opt);
    case ExperimentKind::sheet: return run_sheet(config, opt);
    case ExperimentKind::variance_scaling: return run_variance_scaling(config, opt);
    case ExperimentKind::superposition: return run_superposition(config, opt);
    case ExperimentKind::chaos: return run_chaos(config, opt);
    case ExperimentKind::asymptotics: return run_asymptotics(config);
    }
    throw InvalidArgument("unknown experiment");
}

} // namespace berry
