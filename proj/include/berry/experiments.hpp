#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "berry/geometry.hpp"
#include "berry/sampler.hpp"
#include "berry/stats.hpp"

namespace berry {

enum class ExperimentKind { clt, vortex, sheet, variance_scaling, superposition, chaos, asymptotics };

ExperimentKind parse_experiment_kind(const std::string& name);
const char* to_string(ExperimentKind kind);

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::clt;
    std::vector<double> energies{100.0};
    std::vector<Domain> domains;
    int replicates = 100;
    double grid_factor = 16.0;
    WaveModel model = WaveModel::gaussian_spectral;
    std::vector<int> J; // empty selects the size from the energy and the domains
    DirectionRule directions = DirectionRule::equispaced;
    int M = 0;
    std::uint64_t seed = 1;
    std::string output;
    std::string format = "csv";
    bool counts = false;        // clt: also count vortices on the same replicate index
    bool chaos_counts = true;   // chaos: include the fourth chaos of the count
    bool scaling_counts = true; // variance-scaling: include counts
    bool baseline = true;       // superposition: add a gaussian-spectral reference run
    int sheet_lattice = 8;
    int sheet_pairs = 20;
    std::string pairs = "all"; // asymptotics: "all", "a", "b" or a list such as "a1,a1 b2,b7"
    bool leading_order = false;

    /// Fixed-order key = value text of every field; the hash is taken over it.
    std::string canonical() const;
    /// Git blob SHA-1 of canonical().
    std::string hash() const;
    void validate() const;
};

/// Flat "key = value" lines; '#' starts a comment. Unknown keys and bad values raise ConfigError.
/// `force` replaces the experiment key before defaults and validation are applied.
ExperimentConfig parse_config(const std::string& text, std::optional<ExperimentKind> force = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<ExperimentKind> force = std::nullopt);

/// Plane-wave count used when the config leaves J open: enough directions to resolve k * diam.
int auto_wave_count(double E, const std::vector<Domain>& domains);

struct Record {
    int replicate = 0;
    std::uint64_t seed = 0;
    double E = 0.0;
    int domain_id = 0;
    std::string stat;
    double value = 0.0;
};

struct SummaryBlock {
    double E = 0.0;
    std::string stat;
    SummaryStats stats;
};

/// A table of formatted cells; numbers use the shortest round-trip representation.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
};

struct ExperimentResult {
    std::string experiment;
    std::string config_text;
    std::string config_hash;
    std::vector<Record> records;
    std::vector<SummaryBlock> summaries;
    std::map<std::string, double> scalars;
    std::vector<Table> tables;

    const SummaryBlock* summary(double E, const std::string& stat) const;
    const Table* table(const std::string& name) const;
    double scalar(const std::string& name) const;
};

struct RunOptions {
    int jobs = 1;
};

ExperimentResult run_clt(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_vortex(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_sheet(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_superposition(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_variance_scaling(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_chaos(const ExperimentConfig& config, const RunOptions& opt = {});
ExperimentResult run_asymptotics(const ExperimentConfig& config);
/// Dispatches on config.experiment.
ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opt = {});

/// Per-replicate rows "replicate,seed,E,domain_id,stat,value"; tables only when there are no records.
std::string to_csv(const ExperimentResult& result);
/// Summary document with the config echo, its hash, all summaries, scalars and tables.
std::string to_json(const ExperimentResult& result);

/// format "csv" writes the CSV to path and the summary next to it (extension .json); "json" writes the summary.
void persist(const ExperimentResult& result, const std::string& path, const std::string& format);
/// Reads either file kind; malformed input raises ParseError with the line number.
ExperimentResult load(const std::string& path);
ExperimentResult parse_csv(const std::string& text);
ExperimentResult parse_json(const std::string& text);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double x);

} // namespace berry
