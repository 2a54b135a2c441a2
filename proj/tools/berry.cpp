#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "berry/errors.hpp"
#include "berry/experiments.hpp"

namespace {

enum Exit { ok = 0, failure = 1, config_error = 2, resolution_error = 3, io_error = 4 };

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string format;
    int jobs = 1;
};

int run(const std::string& command, const Options& o) {
    using namespace berry;
    std::optional<ExperimentKind> force;
    if (command == "nodal" || command == "cov")
        force = ExperimentKind::clt;
    else if (command == "chaos")
        force = ExperimentKind::chaos;
    else if (command == "asymptotics")
        force = ExperimentKind::asymptotics;
    else if (command == "sheet")
        force = ExperimentKind::sheet;

    ExperimentConfig cfg = load_config(o.config, force);
    if (command == "cov")
        cfg.counts = true;
    if (o.seed)
        cfg.seed = *o.seed;
    if (!o.out.empty())
        cfg.output = o.out;
    if (!o.format.empty())
        cfg.format = o.format;
    cfg.validate();

    const auto result = run_experiment(cfg, RunOptions{o.jobs});
    if (cfg.output.empty() || cfg.output == "-") {
        std::cout << (cfg.format == "json" ? to_json(result) : to_csv(result));
    } else {
        persist(result, cfg.output, cfg.format);
        std::cerr << "wrote " << cfg.output << " (" << result.records.size() << " records, config "
                  << result.config_hash.substr(0, 12) << ")\n";
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Random plane wave simulation and covariance asymptotics"};
    app.require_subcommand(1);
    Options o;
    std::string seed_text;
    const char* commands[][2] = {
        {"simulate", "Run the experiment named in the config"},
        {"nodal", "Nodal lengths on the configured domains"},
        {"cov", "Nodal lengths and vortex counts with their covariance across domains"},
        {"chaos", "Second and fourth chaos components"},
        {"asymptotics", "Deterministic covariance rate checks"},
        {"sheet", "Rectangle-indexed fourth chaos field on a lattice"},
    };
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "Config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed_text, "Override the base seed");
        sub->add_option("--out", o.out, "Output path ('-' for stdout)");
        sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config_error;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (!seed_text.empty()) {
            std::size_t used = 0;
            o.seed = std::stoull(seed_text, &used);
            if (used != seed_text.size())
                throw berry::ConfigError("--seed expects an unsigned integer", 0);
        }
        return run(command, o);
    } catch (const berry::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const std::out_of_range& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return config_error;
    } catch (const berry::ResolutionError& e) {
        std::cerr << "resolution error: " << e.what() << '\n';
        return resolution_error;
    } catch (const berry::IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return io_error;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return failure;
    }
}
