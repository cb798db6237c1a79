#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "kramers1d/pipeline.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::string> output_path;
    std::optional<std::string> format;
    std::optional<std::uint64_t> seed;
    int jobs = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "path to the JSON run configuration")->required();
    cmd->add_option("--output", flags.output_path, "write the report here instead of the config's output.path");
    cmd->add_option("--format", flags.format, "report format: json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
    cmd->add_option("--seed", flags.seed, "override the config's RNG seed");
    cmd->add_option("--jobs", flags.jobs, "worker count for trajectory sampling (does not affect results)")
        ->check(CLI::PositiveNumber);
}

int run(kramers1d::RunMode mode, const CommonFlags& flags) {
    using namespace kramers1d;
    RunConfig cfg;
    try {
        std::ifstream in(flags.config_path);
        if (!in) throw ConfigError("cannot open config file '" + flags.config_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = parse_config(buf.str());
        if (flags.seed) cfg.seed = *flags.seed;
        if (flags.format) cfg.format = *flags.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
        if (flags.output_path) cfg.output_path = flags.output_path;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    }

    int jobs = flags.jobs > 0 ? flags.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    Report report;
    try {
        report = run_pipeline(cfg, mode, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << to_string(mode) << " failed: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << to_string(mode) << " failed: " << e.what() << "\n";
        return 3;
    }

    const std::string text = render_report(report);
    if (cfg.output_path) {
        std::ofstream out(*cfg.output_path);
        if (!out) {
            std::cerr << "cannot write report to '" << *cfg.output_path << "'\n";
            return 3;
        }
        out << text;
    } else {
        std::cout << text;
    }

    if (mode == kramers1d::RunMode::Validate && report.verdict && !report.verdict->passed) {
        std::cerr << "validation verdict failed\n";
        return 4;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eyring-Kramers transition-time toolkit for 1-D stochastic Allen-Cahn fields"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        kramers1d::RunMode mode;
    };
    const Sub subs[] = {
        {"analyze", "stationary points, Morse indices and functional determinants", kramers1d::RunMode::Analyze},
        {"predict", "Eyring-Kramers transition-time predictions per epsilon", kramers1d::RunMode::Predict},
        {"simulate", "Monte Carlo hitting-time estimates", kramers1d::RunMode::Simulate},
        {"validate", "predictions + simulation + Arrhenius fit + KS test with a verdict", kramers1d::RunMode::Validate},
        {"detratio", "determinant-ratio cross-check across the grid-size list", kramers1d::RunMode::DetRatio},
    };

    CommonFlags flags[std::size(subs)];
    CLI::App* cmds[std::size(subs)];
    for (std::size_t i = 0; i < std::size(subs); ++i) {
        cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
        add_common(cmds[i], flags[i]);
    }

    CLI11_PARSE(app, argc, argv);

    for (std::size_t i = 0; i < std::size(subs); ++i)
        if (cmds[i]->parsed()) return run(subs[i].mode, flags[i]);
    return 2;
}
