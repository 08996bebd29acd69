// corner-unfold: command-line front end for the homoclinic-corner toolkit.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "corner/commands.hpp"
#include "corner/errors.hpp"
#include "corner/parallel.hpp"

namespace {

extern "C" void on_signal(int) { corner::cancel_flag().store(true); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Homoclinic corners of piecewise-linear maps: orbits, manifolds, bifurcations, tongues"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(corner::kToolVersion));

    std::string config_path;
    std::size_t workers = 0;
    bool plot = false;
    std::string out_dir;

    const std::map<std::string, std::string> blurbs{
        {"iterate", "forward orbit to CSV"},
        {"portrait", "orbit, invariant manifolds and marked periodic orbits"},
        {"bifdiag", "border collisions of single-round orbits and their ratios"},
        {"sweep", "mode-locking tongues with homoclinic-corner curves"},
        {"corner", "locate a homoclinic corner, optionally trace its curve"},
        {"validate", "unfolding checks on synthetic maps"},
        {"tongues", "mode-locking scan with convergence and accumulation checks"},
        {"tent", "skew tent map orbit"},
    };
    for (const auto& name : corner::command_names()) {
        auto* sub = app.add_subcommand(name, blurbs.at(name));
        sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--workers", workers, "worker threads (default: config, then all cores)");
        sub->add_flag("--plot", plot, "also write SVG figures");
        sub->add_option("--out", out_dir, "output directory (overrides the config)");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? corner::kExitOk : corner::kExitConfig;
    }

    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    const std::string command = app.get_subcommands().front()->get_name();
    corner::CommandOptions options;
    options.workers = workers;
    options.plot = plot;
    if (!out_dir.empty()) options.out_dir = out_dir;
    if (const char* env = std::getenv("CORNER_UNFOLD_SEED")) {
        try {
            std::size_t used = 0;
            options.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            std::cerr << "CORNER_UNFOLD_SEED: not an unsigned integer: " << env << "\n";
            return corner::kExitConfig;
        }
    }

    try {
        const corner::ExperimentConfig config = corner::load_config(config_path);
        const corner::CommandResult result = corner::run_command(command, config, options);
        for (const auto& t : result.manifest.tasks) {
            if (t.status != "ok") std::cerr << t.name << ": " << t.status << (t.detail.empty() ? "" : " (" + t.detail + ")") << "\n";
        }
        std::cout << result.summary;
        return result.exit_code;
    } catch (const corner::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return corner::kExitConfig;
    } catch (const corner::Error& e) {
        std::cerr << "numeric failure: " << e.what() << "\n";
        return corner::kExitNumeric;
    }
}
