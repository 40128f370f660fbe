#include <csignal>
#include <iostream>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "evoman/errors.hpp"
#include "evoman/evaluation.hpp"
#include "evoman/experiment.hpp"
#include "evoman/sensors.hpp"
#include "evoman/server.hpp"
#include "evoman/session.hpp"

using namespace evoman;

namespace {

enum Exit { ok = 0, validation = 1, runtime = 2 };

int run_verb(const std::string& config_file, std::optional<int> stop_after, bool quiet) {
    const auto config = experiment::load_config(config_file);
    experiment::RunOptions options;
    options.stop_after_generations = stop_after;
    if (!quiet) options.log = [](const std::string& msg) { fmt::print(stderr, "{}\n", msg); };
    const auto summary = experiment::run_experiment(config, options);
    fmt::print("output: {}\n", summary.output_dir.string());
    for (const auto& f : summary.csv_files) fmt::print("csv: {}\n", f.string());
    for (const auto& f : summary.genome_files) fmt::print("genome: {}\n", f.string());
    for (const auto& f : summary.replay_files) fmt::print("replay: {}\n", f.string());
    if (!summary.complete) fmt::print("incomplete: rerun to resume\n");
    return Exit::ok;
}

int replay_verb(const std::string& file, bool frames) {
    const auto log = replay::load(file);
    const auto report = eval::resimulate(log, [&](const engine::GameState& s) {
        if (frames) std::cout << session::to_json(session::make_frame("replay", s)).dump() << '\n';
    });
    const auto summary = fmt::format("winner={} player_energy={} enemy_energy={} duration={}", engine::to_string(report.winner),
                                     report.player.self_energy, report.enemy.self_energy, report.player.duration);
    // Keep stdout a pure frame stream when frames are requested.
    if (frames) {
        fmt::print(stderr, "{}\n", summary);
    } else {
        fmt::print("{}\n", summary);
    }
    return Exit::ok;
}

session::Server* active_server = nullptr;

int serve_verb(const std::string& listen, const std::string& static_dir) {
    auto options = session::parse_listen(listen);
    options.static_dir = static_dir;
    session::Server server(options);
    active_server = &server;
    std::signal(SIGINT, [](int) {
        if (active_server) active_server->stop();
    });
    fmt::print(stderr, "listening on ws://{}:{}\n", options.host, server.port());
    server.run();
    active_server = nullptr;
    return Exit::ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deterministic duel simulator and neuroevolution toolkit"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "Run an experiment file (baseline, coevolution or single_match)");
    std::string config_file;
    std::optional<int> stop_after;
    bool quiet = false;
    run->add_option("config", config_file, "experiment YAML file")->required();
    run->add_option("--stop-after", stop_after, "stop after N generations (resume by rerunning)");
    run->add_flag("-q,--quiet", quiet, "no progress output");

    auto* rep = app.add_subcommand("replay", "Re-simulate a replay file and print the outcome");
    std::string replay_file;
    bool frames = false;
    rep->add_option("file", replay_file, "replay file")->required();
    rep->add_flag("--frames", frames, "print every frame message (JSON lines) to stdout");

    auto* serve = app.add_subcommand("serve", "Start the session service (WebSocket)");
    std::string listen = "127.0.0.1:8765";
    std::string static_dir;
    serve->add_option("--listen", listen, "host:port")->capture_default_str();
    serve->add_option("--static", static_dir, "directory of client assets served over HTTP");

    auto* describe = app.add_subcommand("describe-sensors", "Print the sensor index table");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return run_verb(config_file, stop_after, quiet);
        if (*rep) return replay_verb(replay_file, frames);
        if (*serve) return serve_verb(listen, static_dir);
        if (*describe) {
            fmt::print("{}", sensors::describe_table());
            return Exit::ok;
        }
    } catch (const ConfigError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::validation;
    } catch (const ParseError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::validation;
    } catch (const std::invalid_argument& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return Exit::validation;
    } catch (const std::exception& e) {
        fmt::print(stderr, "runtime error: {}\n", e.what());
        return Exit::runtime;
    }
    return Exit::ok;
}
