#include "puma/commands.hpp"
#include "puma/config.hpp"

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Delayed predator-prey analysis"};
    app.require_subcommand(1, 1);

    std::string config_path;
    std::string out_dir;
    bool svg = false;
    bool log_prey = false;

    for (const char* name : {"equilibria", "stability", "simulate", "grid", "scenario"}) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON run configuration")->required();
        sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
        sub->add_flag("--svg", svg, "also write SVG plots");
        sub->add_flag("--log-prey", log_prey, "logarithmic prey axis in plots");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    const std::string command = app.get_subcommands().front()->get_name();
    puma::RunConfig config;
    try {
        config = puma::load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    if (!out_dir.empty()) config.output.dir = out_dir;
    if (svg) config.output.svg = true;
    if (log_prey) config.output.log_prey = true;
    return puma::dispatch(puma::command_from_string(command), config, std::cout, std::cerr);
}
