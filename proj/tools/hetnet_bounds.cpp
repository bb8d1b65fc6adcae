#include <iostream>

#include "CLI11.hpp"
#include "hetnet/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Analytical interference and capacity bounds for multi-tier cellular networks"};
    app.set_version_flag("--version", std::string(HETNET_VERSION));
    app.require_subcommand(1);

    hetnet::CommandOptions opt;
    std::uint64_t seed = 0;
    std::size_t realizations = 0;
    const struct {
        const char* name;
        const char* help;
    } commands[] = {
        {"cdf", "Band on the CDF of the standardized interference"},
        {"outage", "Outage capacity band per sweep value"},
        {"ergodic", "Ergodic capacity band per sweep value"},
        {"ase", "Area spectral efficiency band per sweep value"},
        {"mc", "Monte-Carlo estimates of every simulated quantity"},
    };
    for (const auto& c : commands) {
        CLI::App* sub = app.add_subcommand(c.name, c.help);
        sub->add_option("--config", opt.config, "Scenario file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_flag("--mc", opt.mc, "Add Monte-Carlo columns");
        sub->add_option("--seed", seed, "Simulation seed");
        sub->add_option("--realizations", realizations, "Simulation realizations")->check(CLI::PositiveNumber);
        sub->add_option("--out", opt.out, "Output CSV path (default: stdout)");
        sub->callback([&opt, sub, &seed, &realizations] {
            opt.command = sub->get_name();
            if (sub->count("--seed") > 0) opt.seed = seed;
            if (sub->count("--realizations") > 0) opt.realizations = realizations;
        });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : hetnet::kExitConfig;
    }
    return hetnet::run_command(opt, std::cout, std::cerr);
}
