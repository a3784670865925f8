#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
    using namespace hetdisc::cli;

    CLI::App app{"Collective growth with heterogeneous discounting: solver, simulator and certificates"};
    app.require_subcommand(1);

    CommandOptions opts;
    const std::map<std::string, std::pair<int (*)(const CommandOptions&, std::ostream&), const char*>> commands = {
        {"solve", {cmd_solve, "Solve the time-varying-weight problem and write policy, trajectory and summary"}},
        {"simulate", {cmd_simulate, "Simulate the optimal path and re-plan it midway"}},
        {"axioms", {cmd_axioms, "Check stationarity, time invariance and time consistency over a grid of payments"}},
        {"compare", {cmd_compare, "Contrast time-varying weights with constant weights"}},
        {"oracle", {cmd_oracle, "Run the closed-form oracles"}},
    };
    for (const auto& [name, entry] : commands) {
        CLI::App* sub = app.add_subcommand(name, entry.second);
        sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
        sub->add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
        sub->add_option("--threads", opts.threads, "Worker threads (0 = OpenMP default)")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", opts.seed, "Seed for randomized sampling")->capture_default_str();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }
    for (const auto& [name, entry] : commands) {
        if (app.got_subcommand(name)) return entry.first(opts, std::cout);
    }
    return kExitConfig;
}
