#include <iostream>

#include "CLI11.hpp"
#include "cuspfs/experiment/config.hpp"
#include "cuspfs/experiment/runner.hpp"

namespace ex = cuspfs::experiment;

int main(int argc, char** argv) {
    CLI::App app{"cuspfs: weighted Sobolev spaces and parabolic problems on cusp manifolds"};
    app.require_subcommand(1);

    app.add_subcommand("list-checks", "print the check catalog");

    ex::RunOptions options;
    std::string config, out;
    std::uint64_t seed = 0;
    for (const auto& name : ex::command_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " checks");
        sub->add_option("--config", config, "JSON config file")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory");
        sub->add_option("--seed", seed, "corpus seed; overrides the config");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ex::kConfigFailure;
    }

    auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "list-checks") {
        ex::list_checks(std::cout);
        return 0;
    }
    options.command = sub->get_name();
    options.config = config;
    if (!out.empty()) options.out = out;
    if (sub->count("--seed")) options.seed = seed;
    return ex::run(options, std::cerr);
}
