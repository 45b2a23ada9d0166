#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "shapespace/cli.hpp"

int main(int argc, char** argv) {
    using shapespace::cli::Command;
    CLI::App app{"Landmark shape space and Hunter-Saxton geodesics"};
    app.require_subcommand(1);

    shapespace::cli::Options options;
    const std::map<std::string, Command> commands{
        {"shoot", Command::Shoot},
        {"match", Command::Match},
        {"curvature", Command::Curvature},
        {"hs", Command::HunterSaxton},
    };
    const std::map<std::string, std::string> help{
        {"shoot", "integrate the geodesic from landmarks and momenta"},
        {"match", "find the initial momentum reaching the target landmarks"},
        {"curvature", "sectional curvature of the plane spanned by two momenta"},
        {"hs", "Hunter-Saxton geodesic between two diffeomorphisms of the line"},
    };
    for (const auto& [name, command] : commands) {
        CLI::App* sub = app.add_subcommand(name, help.at(name));
        sub->add_option("--input", options.input, "problem file (JSON)")->required()->check(CLI::ExistingFile);
        sub->add_option("--out", options.out, "output directory")->required();
        sub->add_flag("--oracle", options.oracle, "add the finite-difference curvature oracle");
        sub->add_option("--refine", options.refine, "hs: number of (h, dt) halvings")->check(CLI::NonNegativeNumber);
        sub->add_option("--seed", options.seed, "match: multistart seed");
        sub->callback([&options, command = command] { options.command = command; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const nlohmann::json error = {{"kind", "UsageError"}, {"message", e.what()}, {"field", nullptr}};
        std::cerr << nlohmann::json{{"error", error}}.dump() << '\n';
        return shapespace::cli::kValidationError;
    }
    return shapespace::cli::run(options, std::cerr);
}
