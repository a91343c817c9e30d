#include "nambu/dynamics.hpp"
#include "nambu/scenario.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

namespace {

int run_task(const std::string& task, const std::string& scenario_path,
             const nambu::ScenarioOverrides& base) {
    nambu::ScenarioOverrides overrides = base;
    overrides.task = task;
    const auto result = nambu::run_scenario(scenario_path, overrides);
    if (result.exit_code == 0)
        std::cout << result.message << "\n";
    else
        std::cerr << result.message << "\n";
    return result.exit_code;
}

int summarize(const std::string& path) {
    if (path.size() > 4 && path.substr(path.size() - 4) == ".csv") {
        const auto traj = nambu::read_trajectory_csv(path);
        if (traj.times.empty()) {
            std::cerr << "empty trajectory\n";
            return 1;
        }
        std::cout << "trajectory: " << traj.size() << " rows, "
                  << traj.states.front().size() << " coordinates, t in ["
                  << traj.times.front() << ", " << traj.times.back() << "]\n";
        if (!traj.diagnostic_names.empty()) {
            std::cout << "final diagnostics:";
            for (size_t i = 0; i < traj.diagnostic_names.size(); ++i)
                std::printf(" %s=%.17g", traj.diagnostic_names[i].c_str(),
                            traj.diagnostics.back()[i]);
            std::cout << "\n";
        }
        return 0;
    }
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot open: " << path << "\n";
        return 1;
    }
    try {
        nlohmann::ordered_json j;
        in >> j;
        std::cout << j.dump(2) << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "not a readable report: " << e.what() << "\n";
        return 1;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scenario-driven toolkit for Hamiltonian systems in redundant variables"};
    app.require_subcommand(1);
    app.fallthrough();

    nambu::ScenarioOverrides overrides;
    std::uint64_t seed = 0;
    double tolerance = 0.0;
    auto* seed_opt = app.add_option("--seed", seed, "override the scenario seed");
    app.add_option("--out-dir", overrides.out_dir, "directory for relative output paths");
    auto* tol_opt =
        app.add_option("--tolerance", tolerance, "override verification thresholds");

    std::string scenario_path, artifact_path;
    auto add_scenario = [&](CLI::App* sub) {
        sub->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
    };
    add_scenario(app.add_subcommand("simulate", "integrate a trajectory"));
    add_scenario(app.add_subcommand("verify", "check constraint conditions"));
    add_scenario(app.add_subcommand("partition", "estimate partition functions"));
    add_scenario(app.add_subcommand("lift", "verify and run an enlarged multiplet"));
    app.add_subcommand("report", "summarize an output artifact")
        ->add_option("artifact", artifact_path, "trajectory CSV or report JSON")
        ->required();

    CLI11_PARSE(app, argc, argv);

    if (seed_opt->count() > 0) overrides.seed = seed;
    if (tol_opt->count() > 0) overrides.tolerance = tolerance;

    const auto* sub = app.get_subcommands().front();
    if (sub->get_name() == "report") return summarize(artifact_path);
    return run_task(sub->get_name(), scenario_path, overrides);
}
