#include <iostream>

#include "CLI11.hpp"

#include "rspomdp/cli.hpp"

int main(int argc, char** argv) {
    rspomdp::RunConfig cfg;

    CLI::App app{"risk-sensitive control of partially observable models: "
                 "validate, solve, filter, and simulate"};
    app.require_subcommand(1);

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--model,-m", cfg.model_path, "model JSON file")->required();
        sub->add_option("--output,-o", cfg.output, "output destination, '-' for stdout");
        sub->add_option("--format", cfg.format, "output format: json or csv");
    };

    CLI::App* validate = app.add_subcommand("validate", "check a model file, print the report");
    add_common(validate);

    CLI::App* solve = app.add_subcommand("solve", "optimal finite-horizon values and policy");
    add_common(solve);
    solve->add_option("--horizon,-n", cfg.horizon, "number of decision steps")->required();
    solve->add_option("--x0", cfg.x0, "root observable state (label or index); all when absent");
    solve->add_flag("--fast-exp", cfg.fast_exp, "exponential-utility reduced recursion");
    solve->add_flag("--fast-power", cfg.fast_power, "power-utility reduced recursion");
    solve->add_flag("--total-cost", cfg.total_cost, "undiscounted total-cost semantics (beta=1)");

    CLI::App* inf = app.add_subcommand("solve-inf", "certified infinite-horizon value bracket");
    add_common(inf);
    inf->add_option("--x0", cfg.x0, "root observable state (label or index)")->required();
    inf->add_option("--eps", cfg.eps, "bracket width tolerance (default 1e-4)");
    inf->add_flag("--fast-exp", cfg.fast_exp, "exponential-utility reduced recursion");

    CLI::App* filter = app.add_subcommand("filter", "joint filter along an observed history");
    add_common(filter);
    filter->add_option("--x0", cfg.x0, "initial observable state")->required();
    filter->add_option("--obs", cfg.obs, "history as 'action,state;action,state;...'");

    CLI::App* house = app.add_subcommand("house", "reservation levels for offer stopping");
    add_common(house);
    house->add_option("--horizon,-n", cfg.horizon, "number of future offers")->required();
    house->add_option("--x0", cfg.x0, "initial offer value");

    CLI::App* sim = app.add_subcommand("simulate", "Monte-Carlo policy evaluation");
    add_common(sim);
    sim->add_option("--policy,-p", cfg.policy_path, "policy JSON file")->required();
    sim->add_option("--n,--horizon", cfg.horizon, "steps to simulate (policy depth when absent)");
    sim->add_option("--samples", cfg.samples, "number of trajectories");
    sim->add_option("--seed", cfg.seed, "random seed");
    sim->add_option("--x0", cfg.x0, "root observable state");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    cfg.command = app.get_subcommands().front()->get_name();
    return rspomdp::run(cfg, std::cout, std::cerr);
}
