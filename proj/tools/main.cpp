#include "nudged_ns/config.hpp"
#include "nudged_ns/error.hpp"
#include "nudged_ns/experiments.hpp"
#include "nudged_ns/props.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

using namespace nudged_ns;

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverError = 3;
constexpr int kPropertyFailure = 4;

int dispatch(const Config& cfg) {
    std::ostream* log = &std::cout;
    switch (cfg.experiment()) {
    case Experiment::exp1_convergence: exp1_convergence(cfg, log); break;
    case Experiment::exp1_mu_sweep: exp1_mu_sweep(cfg, log); break;
    case Experiment::exp2_noflow: exp2_noflow(cfg, log); break;
    case Experiment::exp3_cylinder_dns: exp3_cylinder_dns(cfg, log); break;
    case Experiment::exp3_cylinder_da: exp3_cylinder_da(cfg, log); break;
    case Experiment::props: {
        const auto report = run_props(cfg, log);
        return report.all_passed() ? 0 : kPropertyFailure;
    }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Nudged Navier-Stokes finite element experiments"};
    std::string experiment;
    std::string config_path;
    std::vector<std::string> overrides;
    app.add_option("experiment", experiment,
                   "exp1_convergence | exp1_mu_sweep | exp2_noflow | exp3_cylinder_dns | exp3_cylinder_da | props")
        ->required();
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--set", overrides, "override one key (key=value); repeatable")->take_all();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        Config cfg = Config::defaults(parse_experiment(experiment));
        if (!config_path.empty()) cfg.load_file(config_path);
        for (const auto& o : overrides) cfg.set(std::string_view(o));
        return dispatch(cfg);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const NestingError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const UnknownTagError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kSolverError;
    }
}
