#include "vpbgk/errors.hpp"
#include "vpbgk/runner.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Vlasov-Poisson-BGK kinetic / drift-diffusion / hybrid solver"};
    app.require_subcommand(1);

    std::string config_file;
    std::vector<std::string> overrides;
    bool quiet = false;
    auto* run_cmd = app.add_subcommand("run", "Run a simulation from a config file");
    run_cmd->add_option("config", config_file, "key = value config file")->required()->check(CLI::ExistingFile);
    run_cmd->add_option("--override", overrides, "key=value applied after the file (repeatable)");
    run_cmd->add_flag("--quiet", quiet, "Suppress progress lines");

    std::string dir_a, dir_b;
    auto* cmp_cmd = app.add_subcommand("compare", "Compare two finished run directories");
    cmp_cmd->add_option("run_a", dir_a, "First run directory")->required()->check(CLI::ExistingDirectory);
    cmp_cmd->add_option("run_b", dir_b, "Second run directory")->required()->check(CLI::ExistingDirectory);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run_cmd) {
            const vpbgk::RunConfig config = vpbgk::load_config(config_file, overrides);
            vpbgk::RunOptions options;
            options.progress = quiet ? nullptr : &std::cerr;
            const auto summary = vpbgk::run(config, options);
            if (!quiet) {
                std::cerr << "finished " << summary.steps << " steps at t = " << summary.t_final
                          << ", outputs in " << config.output_dir << '\n';
            }
        } else if (*cmp_cmd) {
            vpbgk::print_report(vpbgk::compare_runs(dir_a, dir_b), std::cout);
        }
    } catch (const vpbgk::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const vpbgk::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
