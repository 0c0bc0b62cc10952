#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rmlab/config.hpp"
#include "rmlab/error.hpp"
#include "rmlab/geometry.hpp"
#include "rmlab/io.hpp"
#include "rmlab/runner.hpp"
#include "rmlab/spectra.hpp"

namespace {

using nlohmann::json;

int exit_code_for(const rmlab::Error& e) {
    if (e.code() == "invalid-config" || e.code() == "io-error" ||
        e.code() == "parse-error")
        return static_cast<int>(rmlab::ExitStatus::InvalidConfig);
    if (e.code() == "underpowered")
        return static_cast<int>(rmlab::ExitStatus::Underpowered);
    return static_cast<int>(rmlab::ExitStatus::NumericFailure);
}

int run_command(const std::string& config_path) {
    const auto config = rmlab::ExperimentConfig::load_file(config_path);
    const rmlab::RunResult result = rmlab::run_experiment(config);
    std::cout << "wrote " << result.curve_path << "\n"
              << "wrote " << result.summary_path << "\n"
              << (result.all_passed ? "verdicts: pass" : "verdicts: fail") << "\n";
    return static_cast<int>(result.status);
}

int validate_command(const std::string& config_path) {
    rmlab::ExperimentConfig::load_file(config_path);
    std::cout << "ok\n";
    return 0;
}

int select_command(const std::string& matrix_path, int l, const std::string& method) {
    const rmlab::RealMatrix z = rmlab::read_matrix_csv(matrix_path);
    rmlab::SubsetSelection::Method m;
    if (method == "brute") m = rmlab::SubsetSelection::Method::BruteForce;
    else if (method == "greedy") m = rmlab::SubsetSelection::Method::Greedy;
    else throw rmlab::Error("invalid-config", "method must be brute or greedy");
    const rmlab::SubsetSelection sel = rmlab::ny_select(z, l, m);
    json out = {
        {"indices", sel.indices},
        {"sigma_min_restricted", sel.sigma_min_restricted},
        {"certified_bound", sel.certified_bound},
        {"bound_at_midpoint_r", sel.bound_at_midpoint_r},
        {"k0_used", sel.k0_used},
        {"method", method == "brute" ? "BruteForce" : "Greedy"},
    };
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"random matrix spectral crowding laboratory"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "config file")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a config without running");
    validate->add_option("config", validate_path, "config file")->required();

    auto* oracle = app.add_subcommand("oracle", "closed-form reference values");
    oracle->require_subcommand(1);
    double oracle_eps = 0.0;
    auto* edelman = oracle->add_subcommand("edelman", "least singular value CDF");
    edelman->add_option("--eps", oracle_eps, "scaled threshold")->required();
    std::string levy_dist;
    double levy_eps = 0.0;
    auto* levy = oracle->add_subcommand("levy", "Levy concentration p(eps)");
    levy->add_option("--dist", levy_dist, "gaussian|rademacher|uniform|bernoulli(p)")
        ->required();
    levy->add_option("--eps", levy_eps, "window half-width")->required();

    std::string matrix_path, select_method = "brute";
    int select_l = 1;
    auto* select = app.add_subcommand("select", "column subset selection from CSV");
    select->add_option("--matrix", matrix_path, "matrix CSV (header rows,cols)")
        ->required();
    select->add_option("--l", select_l, "number of columns to pick")->required();
    select->add_option("--method", select_method, "brute|greedy");

    auto* version = app.add_subcommand("version", "print version");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return run_command(config_path);
        if (validate->parsed()) return validate_command(validate_path);
        if (oracle->parsed()) {
            if (edelman->parsed()) {
                std::printf("%.10g\n", rmlab::edelman_cdf(oracle_eps));
                return 0;
            }
            if (levy->parsed()) {
                const auto dist = rmlab::parse_distribution(levy_dist);
                std::printf("%.10g\n", rmlab::levy_concentration(dist, levy_eps));
                return 0;
            }
        }
        if (select->parsed())
            return select_command(matrix_path, select_l, select_method);
        if (version->parsed()) {
            std::cout << "rmlab " << rmlab::kVersion << "\n";
            return 0;
        }
    } catch (const rmlab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return static_cast<int>(rmlab::ExitStatus::NumericFailure);
    }
    return 1;
}
