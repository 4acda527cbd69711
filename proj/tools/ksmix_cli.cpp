#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ksmix/config.hpp"
#include "ksmix/errors.hpp"
#include "ksmix/maxprinciple.hpp"
#include "ksmix/scenario.hpp"
#include "ksmix/verify.hpp"

namespace {

int cmd_run(const std::string& path, bool keep_sweep) {
    ksmix::Scenario sc = ksmix::parse_config(path);
    if (!keep_sweep) sc.sweep.reset();  // `run` executes the base point only
    const ksmix::ScenarioResult res = ksmix::run_scenario(sc);
    std::printf("outputs: %s\n", res.out_dir.c_str());
    return res.exit_code;
}

int cmd_check_maxprinciple(double alpha, int d, double p, int trials, std::uint64_t seed) {
    const ksmix::FalsifyReport rep = ksmix::falsify(alpha, d, p, trials, seed);
    std::printf("%s\n", ksmix::falsify_report_json(rep).c_str());
    return (rep.violations == 0 && rep.dichotomy_failures == 0) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pseudo-spectral Keller-Segel simulator with fractional dissipation, "
                 "amplified advection, and a numerical-verification harness"};
    app.require_subcommand(1);

    std::string run_config, sweep_config, transport_config;
    auto* run = app.add_subcommand("run", "integrate the base configuration of a scenario file");
    run->add_option("config", run_config, "scenario JSON path")->required();

    auto* sweep = app.add_subcommand("sweep", "run a scenario including its parameter sweep");
    sweep->add_option("config", sweep_config, "scenario JSON path")->required();

    std::string filter;
    auto* verify = app.add_subcommand("verify", "run the property-check battery");
    verify->add_option("--filter", filter, "run only checks whose name contains this substring");

    double mp_alpha = 1.0, mp_p = 1.0;
    int mp_d = 1, mp_trials = 1000;
    std::uint64_t mp_seed = 20240515;
    auto* mp = app.add_subcommand("check-maxprinciple",
                                  "falsification battery for the maximum-principle dichotomy");
    mp->add_option("--alpha", mp_alpha, "dissipation order, (0,2)");
    mp->add_option("--d", mp_d, "dimension, 1..3");
    mp->add_option("--p", mp_p, "Lebesgue exponent, >= 1");
    mp->add_option("--trials", mp_trials, "battery size");
    mp->add_option("--seed", mp_seed, "RNG seed");

    auto* transport = app.add_subcommand("transport", "pure advection of the scenario's initial datum");
    transport->add_option("config", transport_config, "scenario JSON path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_config, false);
        if (sweep->parsed()) return cmd_run(sweep_config, true);
        if (verify->parsed()) return ksmix::verify::run_battery(filter, std::cout);
        if (mp->parsed()) return cmd_check_maxprinciple(mp_alpha, mp_d, mp_p, mp_trials, mp_seed);
        if (transport->parsed()) return ksmix::run_transport_scenario(ksmix::parse_config(transport_config));
    } catch (const ksmix::config_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ksmix::io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
