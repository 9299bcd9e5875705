// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: SNR sweeps to CSV, the feasibility threshold, and
// the per-technique resource accounting.
//
// Exit codes: 0 success, 2 validation error, 3 RA-NOMA infeasible at every
// sweep point, 4 closed-form/numeric solver disagreement, 1 other failure.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ranoma/allocator.hpp"
#include "ranoma/baselines.hpp"
#include "ranoma/config.hpp"
#include "ranoma/sweep.hpp"

namespace {

int run_sweep_cmd(const std::string &config_path, const std::string &out_path,
                  const std::string &solver_flag) {
    ranoma::ScenarioConfig cfg = ranoma::parse_config(config_path);
    if (solver_flag == "closed")
        cfg.solver_mode = ranoma::SolverMode::closed_form;
    else if (solver_flag == "numeric")
        cfg.solver_mode = ranoma::SolverMode::numeric;
    else if (solver_flag == "both")
        cfg.solver_mode = ranoma::SolverMode::both;

    const std::vector<ranoma::SweepRow> rows = ranoma::run_sweep(cfg);
    ranoma::emit_csv(rows, out_path);

    bool ra_noma_requested = false;
    bool any_feasible = false;
    for (const ranoma::SweepRow &row : rows) {
        if (row.technique == ranoma::Technique::ra_noma) {
            ra_noma_requested = true;
            any_feasible = any_feasible || row.feasible;
        }
    }
    std::cout << "wrote " << rows.size() << " rows to " << out_path << "\n";
    if (ra_noma_requested && !any_feasible) {
        std::cerr << "ranoma: RA-NOMA is infeasible at every sweep point\n";
        return 3;
    }
    return 0;
}

int run_feasibility_cmd(const std::string &config_path) {
    const ranoma::ScenarioConfig cfg = ranoma::parse_config(config_path);
    const ranoma::Deployment dep = ranoma::build_deployment(cfg);
    // The minimum total power does not depend on the budget; any positive
    // placeholder works here.
    const ranoma::BeamProblem bp = ranoma::reduce_beams(dep, 1.0);
    const ranoma::FeasibilityReport fr = ranoma::feasibility(bp);
    const double threshold_db = 10.0 * std::log10(fr.min_total_power / dep.noise_var);
    std::printf("min_total_power=%.6f\n", fr.min_total_power);
    std::printf("threshold_snr_db=%.6f\n", threshold_db);
    return 0;
}

int run_table1_cmd(const std::string &config_path) {
    const ranoma::ScenarioConfig cfg = ranoma::parse_config(config_path);
    const ranoma::Deployment dep = ranoma::build_deployment(cfg);
    std::cout << "technique,rf_chains,time_slots\n";
    for (ranoma::Technique t :
         {ranoma::Technique::oma, ranoma::Technique::rama_oma, ranoma::Technique::ra_noma}) {
        const ranoma::ResourceAccount acc = ranoma::resource_accounting(t, dep);
        std::cout << ranoma::technique_name(t) << "," << acc.rf_chains << "," << acc.time_slots << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"RA-NOMA multi-beam power allocation simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    std::string solver_flag;

    CLI::App *sweep = app.add_subcommand("sweep", "run the SNR sweep and write a CSV");
    sweep->add_option("--config", config_path, "scenario config (JSON)")->required();
    sweep->add_option("--out", out_path, "output CSV path")->required();
    sweep->add_option("--solver", solver_flag, "override solver mode")
        ->check(CLI::IsMember({"closed", "numeric", "both"}));

    CLI::App *feas = app.add_subcommand("feasibility", "print the minimum-power threshold");
    feas->add_option("--config", config_path, "scenario config (JSON)")->required();

    CLI::App *table1 = app.add_subcommand("table1", "print RF chain / time slot accounting");
    table1->add_option("--config", config_path, "scenario config (JSON)")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (sweep->parsed())
            return run_sweep_cmd(config_path, out_path, solver_flag);
        if (feas->parsed())
            return run_feasibility_cmd(config_path);
        if (table1->parsed())
            return run_table1_cmd(config_path);
    } catch (const ranoma::SolverDisagreement &err) {
        std::cerr << "ranoma: " << err.what() << "\n";
        return 4;
    } catch (const ranoma::ValidationError &err) {
        std::cerr << "ranoma: " << err.what() << "\n";
        return 2;
    } catch (const std::exception &err) {
        std::cerr << "ranoma: " << err.what() << "\n";
        return 1;
    }
    return 0;
}
