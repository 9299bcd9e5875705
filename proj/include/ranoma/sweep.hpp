// SPDX-License-Identifier: Apache-2.0
//
// SNR sweep across techniques and deterministic CSV emission. One row per
// (SNR point, technique), ordered by (snr_db, technique); infeasible RA-NOMA
// points are emitted with feasible=false and a blank rate so curves start at
// the feasibility threshold instead of aborting the sweep.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ranoma/allocator.hpp"
#include "ranoma/baselines.hpp"
#include "ranoma/config.hpp"

namespace ranoma {

struct SweepRow {
    double snr_db = 0.0;
    Technique technique = Technique::oma;
    std::optional<double> sum_rate_bps_hz; // empty when RA-NOMA is infeasible
    bool feasible = true;
    std::optional<double> min_total_power; // RA-NOMA rows only
};

// Tolerance of the closed-form vs numeric cross-check in solver_mode=both.
inline constexpr double solver_agreement_tol = 1e-6;

inline std::vector<SweepRow> run_sweep(const ScenarioConfig &cfg) {
    const Deployment dep = build_deployment(cfg);

    const SweepGrid &grid = cfg.sweep;
    const auto n_points = static_cast<std::size_t>(
        std::floor((grid.snr_stop_db - grid.snr_start_db) / grid.snr_step_db + 1e-9)) + 1;

    // Fixed enum order keeps rows deterministic regardless of config order.
    std::vector<Technique> techniques;
    for (Technique t : {Technique::oma, Technique::rama_oma, Technique::ra_noma})
        for (Technique want : cfg.techniques)
            if (want == t && (techniques.empty() || techniques.back() != t))
                techniques.push_back(t);

    std::vector<SweepRow> rows;
    rows.reserve(n_points * techniques.size());
    for (std::size_t jpt = 0; jpt < n_points; ++jpt) {
        const double snr_db = grid.snr_start_db + static_cast<double>(jpt) * grid.snr_step_db;
        const double p_max = dep.noise_var * std::pow(10.0, snr_db / 10.0);
        for (Technique t : techniques) {
            SweepRow row;
            row.snr_db = snr_db;
            row.technique = t;
            switch (t) {
            case Technique::oma:
                row.sum_rate_bps_hz = oma_sum_rate(dep, p_max);
                break;
            case Technique::rama_oma:
                row.sum_rate_bps_hz = rama_oma_sum_rate(dep, p_max);
                break;
            case Technique::ra_noma: {
                const BeamProblem bp = reduce_beams(dep, p_max);
                const FeasibilityReport fr = feasibility(bp);
                row.min_total_power = fr.min_total_power;
                row.feasible = fr.feasible;
                if (!fr.feasible)
                    break;
                double beam_rate = 0.0;
                if (cfg.solver_mode == SolverMode::numeric) {
                    beam_rate = solve_numeric(bp).beam_sum_rate;
                } else {
                    const AllocationResult closed = solve_closed_form(bp);
                    beam_rate = closed.beam_sum_rate;
                    if (cfg.solver_mode == SolverMode::both) {
                        const AllocationResult numeric = solve_numeric(bp);
                        const double diff = std::fabs(closed.beam_sum_rate - numeric.beam_sum_rate);
                        if (diff > solver_agreement_tol) {
                            std::ostringstream msg;
                            msg << "sweep: closed-form and numeric solvers disagree at snr_db=" << snr_db
                                << ": " << closed.beam_sum_rate << " vs " << numeric.beam_sum_rate
                                << " (|diff|=" << diff << " > " << solver_agreement_tol << ")";
                            throw SolverDisagreement(msg.str());
                        }
                    }
                }
                row.sum_rate_bps_hz = beam_rate * static_cast<double>(dep.n_b);
                break;
            }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

namespace detail {

inline std::string format_fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

} // namespace detail

// CSV with header snr_db,technique,sum_rate_bps_hz,feasible,min_total_power;
// decimals carry six fractional digits, absent values are blank fields. The
// output is byte-for-byte deterministic for identical inputs.
inline std::string csv_string(const std::vector<SweepRow> &rows) {
    if (rows.empty())
        throw std::invalid_argument("emit_csv: no rows");
    std::string out = "snr_db,technique,sum_rate_bps_hz,feasible,min_total_power\n";
    for (const SweepRow &row : rows) {
        out += detail::format_fixed6(row.snr_db);
        out += ',';
        out += technique_name(row.technique);
        out += ',';
        if (row.sum_rate_bps_hz)
            out += detail::format_fixed6(*row.sum_rate_bps_hz);
        out += ',';
        out += row.feasible ? "true" : "false";
        out += ',';
        if (row.min_total_power)
            out += detail::format_fixed6(*row.min_total_power);
        out += '\n';
    }
    return out;
}

inline void emit_csv(const std::vector<SweepRow> &rows, const std::string &path) {
    const std::string body = csv_string(rows); // validates before touching the file
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
    out << body;
    out.flush();
    if (!out)
        throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

} // namespace ranoma
