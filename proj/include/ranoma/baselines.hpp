// SPDX-License-Identifier: Apache-2.0
//
// Comparison schemes evaluated under per-time-slot normalization: the full
// budget is available in each slot and the aggregate over the frame is
// divided by the slot count.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "ranoma/model.hpp"

namespace ranoma {

enum class Technique { oma, rama_oma, ra_noma };

inline std::string_view technique_name(Technique t) {
    switch (t) {
    case Technique::oma:
        return "OMA";
    case Technique::rama_oma:
        return "RAMA-OMA";
    case Technique::ra_noma:
        return "RA-NOMA";
    }
    throw std::invalid_argument("technique_name: unknown technique");
}

inline std::optional<Technique> technique_from_name(std::string_view name) {
    if (name == "OMA")
        return Technique::oma;
    if (name == "RAMA-OMA")
        return Technique::rama_oma;
    if (name == "RA-NOMA")
        return Technique::ra_noma;
    return std::nullopt;
}

// RF chains and time slots needed to serve the whole deployment.
struct ResourceAccount {
    Technique technique = Technique::oma;
    std::size_t rf_chains = 0;
    std::size_t time_slots = 0;
};

// OMA: one user per slot with the full budget, N_RF * N_B slots.
inline double oma_sum_rate(const Deployment &dep, double p_max) {
    if (!(p_max >= 0.0))
        throw std::invalid_argument("oma_sum_rate: p_max must be >= 0");
    double total = 0.0;
    for (const UserSpec &u : dep.users)
        total += std::log2(1.0 + p_max * u.gain_sq / dep.noise_var);
    return total / static_cast<double>(dep.n_rf * dep.n_b);
}

// RAMA-OMA: slot i serves the N_B users of RAMA group i simultaneously, the
// budget split equally across beams; N_RF slots.
inline double rama_oma_sum_rate(const Deployment &dep, double p_max) {
    if (!(p_max >= 0.0))
        throw std::invalid_argument("rama_oma_sum_rate: p_max must be >= 0");
    const double per_beam = p_max / static_cast<double>(dep.n_b);
    double total = 0.0;
    for (const UserSpec &u : dep.users)
        total += std::log2(1.0 + per_beam * u.gain_sq / dep.noise_var);
    return total / static_cast<double>(dep.n_rf);
}

inline ResourceAccount resource_accounting(Technique t, const Deployment &dep) {
    ResourceAccount acc;
    acc.technique = t;
    switch (t) {
    case Technique::oma:
        acc.rf_chains = 1;
        acc.time_slots = dep.n_rf * dep.n_b;
        break;
    case Technique::rama_oma:
        acc.rf_chains = 1;
        acc.time_slots = dep.n_rf;
        break;
    case Technique::ra_noma:
        acc.rf_chains = dep.n_rf;
        acc.time_slots = 1;
        break;
    }
    return acc;
}

} // namespace ranoma
