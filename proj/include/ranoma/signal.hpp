// SPDX-License-Identifier: Apache-2.0
//
// Symbol-level signal construction: phase-detector offsets and per-group
// phase vectors, per-beam superposition coding, and the decomposition of the
// received signal into intended / intra-beam interference / noise powers.
// Inter-beam interference is absent by construction (directional beams).
#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranoma/model.hpp"

namespace ranoma {

// Intended PSK symbols of one RAMA group, s_i = [s_i1, ..., s_iNB].
// All entries are expected to be unit modulus (E[|s|^2] = 1).
struct GroupSymbols {
    int group = 0;
    std::vector<std::complex<double>> symbols;
};

// Phase-detector output for one group: offsets are the phase differences
// of s_ik relative to s_i1 (k = 2..N_B), wrapped to (-pi, pi], and
// w = [1, e^{j*offset_2}, ...] reconstructs s_i from s_i1.
struct PhaseVector {
    int group = 0;
    std::vector<double> offsets;             // length N_B - 1
    std::vector<std::complex<double>> w;     // length N_B, w[0] == 1
};

namespace detail {

inline double wrap_phase(double x) {
    // remainder() lands in [-pi, pi]; move -pi to +pi for (-pi, pi].
    double r = std::remainder(x, 2.0 * pi);
    if (r <= -pi)
        r += 2.0 * pi;
    return r;
}

} // namespace detail

inline PhaseVector phase_offsets(const GroupSymbols &sym) {
    if (sym.symbols.empty())
        throw std::invalid_argument("phase_offsets: empty symbol vector");
    for (std::size_t k = 0; k < sym.symbols.size(); ++k) {
        const double mag = std::abs(sym.symbols[k]);
        if (mag == 0.0)
            throw std::invalid_argument("phase_offsets: symbol " + std::to_string(k + 1) +
                                        " has zero magnitude");
        if (std::abs(mag - 1.0) > 1e-9)
            throw std::invalid_argument("phase_offsets: symbol " + std::to_string(k + 1) +
                                        " is not unit modulus");
    }

    PhaseVector pv;
    pv.group = sym.group;
    pv.w.reserve(sym.symbols.size());
    pv.w.emplace_back(1.0, 0.0);
    const double ref = std::arg(sym.symbols.front());
    for (std::size_t k = 1; k < sym.symbols.size(); ++k) {
        const double dtheta = detail::wrap_phase(std::arg(sym.symbols[k]) - ref);
        pv.offsets.push_back(dtheta);
        pv.w.push_back(std::polar(1.0, dtheta));
    }
    return pv;
}

// Superposition-coded signal of one beam: terms[i] = sqrt(alpha * p_i) * s_ik.
struct BeamComposite {
    int beam = 0;
    std::vector<std::complex<double>> terms;
    std::complex<double> composite;
};

inline std::vector<BeamComposite> beam_superposition(const std::vector<GroupSymbols> &symbols_per_group,
                                                     const std::vector<double> &powers, double alpha) {
    if (symbols_per_group.empty())
        throw std::invalid_argument("beam_superposition: no groups");
    if (powers.size() != symbols_per_group.size())
        throw std::invalid_argument("beam_superposition: power vector length " +
                                    std::to_string(powers.size()) + " does not match group count " +
                                    std::to_string(symbols_per_group.size()));
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("beam_superposition: alpha must be in (0, 1]");
    const std::size_t n_b = symbols_per_group.front().symbols.size();
    for (const GroupSymbols &g : symbols_per_group)
        if (g.symbols.size() != n_b)
            throw std::invalid_argument("beam_superposition: groups have differing symbol counts");
    for (double p : powers)
        if (!(p >= 0.0))
            throw std::invalid_argument("beam_superposition: powers must be nonnegative");

    std::vector<BeamComposite> beams(n_b);
    for (std::size_t k = 0; k < n_b; ++k) {
        BeamComposite &bc = beams[k];
        bc.beam = static_cast<int>(k) + 1;
        bc.terms.reserve(powers.size());
        std::complex<double> sum{0.0, 0.0};
        for (std::size_t i = 0; i < powers.size(); ++i) {
            const std::complex<double> term = std::sqrt(alpha * powers[i]) * symbols_per_group[i].symbols[k];
            bc.terms.push_back(term);
            sum += term;
        }
        bc.composite = sum;
    }
    return beams;
}

// The three power terms of the received signal at user (i, k), before SIC:
// intended alpha*p_i*|h_ik|^2, intra-beam interference |h_ik|^2 * sum_{l != i} alpha*p_l,
// and the noise variance.
struct ReceivedDecomposition {
    double intended_power = 0.0;
    double intra_beam_interference_power = 0.0;
    double noise_var = 0.0;
};

inline ReceivedDecomposition decompose_received(int group, int beam, const std::vector<double> &powers,
                                                double alpha, const Deployment &dep) {
    if (powers.size() != dep.n_rf)
        throw std::invalid_argument("decompose_received: power vector length must equal n_rf");
    for (double p : powers)
        if (!(p >= 0.0))
            throw std::invalid_argument("decompose_received: powers must be nonnegative");
    const double g = dep.gain_sq(group, beam); // validates indices
    double others = 0.0;
    for (std::size_t l = 0; l < powers.size(); ++l)
        if (l != static_cast<std::size_t>(group - 1))
            others += powers[l];

    ReceivedDecomposition rd;
    rd.intended_power = alpha * powers[static_cast<std::size_t>(group - 1)] * g;
    rd.intra_beam_interference_power = g * alpha * others;
    rd.noise_var = dep.noise_var;
    return rd;
}

// Post-SIC SINR of user (i, k): successive detection runs in descending gain
// order, so only groups l > i remain as interference:
//   alpha*p_i*|h_ik|^2 / (|h_ik|^2 * sum_{l > i} alpha*p_l + sigma^2).
inline double post_sic_sinr(int group, int beam, const std::vector<double> &powers, double alpha,
                            const Deployment &dep) {
    if (powers.size() != dep.n_rf)
        throw std::invalid_argument("post_sic_sinr: power vector length must equal n_rf");
    const double g = dep.gain_sq(group, beam);
    double residual = 0.0;
    for (std::size_t l = static_cast<std::size_t>(group); l < powers.size(); ++l)
        residual += powers[l];
    return alpha * powers[static_cast<std::size_t>(group - 1)] * g / (g * alpha * residual + dep.noise_var);
}

} // namespace ranoma
