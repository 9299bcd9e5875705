// SPDX-License-Identifier: Apache-2.0
//
// Scenario configuration: JSON schema, parsing/serialization, and conversion
// to a validated Deployment. Configs are human-facing, so gains are given as
// |h|^2/sigma^2 in dB and AoDs in degrees; the math core works in linear
// units and radians.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ranoma/baselines.hpp"
#include "ranoma/errors.hpp"
#include "ranoma/model.hpp"

namespace ranoma {

struct SweepGrid {
    double snr_start_db = 0.0;
    double snr_stop_db = 0.0;
    double snr_step_db = 1.0;

    bool operator==(const SweepGrid &) const = default;
};

enum class SolverMode { closed_form, numeric, both };

inline std::string_view solver_mode_name(SolverMode m) {
    switch (m) {
    case SolverMode::closed_form:
        return "closed_form";
    case SolverMode::numeric:
        return "numeric";
    case SolverMode::both:
        return "both";
    }
    throw std::invalid_argument("solver_mode_name: unknown mode");
}

struct UserConfig {
    std::string id;
    int group = 0;
    int beam = 0;
    double gain_db = 0.0;  // |h|^2 / sigma^2, dB
    double min_rate = 0.0; // b/s/Hz
    std::optional<std::array<double, 2>> aod_deg; // (theta, phi), degrees

    bool operator==(const UserConfig &) const = default;
};

struct ScenarioConfig {
    std::size_t n_rf = 0;
    std::size_t n_b = 0;
    std::vector<UserConfig> users;
    double noise_var = 1.0;
    double group_gain_tol_db = 1.0;
    SweepGrid sweep;
    std::vector<Technique> techniques;
    SolverMode solver_mode = SolverMode::closed_form;

    bool operator==(const ScenarioConfig &) const = default;
};

namespace detail {

inline double require_number(const nlohmann::json &j, const std::string &key) {
    if (!j.contains(key))
        throw ValidationError("config: missing field '" + key + "'");
    if (!j[key].is_number())
        throw ValidationError("config: field '" + key + "' must be a number");
    return j[key].get<double>();
}

inline int require_int(const nlohmann::json &j, const std::string &key) {
    if (!j.contains(key) || !j[key].is_number_integer())
        throw ValidationError("config: field '" + key + "' must be an integer");
    return j[key].get<int>();
}

} // namespace detail

inline ScenarioConfig parse_config_json(const nlohmann::json &j) {
    ScenarioConfig cfg;
    const int n_rf = detail::require_int(j, "n_rf");
    const int n_b = detail::require_int(j, "n_b");
    if (n_rf < 1 || n_b < 1)
        throw ValidationError("config: n_rf and n_b must be >= 1");
    cfg.n_rf = static_cast<std::size_t>(n_rf);
    cfg.n_b = static_cast<std::size_t>(n_b);

    if (j.contains("noise_var")) {
        cfg.noise_var = detail::require_number(j, "noise_var");
        if (!(cfg.noise_var > 0.0))
            throw ValidationError("config: noise_var must be positive");
    }
    if (j.contains("group_gain_tol_db")) {
        cfg.group_gain_tol_db = detail::require_number(j, "group_gain_tol_db");
        if (!(cfg.group_gain_tol_db >= 0.0))
            throw ValidationError("config: group_gain_tol_db must be >= 0");
    }

    if (!j.contains("users") || !j["users"].is_array() || j["users"].empty())
        throw ValidationError("config: field 'users' must be a nonempty array");
    for (const auto &ju : j["users"]) {
        UserConfig u;
        u.group = detail::require_int(ju, "group");
        u.beam = detail::require_int(ju, "beam");
        u.gain_db = detail::require_number(ju, "gain_db");
        u.min_rate = detail::require_number(ju, "min_rate");
        if (!(u.min_rate >= 0.0))
            throw ValidationError("config: users[].min_rate must be >= 0 (group " +
                                  std::to_string(u.group) + ", beam " + std::to_string(u.beam) + ")");
        if (ju.contains("id")) {
            if (!ju["id"].is_string())
                throw ValidationError("config: users[].id must be a string");
            u.id = ju["id"].get<std::string>();
        } else {
            u.id = "g" + std::to_string(u.group) + "b" + std::to_string(u.beam);
        }
        if (ju.contains("aod_deg")) {
            const auto &ja = ju["aod_deg"];
            if (!ja.is_array() || ja.size() != 2 || !ja[0].is_number() || !ja[1].is_number())
                throw ValidationError("config: users[].aod_deg must be [theta_deg, phi_deg]");
            u.aod_deg = {ja[0].get<double>(), ja[1].get<double>()};
        }
        if (u.group < 1 || u.group > n_rf || u.beam < 1 || u.beam > n_b)
            throw ValidationError("config: users[] cell (group " + std::to_string(u.group) +
                                  ", beam " + std::to_string(u.beam) + ") out of range");
        cfg.users.push_back(std::move(u));
    }

    // Exactly one user per (group, beam) cell.
    std::vector<int> count(cfg.n_rf * cfg.n_b, 0);
    for (const UserConfig &u : cfg.users)
        ++count[static_cast<std::size_t>(u.group - 1) * cfg.n_b + static_cast<std::size_t>(u.beam - 1)];
    for (std::size_t i = 0; i < cfg.n_rf; ++i)
        for (std::size_t k = 0; k < cfg.n_b; ++k)
            if (count[i * cfg.n_b + k] != 1)
                throw ValidationError("config: users[] cell (group " + std::to_string(i + 1) + ", beam " +
                                      std::to_string(k + 1) + ") " +
                                      (count[i * cfg.n_b + k] == 0 ? "missing" : "duplicated"));

    if (!j.contains("sweep") || !j["sweep"].is_object())
        throw ValidationError("config: field 'sweep' must be an object");
    cfg.sweep.snr_start_db = detail::require_number(j["sweep"], "snr_start_db");
    cfg.sweep.snr_stop_db = detail::require_number(j["sweep"], "snr_stop_db");
    cfg.sweep.snr_step_db = detail::require_number(j["sweep"], "snr_step_db");
    if (!(cfg.sweep.snr_step_db > 0.0))
        throw ValidationError("config: sweep.snr_step_db must be > 0");
    if (cfg.sweep.snr_start_db > cfg.sweep.snr_stop_db)
        throw ValidationError("config: sweep.snr_start_db must be <= sweep.snr_stop_db");

    if (!j.contains("techniques") || !j["techniques"].is_array() || j["techniques"].empty())
        throw ValidationError("config: field 'techniques' must be a nonempty array");
    for (const auto &jt : j["techniques"]) {
        if (!jt.is_string())
            throw ValidationError("config: techniques[] entries must be strings");
        const auto t = technique_from_name(jt.get<std::string>());
        if (!t)
            throw ValidationError("config: unknown technique '" + jt.get<std::string>() +
                                  "' (expected OMA, RAMA-OMA, or RA-NOMA)");
        cfg.techniques.push_back(*t);
    }

    if (j.contains("solver_mode")) {
        if (!j["solver_mode"].is_string())
            throw ValidationError("config: solver_mode must be a string");
        const std::string m = j["solver_mode"].get<std::string>();
        if (m == "closed_form")
            cfg.solver_mode = SolverMode::closed_form;
        else if (m == "numeric")
            cfg.solver_mode = SolverMode::numeric;
        else if (m == "both")
            cfg.solver_mode = SolverMode::both;
        else
            throw ValidationError("config: unknown solver_mode '" + m +
                                  "' (expected closed_form, numeric, or both)");
    }
    return cfg;
}

inline ScenarioConfig parse_config_text(const std::string &text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error &err) {
        throw ValidationError(std::string("config: ") + err.what());
    }
    return parse_config_json(j);
}

inline ScenarioConfig parse_config(const std::string &path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError("config: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &err) {
        throw ValidationError("config: " + path + ": " + err.what());
    }
    return parse_config_json(j);
}

inline nlohmann::json to_json(const ScenarioConfig &cfg) {
    nlohmann::json j;
    j["n_rf"] = cfg.n_rf;
    j["n_b"] = cfg.n_b;
    j["noise_var"] = cfg.noise_var;
    j["group_gain_tol_db"] = cfg.group_gain_tol_db;
    j["users"] = nlohmann::json::array();
    for (const UserConfig &u : cfg.users) {
        nlohmann::json ju;
        ju["id"] = u.id;
        ju["group"] = u.group;
        ju["beam"] = u.beam;
        ju["gain_db"] = u.gain_db;
        ju["min_rate"] = u.min_rate;
        if (u.aod_deg)
            ju["aod_deg"] = {(*u.aod_deg)[0], (*u.aod_deg)[1]};
        j["users"].push_back(std::move(ju));
    }
    j["sweep"] = {{"snr_start_db", cfg.sweep.snr_start_db},
                  {"snr_stop_db", cfg.sweep.snr_stop_db},
                  {"snr_step_db", cfg.sweep.snr_step_db}};
    j["techniques"] = nlohmann::json::array();
    for (Technique t : cfg.techniques)
        j["techniques"].push_back(std::string(technique_name(t)));
    j["solver_mode"] = std::string(solver_mode_name(cfg.solver_mode));
    return j;
}

inline std::string serialize_config(const ScenarioConfig &cfg) { return to_json(cfg).dump(2) + "\n"; }

// Converts the parsed config into a validated Deployment: gain_db is
// |h|^2/sigma^2, so the linear gain is noise_var * 10^(gain_db/10); AoDs
// default to boresight when omitted.
inline Deployment build_deployment(const ScenarioConfig &cfg) {
    std::vector<UserSpec> users;
    users.reserve(cfg.users.size());
    for (const UserConfig &u : cfg.users) {
        UserSpec spec;
        spec.user_id = u.id;
        spec.group = u.group;
        spec.beam = u.beam;
        spec.gain_sq = cfg.noise_var * std::pow(10.0, u.gain_db / 10.0);
        spec.min_rate = u.min_rate;
        if (u.aod_deg) {
            spec.theta = (*u.aod_deg)[0] * pi / 180.0;
            spec.phi = (*u.aod_deg)[1] * pi / 180.0;
        }
        users.push_back(std::move(spec));
    }
    return make_deployment(cfg.n_rf, cfg.n_b, std::move(users), cfg.noise_var, cfg.group_gain_tol_db);
}

} // namespace ranoma
