// SPDX-License-Identifier: Apache-2.0
//
// Channel and antenna model: array response vectors of the lens-fed antenna,
// the lens magnitude transform, and construction/validation of a multi-beam
// user deployment (N_RF RAMA groups x N_B beams, one user per cell).
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranoma/errors.hpp"

namespace ranoma {

inline constexpr double pi = 3.14159265358979323846;

// Uniform rectangular feed array. d0 and lambda share the same length unit.
struct ArrayGeometry {
    std::size_t n_ray_x = 1; // rays along x
    std::size_t n_ray_y = 1; // rays along y
    double d0 = 0.5;         // antenna spacing
    double lambda = 1.0;     // carrier wavelength

    std::size_t n_ray() const { return n_ray_x * n_ray_y; }
};

// Unit-norm steering vector; entries are stored row-major over (r, s):
// flat index = r * n_ray_y + s.
struct ArrayResponse {
    std::vector<std::complex<double>> entries;
    double theta = 0.0; // azimuth AoD, radians
    double phi = 0.0;   // elevation AoD, radians
};

// a(theta, phi) with entry (r, s) = (1/sqrt(N_ray)) * exp(-j*pi*psi_rs),
// psi_rs = (2*d0/lambda) * (r*sin(theta)*cos(phi) + s*sin(theta)*sin(phi)).
inline ArrayResponse array_response(double theta, double phi, const ArrayGeometry &geom) {
    if (geom.n_ray_x < 1 || geom.n_ray_y < 1)
        throw std::invalid_argument("array_response: ray counts must be >= 1");
    if (!(geom.d0 > 0.0) || !(geom.lambda > 0.0))
        throw std::invalid_argument("array_response: d0 and lambda must be positive");
    if (!std::isfinite(theta) || !std::isfinite(phi))
        throw std::invalid_argument("array_response: angles must be finite");

    const double spacing = 2.0 * geom.d0 / geom.lambda;
    const double ux = std::sin(theta) * std::cos(phi);
    const double uy = std::sin(theta) * std::sin(phi);
    const double scale = 1.0 / std::sqrt(static_cast<double>(geom.n_ray()));

    ArrayResponse a;
    a.theta = theta;
    a.phi = phi;
    a.entries.reserve(geom.n_ray());
    for (std::size_t r = 0; r < geom.n_ray_x; ++r) {
        for (std::size_t s = 0; s < geom.n_ray_y; ++s) {
            const double psi = spacing * (static_cast<double>(r) * ux + static_cast<double>(s) * uy);
            a.entries.push_back(std::polar(scale, -pi * psi));
        }
    }
    return a;
}

// The spherical lens collapses the plane wave h * a(theta, phi) to the
// magnitude of the wave; the result does not depend on the steering angles.
inline double lens_magnitude(std::complex<double> h, const ArrayResponse & /*a*/) {
    return std::abs(h);
}

// One user of the deployment. group/beam indices are 1-based, matching the
// (i, k) cell convention used throughout.
struct UserSpec {
    std::string user_id;
    int group = 0;          // RAMA group index i in {1..N_RF}
    int beam = 0;           // beam index k in {1..N_B}
    double gain_sq = 0.0;   // |h_ik|^2, linear, > 0
    double theta = 0.0;     // AoD azimuth, radians
    double phi = 0.0;       // AoD elevation, radians
    double min_rate = 0.0;  // required rate Rbar_ik, b/s/Hz
};

// The N_RF x N_B user grid. Invariants (enforced by make_deployment):
//   - exactly one user per (group, beam) cell;
//   - within each beam, gain_sq is nondecreasing in the group index;
//   - within each group, the gain spread across beams is at most
//     group_gain_tol_db when expressed in dB.
struct Deployment {
    std::size_t n_rf = 0;
    std::size_t n_b = 0;
    std::vector<UserSpec> users; // sorted by (group, beam)
    double noise_var = 1.0;      // sigma^2, linear
    double group_gain_tol_db = 1.0;

    const UserSpec &user(int group, int beam) const {
        if (group < 1 || static_cast<std::size_t>(group) > n_rf)
            throw std::invalid_argument("Deployment: group index " + std::to_string(group) +
                                        " out of range 1.." + std::to_string(n_rf));
        if (beam < 1 || static_cast<std::size_t>(beam) > n_b)
            throw std::invalid_argument("Deployment: beam index " + std::to_string(beam) +
                                        " out of range 1.." + std::to_string(n_b));
        return users[static_cast<std::size_t>(group - 1) * n_b + static_cast<std::size_t>(beam - 1)];
    }

    double gain_sq(int group, int beam) const { return user(group, beam).gain_sq; }
};

// Builds a validated Deployment. Nothing is sorted or fixed up silently:
// out-of-order gains within a beam are an error, not auto-corrected.
inline Deployment make_deployment(std::size_t n_rf, std::size_t n_b, std::vector<UserSpec> users,
                                  double noise_var, double group_gain_tol_db = 1.0) {
    if (n_rf < 1 || n_b < 1)
        throw ValidationError("deployment: n_rf and n_b must be >= 1");
    if (!(noise_var > 0.0) || !std::isfinite(noise_var))
        throw ValidationError("deployment: noise_var must be positive and finite");
    if (!(group_gain_tol_db >= 0.0))
        throw ValidationError("deployment: group_gain_tol_db must be >= 0");
    if (users.size() != n_rf * n_b) {
        std::ostringstream msg;
        msg << "deployment: expected " << n_rf * n_b << " users (one per cell), got " << users.size();
        throw ValidationError(msg.str());
    }

    for (const UserSpec &u : users) {
        if (u.group < 1 || static_cast<std::size_t>(u.group) > n_rf ||
            u.beam < 1 || static_cast<std::size_t>(u.beam) > n_b) {
            std::ostringstream msg;
            msg << "deployment: cell (group " << u.group << ", beam " << u.beam << ") out of range";
            throw ValidationError(msg.str());
        }
        if (!(u.gain_sq > 0.0) || !std::isfinite(u.gain_sq)) {
            std::ostringstream msg;
            msg << "deployment: cell (group " << u.group << ", beam " << u.beam
                << ") gain_sq must be positive and finite";
            throw ValidationError(msg.str());
        }
        if (!(u.min_rate >= 0.0) || !std::isfinite(u.min_rate)) {
            std::ostringstream msg;
            msg << "deployment: cell (group " << u.group << ", beam " << u.beam << ") min_rate must be >= 0";
            throw ValidationError(msg.str());
        }
    }

    // Exactly one user per cell.
    std::vector<int> count(n_rf * n_b, 0);
    for (const UserSpec &u : users)
        ++count[static_cast<std::size_t>(u.group - 1) * n_b + static_cast<std::size_t>(u.beam - 1)];
    for (std::size_t i = 0; i < n_rf; ++i) {
        for (std::size_t k = 0; k < n_b; ++k) {
            if (count[i * n_b + k] != 1) {
                std::ostringstream msg;
                msg << "deployment: cell (group " << i + 1 << ", beam " << k + 1 << ") "
                    << (count[i * n_b + k] == 0 ? "missing" : "duplicated");
                throw ValidationError(msg.str());
            }
        }
    }

    std::sort(users.begin(), users.end(), [](const UserSpec &a, const UserSpec &b) {
        return a.group != b.group ? a.group < b.group : a.beam < b.beam;
    });

    Deployment dep;
    dep.n_rf = n_rf;
    dep.n_b = n_b;
    dep.users = std::move(users);
    dep.noise_var = noise_var;
    dep.group_gain_tol_db = group_gain_tol_db;

    // Within each beam, gains must ascend with the group index.
    for (std::size_t k = 1; k <= n_b; ++k) {
        for (std::size_t i = 2; i <= n_rf; ++i) {
            const double lo = dep.gain_sq(static_cast<int>(i) - 1, static_cast<int>(k));
            const double hi = dep.gain_sq(static_cast<int>(i), static_cast<int>(k));
            if (hi < lo) {
                std::ostringstream msg;
                msg << "deployment: beam " << k << ": channel gains not ascending with group index"
                    << " (group " << i - 1 << " has " << lo << ", group " << i << " has " << hi << ")";
                throw ValidationError(msg.str());
            }
        }
    }

    // Within each group, gains across beams must be comparable.
    for (std::size_t i = 1; i <= n_rf; ++i) {
        double gmin = dep.gain_sq(static_cast<int>(i), 1);
        double gmax = gmin;
        for (std::size_t k = 2; k <= n_b; ++k) {
            const double g = dep.gain_sq(static_cast<int>(i), static_cast<int>(k));
            gmin = std::min(gmin, g);
            gmax = std::max(gmax, g);
        }
        const double spread_db = 10.0 * std::log10(gmax / gmin);
        if (spread_db > group_gain_tol_db + 1e-12) {
            std::ostringstream msg;
            msg << "deployment: group " << i << ": gain spread across beams is " << spread_db
                << " dB, exceeds tolerance " << group_gain_tol_db << " dB";
            throw ValidationError(msg.str());
        }
    }

    return dep;
}

} // namespace ranoma
