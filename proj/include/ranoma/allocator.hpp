// SPDX-License-Identifier: Apache-2.0
//
// Power allocation core for one beam of the multi-beam NOMA downlink.
//
// With gains sorted ascending and per-group rate floors, the sum-rate
// maximization under a total power budget is convex. Two solvers are
// provided on purpose:
//   * solve_closed_form: the KKT solution (rate-floor constraints tight for
//     all groups but the strongest, budget tight), recovered by backward
//     substitution;
//   * solve_numeric: an interior-point (log-barrier Newton) ascent that
//     shares no code path with the closed form and acts as its oracle.
#pragma once

#include <cmath>
#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "ranoma/errors.hpp"
#include "ranoma/model.hpp"

namespace ranoma {

// The single-beam problem produced by reduce_beams: effective gains per
// group (ascending), per-group rate floors Rbar_i = max_k Rbar_ik, the
// splitter share alpha = 1/N_B, noise variance and the power budget.
struct BeamProblem {
    std::size_t n_rf = 0;
    std::vector<double> gains_sq;    // |h_i|^2, ascending, > 0
    std::vector<double> rate_floors; // Rbar_i, b/s/Hz, >= 0
    double alpha = 1.0;              // 1/N_B, in (0, 1]
    double noise_var = 1.0;          // sigma^2, > 0
    double p_max = 0.0;              // total power budget, linear
};

inline void validate(const BeamProblem &bp) {
    if (bp.n_rf < 1 || bp.gains_sq.size() != bp.n_rf || bp.rate_floors.size() != bp.n_rf)
        throw std::invalid_argument("BeamProblem: inconsistent sizes");
    for (std::size_t i = 0; i < bp.n_rf; ++i) {
        if (!(bp.gains_sq[i] > 0.0) || !std::isfinite(bp.gains_sq[i]))
            throw std::invalid_argument("BeamProblem: gains must be positive and finite");
        if (i > 0 && bp.gains_sq[i] < bp.gains_sq[i - 1])
            throw std::invalid_argument("BeamProblem: gains must be nondecreasing");
        if (!(bp.rate_floors[i] >= 0.0) || !std::isfinite(bp.rate_floors[i]))
            throw std::invalid_argument("BeamProblem: rate floors must be >= 0");
    }
    if (!(bp.alpha > 0.0) || bp.alpha > 1.0)
        throw std::invalid_argument("BeamProblem: alpha must be in (0, 1]");
    if (!(bp.noise_var > 0.0))
        throw std::invalid_argument("BeamProblem: noise_var must be positive");
    if (!(bp.p_max > 0.0))
        throw std::invalid_argument("BeamProblem: p_max must be positive");
}

// Result of the minimum-power recursion and the feasibility test.
struct FeasibilityReport {
    double min_total_power = 0.0;   // ||p*||_1
    bool feasible = false;          // min_total_power <= p_max (equality feasible)
    std::vector<double> min_powers; // p*
};

// Lagrange multipliers of the solved problem. gamma belongs to the total
// power constraint, betas to the per-group rate floors. boundary_case is
// true when p_max equals the minimum feasible total power, i.e. every rate
// constraint is tight. At that boundary the multipliers are not unique; the
// reported betas are the minimal certificate (beta of the strongest group
// set to zero), which still satisfies stationarity.
struct KKTReport {
    double gamma = 0.0;
    std::vector<double> betas;
    bool boundary_case = false;
};

struct AllocationResult {
    std::vector<double> powers;         // linear, nonnegative, sums to p_max
    std::vector<double> per_group_rates; // R_i, b/s/Hz
    double beam_sum_rate = 0.0;          // sum_i R_i for one beam
    KKTReport kkt;
};

class InfeasibleError : public std::runtime_error {
  public:
    explicit InfeasibleError(FeasibilityReport r)
        : std::runtime_error("allocation infeasible: minimum total power " +
                             std::to_string(r.min_total_power) + " exceeds budget"),
          report(std::move(r)) {}
    FeasibilityReport report;
};

// Collapses the validated multi-beam deployment to the one-beam problem:
// the binding rate floor of group i is the maximum across its beams, and the
// effective gain is the minimum across beams (conservative, so every user's
// floor is guaranteed once the reduced problem is satisfied).
inline BeamProblem reduce_beams(const Deployment &dep, double p_max) {
    BeamProblem bp;
    bp.n_rf = dep.n_rf;
    bp.alpha = 1.0 / static_cast<double>(dep.n_b);
    bp.noise_var = dep.noise_var;
    bp.p_max = p_max;
    bp.gains_sq.resize(dep.n_rf);
    bp.rate_floors.resize(dep.n_rf);
    for (std::size_t i = 1; i <= dep.n_rf; ++i) {
        double gmin = dep.gain_sq(static_cast<int>(i), 1);
        double rmax = dep.user(static_cast<int>(i), 1).min_rate;
        for (std::size_t k = 2; k <= dep.n_b; ++k) {
            gmin = std::min(gmin, dep.gain_sq(static_cast<int>(i), static_cast<int>(k)));
            rmax = std::max(rmax, dep.user(static_cast<int>(i), static_cast<int>(k)).min_rate);
        }
        bp.gains_sq[i - 1] = gmin;
        bp.rate_floors[i - 1] = rmax;
    }
    validate(bp);
    return bp;
}

// Minimum powers meeting all rate floors, evaluated backward from the
// strongest group:
//   p_i* = (2^{Rbar_i} - 1) * (sum_{l > i} p_l* + sigma^2 / (alpha * |h_i|^2)).
inline std::vector<double> min_power(const BeamProblem &bp) {
    validate(bp);
    std::vector<double> p(bp.n_rf, 0.0);
    double tail = 0.0; // sum of p_l for l > i
    for (std::size_t i = bp.n_rf; i-- > 0;) {
        const double c = std::exp2(bp.rate_floors[i]) - 1.0;
        p[i] = c * (tail + bp.noise_var / (bp.alpha * bp.gains_sq[i]));
        tail += p[i];
    }
    return p;
}

// Feasibility test via the closed product form of the minimum total power:
//   ||p*||_1 = sum_l (prod_{m<l} 2^{Rbar_m}) * (2^{Rbar_l} - 1) * sigma^2 / (alpha * |h_l|^2).
// Feasible iff ||p*||_1 <= p_max; exact equality counts as feasible (the
// feasible set is then the single point p*).
inline FeasibilityReport feasibility(const BeamProblem &bp) {
    validate(bp);
    FeasibilityReport fr;
    fr.min_powers = min_power(bp);
    double total = 0.0;
    double prefix = 1.0; // prod_{m < l} 2^{Rbar_m}
    for (std::size_t l = 0; l < bp.n_rf; ++l) {
        const double e = std::exp2(bp.rate_floors[l]);
        total += prefix * (e - 1.0) * bp.noise_var / (bp.alpha * bp.gains_sq[l]);
        prefix *= e;
    }
    fr.min_total_power = total;
    fr.feasible = total <= bp.p_max;
    return fr;
}

namespace detail {

inline constexpr double ln2 = 0.69314718055994530942;

// p_max within this relative distance of ||p*||_1 is treated as the
// single-point boundary case.
inline constexpr double boundary_rel_tol = 1e-12;

// Multiplier chain from the stationarity conditions of the Lagrangian,
// walking from the strongest group down with beta_N fixed (zero away from
// the boundary; minimal certificate at the boundary):
//   beta_{j-1} = [ (g_j/(g_j a_j + c) - g_{j-1}/(g_{j-1} a_j + c))/ln2
//                  + beta_j g_j ] / (2^{Rbar_{j-1}} g_{j-1}),
//   gamma = g_1 / ((g_1 a_1 + c) * ln2) + beta_1 g_1,   c = sigma^2/alpha.
inline KKTReport kkt_multipliers(const BeamProblem &bp, const std::vector<double> &powers,
                                 bool boundary) {
    const std::size_t n = bp.n_rf;
    const double c = bp.noise_var / bp.alpha;
    std::vector<double> a(n + 1, 0.0); // a_i = sum_{l >= i} p_l
    for (std::size_t i = n; i-- > 0;)
        a[i] = a[i + 1] + powers[i];

    KKTReport kkt;
    kkt.boundary_case = boundary;
    kkt.betas.assign(n, 0.0);
    for (std::size_t j = n; j >= 2; --j) {
        const double gj = bp.gains_sq[j - 1];
        const double gjm1 = bp.gains_sq[j - 2];
        const double aj = a[j - 1];
        const double diff = (gj / (gj * aj + c) - gjm1 / (gjm1 * aj + c)) / ln2;
        kkt.betas[j - 2] =
            (diff + kkt.betas[j - 1] * gj) / (std::exp2(bp.rate_floors[j - 2]) * gjm1);
    }
    kkt.gamma = bp.gains_sq[0] / ((bp.gains_sq[0] * a[0] + c) * ln2) + kkt.betas[0] * bp.gains_sq[0];
    return kkt;
}

} // namespace detail

// Closed-form optimum of the one-beam problem.
//
// Away from the boundary the budget constraint and the rate floors of all
// groups except the strongest hold with equality. Powers follow by backward
// substitution: with a_i = sum_{l>=i} p_l affine in the unknown p_N,
//   a_i = 2^{Rbar_i} a_{i+1} + (2^{Rbar_i} - 1) sigma^2/(alpha |h_i|^2),
// and a_1 = p_max fixes p_N. The beam sum-rate equals
//   log2(1 + alpha p_max |h_N|^2 / (sigma^2 prod_{i<N} 2^{Rbar_i})
//        - sum_{i<N} |h_N|^2 (2^{Rbar_i} - 1) / (|h_i|^2 prod_{l=i}^{N-1} 2^{Rbar_l}))
//   + sum_{i<N} Rbar_i.
// At the boundary (p_max equal to the minimum total power) the feasible set
// is the single point p*, every rate sits at its floor and the sum-rate is
// sum_i Rbar_i; the two branches agree there.
inline AllocationResult solve_closed_form(const BeamProblem &bp) {
    FeasibilityReport fr = feasibility(bp);
    if (!fr.feasible)
        throw InfeasibleError(std::move(fr));

    const std::size_t n = bp.n_rf;
    const double c = bp.noise_var / bp.alpha;
    AllocationResult res;

    const bool boundary = fr.min_total_power >= bp.p_max * (1.0 - detail::boundary_rel_tol);
    if (boundary) {
        res.powers = fr.min_powers;
        res.per_group_rates = bp.rate_floors;
        res.beam_sum_rate = 0.0;
        for (double r : bp.rate_floors)
            res.beam_sum_rate += r;
        res.kkt = detail::kkt_multipliers(bp, res.powers, true);
        return res;
    }

    // a_i = u_i + v_i * p_N, walked backward from u_N = 0, v_N = 1.
    std::vector<double> u(n, 0.0), v(n, 0.0);
    u[n - 1] = 0.0;
    v[n - 1] = 1.0;
    for (std::size_t i = n - 1; i-- > 0;) {
        const double e = std::exp2(bp.rate_floors[i]);
        const double d = (e - 1.0) * c / bp.gains_sq[i];
        u[i] = e * u[i + 1] + d;
        v[i] = e * v[i + 1];
    }
    const double p_last = (bp.p_max - u[0]) / v[0];

    std::vector<double> a(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        a[i] = u[i] + v[i] * p_last;
    res.powers.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        res.powers[i] = a[i] - a[i + 1];

    // Rate floors are tight for i < N by construction of the substitution.
    res.per_group_rates = bp.rate_floors;
    const double g_last = bp.gains_sq[n - 1];
    res.per_group_rates[n - 1] = std::log2(1.0 + bp.alpha * p_last * g_last / bp.noise_var);

    double floor_sum = 0.0;   // sum_{i<N} Rbar_i
    double suffix = 1.0;      // prod_{l=i}^{N-1} 2^{Rbar_l}
    double subtracted = 0.0;  // the interference-floor sum of the optimal value
    for (std::size_t i = n - 1; i-- > 0;) {
        const double e = std::exp2(bp.rate_floors[i]);
        suffix *= e;
        subtracted += g_last * (e - 1.0) / (bp.gains_sq[i] * suffix);
        floor_sum += bp.rate_floors[i];
    }
    res.beam_sum_rate =
        std::log2(1.0 + bp.alpha * bp.p_max * g_last / (bp.noise_var * suffix) - subtracted) + floor_sum;

    res.kkt = detail::kkt_multipliers(bp, res.powers, false);
    return res;
}

struct NumericOptions {
    double t_init = 1.0;       // initial barrier weight
    double mu = 20.0;          // barrier weight growth per centering round
    double gap_tol = 1e-9;     // target duality gap, b/s/Hz
    double newton_tol = 1e-12; // Newton decrement threshold (lambda^2 / 2)
    int max_newton = 200;      // per centering round
};

// Independent numeric solver: log-barrier Newton ascent over the cumulative
// powers a_i = sum_{l>=i} p_l. The objective is strictly increasing in a_1,
// so the budget is always exhausted and a_1 = p_max is eliminated up front;
// the remaining variables a_2..a_N carry one constraint per group,
//   a_i - 2^{Rbar_i} a_{i+1} - (2^{Rbar_i} - 1) sigma^2/(alpha |h_i|^2) >= 0,
// which subsumes p >= 0. The objective telescopes to a separable sum
//   log2(g_1 p_max + c) - log2(c) + sum_{j>=2} [log2(g_j a_j + c) - log2(g_{j-1} a_j + c)],
// so the barrier Hessian is tridiagonal; a dense Cholesky is still used since
// the dimension is tiny. No code is shared with solve_closed_form.
inline AllocationResult solve_numeric(const BeamProblem &bp, const NumericOptions &opt = {}) {
    FeasibilityReport fr = feasibility(bp);
    if (!fr.feasible)
        throw InfeasibleError(std::move(fr));

    const std::size_t n = bp.n_rf;
    const double c = bp.noise_var / bp.alpha;
    const double p_max = bp.p_max;

    std::vector<double> e(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
        e[i] = std::exp2(bp.rate_floors[i]);
        d[i] = (e[i] - 1.0) * c / bp.gains_sq[i];
    }

    auto finish = [&](std::vector<double> powers, bool boundary, double t_final,
                      const std::vector<double> &slacks) {
        AllocationResult res;
        res.per_group_rates.resize(n);
        double tail = 0.0;
        for (std::size_t i = n; i-- > 0;) {
            const double g = bp.gains_sq[i];
            res.per_group_rates[i] =
                std::log2(1.0 + bp.alpha * powers[i] * g / (g * bp.alpha * tail + bp.noise_var));
            tail += powers[i];
        }
        res.beam_sum_rate = 0.0;
        for (double r : res.per_group_rates)
            res.beam_sum_rate += r;
        res.kkt.boundary_case = boundary;
        res.kkt.betas.assign(n, 0.0);
        if (t_final > 0.0) {
            // Barrier dual estimates, converted from the nats-scale merit to
            // the bits-scale Lagrangian; the constraint of group i appears
            // there scaled by |h_i|^2.
            for (std::size_t i = 0; i < n; ++i)
                res.kkt.betas[i] = 1.0 / (t_final * bp.gains_sq[i] * slacks[i] * detail::ln2);
        }
        res.kkt.gamma = bp.gains_sq[0] / ((bp.gains_sq[0] * p_max + c) * detail::ln2) +
                        res.kkt.betas[0] * bp.gains_sq[0];
        res.powers = std::move(powers);
        return res;
    };

    const double slack_total = p_max - fr.min_total_power;
    if (slack_total <= detail::boundary_rel_tol * std::max(1.0, p_max)) {
        // Single-point feasible set: the minimum-power vector is the solution.
        return finish(fr.min_powers, true, 0.0, {});
    }
    if (n == 1) {
        return finish({p_max}, false, 0.0, {});
    }

    // Strictly feasible start: inflate the minimum-power cumulative sums by a
    // geometrically decaying share of the budget slack.
    std::vector<double> a_min(n + 1, 0.0);
    for (std::size_t i = n; i-- > 0;)
        a_min[i] = a_min[i + 1] + fr.min_powers[i];
    double r_max = 0.0;
    for (double r : bp.rate_floors)
        r_max = std::max(r_max, r);
    const double w0 = std::exp2(-(r_max + 1.0));
    std::vector<double> x(n - 1); // x[j] = a_{j+2}
    double w = w0;
    for (std::size_t j = 0; j + 1 < n; ++j) {
        x[j] = a_min[j + 1] + slack_total * w;
        w *= w0;
    }

    const std::size_t m = n; // one constraint per group
    auto slacks = [&](const std::vector<double> &xx, std::vector<double> &s) {
        s[0] = p_max - e[0] * xx[0] - d[0];
        for (std::size_t i = 1; i + 1 < n; ++i)
            s[i] = xx[i - 1] - e[i] * xx[i] - d[i];
        s[n - 1] = xx[n - 2] - d[n - 1];
    };

    {
        // If the budget slack is so thin that the inflated start rounds onto
        // the constraint boundary, the minimum-power point is the answer to
        // working precision.
        std::vector<double> s0(m);
        slacks(x, s0);
        for (double si : s0)
            if (!(si > 0.0))
                return finish(fr.min_powers, false, 0.0, {});
    }
    // The merit t*f + sum log(s) grows with t while the per-step improvements
    // shrink; extended precision keeps the line-search comparisons meaningful
    // at large barrier weights.
    auto merit = [&](double t, const std::vector<double> &xx, const std::vector<double> &ss) {
        const long double cl = static_cast<long double>(c);
        long double f = 0.0L;
        for (std::size_t j = 0; j + 1 < n; ++j) {
            const long double aj = xx[j];
            f += std::log(static_cast<long double>(bp.gains_sq[j + 1]) * aj + cl) -
                 std::log(static_cast<long double>(bp.gains_sq[j]) * aj + cl);
        }
        long double value = static_cast<long double>(t) * f;
        for (std::size_t i = 0; i < ss.size(); ++i)
            value += std::log(static_cast<long double>(ss[i]));
        return value;
    };

    std::vector<double> s(m), grad(n - 1), dx(n - 1), xn(n - 1), sn(m);
    std::vector<std::vector<double>> H(n - 1, std::vector<double>(n - 1, 0.0));
    double t = opt.t_init;
    double t_final = t;
    while (true) {
        double lambda2 = 0.0;
        // The decrement lives on the merit scale, which grows with t; the
        // corresponding objective error is lambda2 / (2 t).
        const double decrement_tol = opt.newton_tol * std::max(1.0, t * 1e-3);
        for (int it = 0;; ++it) {
            if (it >= opt.max_newton) {
                // A stall at numerical precision is fine; anything coarser is
                // genuine non-convergence.
                if (lambda2 * 0.5 > 1e-2) {
                    std::ostringstream msg;
                    msg << "solve_numeric: Newton did not converge (t=" << t << ", n_rf=" << n
                        << ", decrement=" << lambda2 * 0.5 << ")";
                    throw SolverError(msg.str());
                }
                break;
            }
            slacks(x, s);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (auto &row : H)
                std::fill(row.begin(), row.end(), 0.0);

            // t * objective (in nats)
            for (std::size_t j = 0; j + 1 < n; ++j) {
                const double gj = bp.gains_sq[j + 1];
                const double gjm = bp.gains_sq[j];
                const double aj = x[j];
                grad[j] += t * (gj / (gj * aj + c) - gjm / (gjm * aj + c));
                H[j][j] += t * (-gj * gj / ((gj * aj + c) * (gj * aj + c)) +
                                gjm * gjm / ((gjm * aj + c) * (gjm * aj + c)));
            }
            // barrier: constraint i touches x[i-1] (+1, for i >= 1) and x[i] (-e[i], for i+1 < n)
            for (std::size_t i = 0; i < m; ++i) {
                const double si = s[i];
                const double inv = 1.0 / si;
                const double inv2 = inv * inv;
                if (i >= 1) {
                    grad[i - 1] += inv;
                    H[i - 1][i - 1] -= inv2;
                }
                if (i + 1 < n) {
                    grad[i] -= e[i] * inv;
                    H[i][i] -= e[i] * e[i] * inv2;
                    if (i >= 1) {
                        H[i - 1][i] += e[i] * inv2;
                        H[i][i - 1] += e[i] * inv2;
                    }
                }
            }

            // Newton direction: solve (-H) dx = grad, -H symmetric positive definite.
            const std::size_t dim = n - 1;
            std::vector<std::vector<double>> L(dim, std::vector<double>(dim, 0.0));
            for (std::size_t i = 0; i < dim; ++i) {
                for (std::size_t j = 0; j <= i; ++j) {
                    double sum = -H[i][j];
                    for (std::size_t k = 0; k < j; ++k)
                        sum -= L[i][k] * L[j][k];
                    if (i == j) {
                        if (!(sum > 0.0))
                            throw SolverError("solve_numeric: Hessian lost definiteness");
                        L[i][j] = std::sqrt(sum);
                    } else {
                        L[i][j] = sum / L[j][j];
                    }
                }
            }
            std::vector<double> y(dim, 0.0);
            for (std::size_t i = 0; i < dim; ++i) {
                double sum = grad[i];
                for (std::size_t k = 0; k < i; ++k)
                    sum -= L[i][k] * y[k];
                y[i] = sum / L[i][i];
            }
            for (std::size_t i = dim; i-- > 0;) {
                double sum = y[i];
                for (std::size_t k = i + 1; k < dim; ++k)
                    sum -= L[k][i] * dx[k];
                dx[i] = sum / L[i][i];
            }

            lambda2 = 0.0;
            for (std::size_t i = 0; i < dim; ++i)
                lambda2 += grad[i] * dx[i];
            if (lambda2 * 0.5 <= decrement_tol)
                break;

            // Fraction-to-boundary cap, then Armijo backtracking on the merit.
            double step = 1.0;
            for (std::size_t i = 0; i < m; ++i) {
                double ds = 0.0;
                if (i >= 1)
                    ds += dx[i - 1];
                if (i + 1 < n)
                    ds -= e[i] * dx[i];
                if (ds < 0.0)
                    step = std::min(step, -s[i] / ds * 0.995);
            }
            const long double merit0 = merit(t, x, s);
            bool moved = false;
            while (step > 1e-18) {
                for (std::size_t i = 0; i < dim; ++i)
                    xn[i] = x[i] + step * dx[i];
                slacks(xn, sn);
                bool ok = true;
                for (std::size_t i = 0; i < m; ++i)
                    ok = ok && sn[i] > 0.0;
                if (ok && merit(t, xn, sn) >=
                              merit0 + 0.25L * static_cast<long double>(step * lambda2)) {
                    moved = true;
                    break;
                }
                step *= 0.5;
            }
            if (!moved)
                break; // step stalled at numerical precision; centered enough
            x = xn;
        }
        t_final = t;
        // duality gap of the centered point is m/t nats
        if (static_cast<double>(m) / (t * detail::ln2) < opt.gap_tol)
            break;
        t *= opt.mu;
    }

    slacks(x, s);
    std::vector<double> powers(n, 0.0);
    powers[0] = p_max - x[0];
    for (std::size_t i = 1; i + 1 < n; ++i)
        powers[i] = x[i - 1] - x[i];
    powers[n - 1] = x[n - 2];
    return finish(std::move(powers), false, t_final, s);
}

// Achievable rate of user (i, k) under SIC in descending gain order:
//   R_ik = log2(1 + alpha p_i |h_ik|^2 / (|h_ik|^2 sum_{l>i} alpha p_l + sigma^2)).
inline double user_rate(int group, int beam, const std::vector<double> &powers, double alpha,
                        const Deployment &dep) {
    if (powers.size() != dep.n_rf)
        throw std::invalid_argument("user_rate: power vector length must equal n_rf");
    for (double p : powers)
        if (!(p >= 0.0))
            throw std::invalid_argument("user_rate: powers must be nonnegative");
    const double g = dep.gain_sq(group, beam);
    double interference = 0.0;
    for (std::size_t l = static_cast<std::size_t>(group); l < powers.size(); ++l)
        interference += alpha * powers[l];
    return std::log2(1.0 + alpha * powers[static_cast<std::size_t>(group - 1)] * g /
                               (g * interference + dep.noise_var));
}

// Every beam achieves the same rate under the reduced problem, so the total
// over the deployment is the one-beam optimum times the number of beams.
inline double total_sum_rate(const AllocationResult &beam_result, std::size_t n_b) {
    if (n_b < 1)
        throw std::invalid_argument("total_sum_rate: n_b must be >= 1");
    return beam_result.beam_sum_rate * static_cast<double>(n_b);
}

} // namespace ranoma
