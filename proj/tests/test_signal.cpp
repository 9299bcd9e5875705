// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "ranoma/allocator.hpp"
#include "ranoma/signal.hpp"

using namespace ranoma;

namespace {

Deployment scenario_deployment() {
    const double gains_db[3] = {-10.0, -5.0, 0.0};
    std::vector<UserSpec> users;
    for (int i = 1; i <= 3; ++i) {
        for (int k = 1; k <= 4; ++k) {
            UserSpec u;
            u.group = i;
            u.beam = k;
            u.gain_sq = std::pow(10.0, gains_db[i - 1] / 10.0);
            u.min_rate = 0.2;
            users.push_back(u);
        }
    }
    return make_deployment(3, 4, std::move(users), 1.0, 1.0);
}

std::vector<std::complex<double>> random_unit_symbols(std::mt19937_64 &rng, std::size_t n) {
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    std::vector<std::complex<double>> s;
    s.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        s.push_back(std::polar(1.0, phase(rng)));
    return s;
}

} // namespace

TEST_CASE("phase_offsets of identical symbols is zero") {
    GroupSymbols sym{1, {{1, 0}, {1, 0}, {1, 0}, {1, 0}}};
    const PhaseVector pv = phase_offsets(sym);
    REQUIRE(pv.offsets.size() == 3);
    for (double o : pv.offsets)
        CHECK(o == Approx(0.0).margin(1e-15));
    for (const auto &w : pv.w)
        CHECK(std::abs(w - std::complex<double>(1.0, 0.0)) < 1e-15);
}

TEST_CASE("phase_offsets quarter turn") {
    GroupSymbols sym{1, {{1, 0}, {0, 1}}};
    const PhaseVector pv = phase_offsets(sym);
    REQUIRE(pv.offsets.size() == 1);
    CHECK(pv.offsets[0] == Approx(pi / 2.0));
    CHECK(std::abs(pv.w[1] - std::polar(1.0, pi / 2.0)) < 1e-15);
    CHECK(pv.w[0] == std::complex<double>(1.0, 0.0));
}

TEST_CASE("phase vector reconstructs the symbol vector") {
    std::mt19937_64 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
        GroupSymbols sym{1, random_unit_symbols(rng, 1 + trial % 8)};
        const PhaseVector pv = phase_offsets(sym);
        double worst = 0.0;
        for (std::size_t k = 0; k < sym.symbols.size(); ++k) {
            worst = std::max(worst, std::abs(pv.w[k] * sym.symbols[0] - sym.symbols[k]));
            CHECK(std::abs(std::abs(pv.w[k]) - 1.0) < 1e-15);
        }
        CHECK(worst < 1e-12);
        // offsets stay in (-pi, pi]
        for (double o : pv.offsets) {
            CHECK(o > -pi);
            CHECK(o <= pi);
        }
    }
}

TEST_CASE("phase_offsets rejects degenerate symbols") {
    CHECK_THROWS_AS(phase_offsets(GroupSymbols{1, {{1, 0}, {0, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(phase_offsets(GroupSymbols{1, {{0.5, 0}, {1, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(phase_offsets(GroupSymbols{1, {}}), std::invalid_argument);
}

TEST_CASE("beam_superposition single term") {
    std::vector<GroupSymbols> groups{{1, {{1, 0}}}};
    const auto beams = beam_superposition(groups, {4.0}, 0.5);
    REQUIRE(beams.size() == 1);
    CHECK(std::abs(beams[0].composite - std::complex<double>(std::sqrt(2.0), 0.0)) < 1e-15);
}

TEST_CASE("beam_superposition zero power and term sum") {
    std::mt19937_64 rng(55);
    std::vector<GroupSymbols> groups;
    for (int i = 1; i <= 3; ++i)
        groups.push_back({i, random_unit_symbols(rng, 4)});

    const auto zero = beam_superposition(groups, {0.0, 0.0, 0.0}, 0.25);
    for (const auto &b : zero)
        CHECK(std::abs(b.composite) == 0.0);

    const auto beams = beam_superposition(groups, {2.0, 1.0, 0.5}, 0.25);
    REQUIRE(beams.size() == 4);
    for (const auto &b : beams) {
        std::complex<double> sum{0.0, 0.0};
        for (const auto &t : b.terms)
            sum += t;
        CHECK(std::abs(sum - b.composite) < 1e-12);
    }
}

TEST_CASE("beam_superposition rejects mismatched inputs") {
    std::vector<GroupSymbols> groups{{1, {{1, 0}, {1, 0}}}, {2, {{1, 0}, {1, 0}}}};
    CHECK_THROWS_AS(beam_superposition(groups, {1.0}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(beam_superposition(groups, {1.0, -1.0}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(beam_superposition(groups, {1.0, 1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("composite power matches alpha * sum(p) in expectation") {
    // Monte-Carlo over independent uniform 8-PSK draws per group, with the
    // allocator's powers for the 3x4 scenario at 20 dB transmit SNR.
    const Deployment dep = scenario_deployment();
    const BeamProblem bp = reduce_beams(dep, 100.0);
    const AllocationResult alloc = solve_closed_form(bp);

    const std::size_t draws = 100000;
    std::mt19937_64 rng(424242);
    std::uniform_int_distribution<int> psk(0, 7);
    std::vector<double> mean_sq(dep.n_b, 0.0);
    for (std::size_t it = 0; it < draws; ++it) {
        std::vector<GroupSymbols> groups;
        groups.reserve(dep.n_rf);
        for (std::size_t i = 0; i < dep.n_rf; ++i) {
            GroupSymbols g{static_cast<int>(i) + 1, {}};
            for (std::size_t k = 0; k < dep.n_b; ++k)
                g.symbols.push_back(std::polar(1.0, 2.0 * pi * psk(rng) / 8.0));
            groups.push_back(std::move(g));
        }
        const auto beams = beam_superposition(groups, alloc.powers, bp.alpha);
        for (std::size_t k = 0; k < dep.n_b; ++k)
            mean_sq[k] += std::norm(beams[k].composite);
    }
    double expected = 0.0;
    for (double p : alloc.powers)
        expected += bp.alpha * p;
    for (std::size_t k = 0; k < dep.n_b; ++k) {
        mean_sq[k] /= static_cast<double>(draws);
        CHECK(mean_sq[k] == Approx(expected).epsilon(0.01));
    }
}

TEST_CASE("decompose_received splits the three power terms") {
    const Deployment dep = scenario_deployment();

    SECTION("hand case: middle group, equal powers") {
        // group 2 of 3, p = (1,1,1), alpha = 1/4, |h|^2 = 1:
        // intended 1/4, interference 1/2, noise 1
        std::vector<UserSpec> users(3);
        for (int i = 1; i <= 3; ++i) {
            users[i - 1].group = i;
            users[i - 1].beam = 1;
            users[i - 1].gain_sq = 1.0;
        }
        const Deployment eq = make_deployment(3, 1, users, 1.0, 1.0);
        const ReceivedDecomposition rd = decompose_received(2, 1, {1.0, 1.0, 1.0}, 0.25, eq);
        CHECK(rd.intended_power == Approx(0.25));
        CHECK(rd.intra_beam_interference_power == Approx(0.5));
        CHECK(rd.noise_var == Approx(1.0));
    }

    SECTION("single group has no interference") {
        std::vector<UserSpec> users(1);
        users[0].group = 1;
        users[0].beam = 1;
        users[0].gain_sq = 0.7;
        const Deployment one = make_deployment(1, 1, users, 1.0, 1.0);
        const ReceivedDecomposition rd = decompose_received(1, 1, {3.0}, 1.0, one);
        CHECK(rd.intra_beam_interference_power == 0.0);
        CHECK(rd.intended_power == Approx(3.0 * 0.7));
    }

    SECTION("strongest group still sees pre-SIC interference") {
        // decompose_received reports the received signal before SIC, so the
        // strongest group's sum over l != i is nonzero even though its
        // post-SIC residual (sum over l > i) is empty.
        const ReceivedDecomposition rd = decompose_received(3, 1, {1.0, 1.0, 1.0}, 0.25, dep);
        CHECK(rd.intra_beam_interference_power == Approx(1.0 * 0.25 * 2.0));
        CHECK(post_sic_sinr(3, 1, {1.0, 1.0, 1.0}, 0.25, dep) == Approx(0.25 / 1.0));
    }

    SECTION("terms are nonnegative and intended is monotone in p_i") {
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> pw(0.0, 10.0);
        double prev = -1.0;
        for (int step = 0; step < 20; ++step) {
            std::vector<double> p{pw(rng), pw(rng), pw(rng)};
            p[1] = 0.5 * step; // sweep the intended user's power upward
            const ReceivedDecomposition rd = decompose_received(2, 2, p, 0.25, dep);
            CHECK(rd.intended_power >= 0.0);
            CHECK(rd.intra_beam_interference_power >= 0.0);
            CHECK(rd.noise_var >= 0.0);
            CHECK(rd.intended_power >= prev);
            prev = rd.intended_power;
        }
    }

    SECTION("index validation") {
        CHECK_THROWS_AS(decompose_received(4, 1, {1.0, 1.0, 1.0}, 0.25, dep), std::invalid_argument);
        CHECK_THROWS_AS(decompose_received(1, 5, {1.0, 1.0, 1.0}, 0.25, dep), std::invalid_argument);
        CHECK_THROWS_AS(decompose_received(1, 1, {1.0}, 0.25, dep), std::invalid_argument);
    }
}

TEST_CASE("post_sic_sinr formula") {
    const Deployment dep = scenario_deployment();

    SECTION("strongest group sees no residual interference") {
        const double sinr = post_sic_sinr(3, 2, {2.0, 3.0, 4.0}, 0.25, dep);
        CHECK(sinr == Approx(0.25 * 4.0 * 1.0 / 1.0));
    }

    SECTION("zero power gives zero SINR") {
        CHECK(post_sic_sinr(2, 1, {0.0, 0.0, 0.0}, 0.25, dep) == 0.0);
    }

    SECTION("minimum powers hit the rate floor") {
        const BeamProblem bp = reduce_beams(dep, 100.0);
        const std::vector<double> pstar = min_power(bp);
        for (int k = 1; k <= 4; ++k) {
            const double sinr = post_sic_sinr(1, k, pstar, bp.alpha, dep);
            CHECK(std::log2(1.0 + sinr) == Approx(0.2).margin(1e-9));
        }
    }
}

TEST_CASE("rate formula consistency across modules") {
    // log2(1 + post_sic_sinr) and user_rate implement one formula through
    // two code paths; they must agree to near machine precision.
    const Deployment dep = scenario_deployment();
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> pw(0.0, 20.0);
    std::uniform_int_distribution<int> gi(1, 3), bi(1, 4);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> p{pw(rng), pw(rng), pw(rng)};
        const int i = gi(rng), k = bi(rng);
        const double via_sinr = std::log2(1.0 + post_sic_sinr(i, k, p, 0.25, dep));
        const double via_rate = user_rate(i, k, p, 0.25, dep);
        CHECK(std::abs(via_sinr - via_rate) < 1e-12);
    }
}
