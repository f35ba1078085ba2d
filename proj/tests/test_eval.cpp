#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstring>

#include "fixtures.hpp"
#include "recycle/errors.hpp"
#include "recycle/eval.hpp"

using namespace recycle;
using fixtures::reference_params;
using fixtures::reference_solution;

namespace {

RegulatedPath constant_path(std::size_t steps, double dt, double r, double u, double p) {
    RegulatedPath path;
    for (std::size_t i = 0; i <= steps; ++i) {
        path.ts.push_back(static_cast<double>(i) * dt);
        path.rs.push_back(r);
        path.Ls.push_back(0.0);
        path.Us.push_back(0.0);
        path.us.push_back(u);
        path.ps.push_back(p);
    }
    return path;
}

std::uint64_t fnv1a(std::uint64_t hash, double value) {
    const auto bits = std::bit_cast<std::uint64_t>(value);
    for (int b = 0; b < 8; ++b) {
        hash ^= (bits >> (8 * b)) & 0xffu;
        hash *= 0x100000001b3ull;
    }
    return hash;
}

SimConfig short_run() {
    SimConfig cfg;
    cfg.T = 5.0;
    cfg.dt = 0.005;
    return cfg;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("discounted profit examples") {
    ModelParams p;
    p.sigma = 0.0;
    SimConfig cfg;
    cfg.r0 = 0.0;
    const RegulatedPath idle = simulate_path(Policy::zero(p), p, cfg);
    CHECK(discounted_profit(idle, p, cfg.dt) == 0.0);

    const double dt = 0.001;
    const RegulatedPath flat = constant_path(4000, dt, 0.5, 0.1, 1.1);
    const double pi0 = profit(1.1, 0.1, 0.5, p);
    const double exact = pi0 * (1.0 - std::exp(-p.alpha * 4.0)) / p.alpha;
    CHECK(std::abs(discounted_profit(flat, p, dt) - exact) <= std::abs(pi0) * dt);

    RegulatedPath penalty = constant_path(1, dt, 0.0, 0.0, 1.0);
    penalty.Ls[1] = 0.1;
    CHECK(discounted_profit(penalty, p, dt) == doctest::Approx(-0.05).epsilon(1e-15));

    RegulatedPath broken = flat;
    broken.us.pop_back();
    CHECK_THROWS_AS((void)discounted_profit(broken, p, dt), DomainError);
    CHECK_THROWS_AS((void)discounted_profit(flat, p, dt, 10, 5), DomainError);
}

TEST_CASE("running profit at the upper barrier") {
    const auto& p = reference_params();
    CHECK(path_profit(kDefaultPriceFloor, 0.3, 1.0, p) == -0.3);
    CHECK(path_profit(1.1, 0.2, 0.5, p) == profit(1.1, 0.2, 0.5, p));
    const auto inelastic = fixtures::inelastic_params();
    CHECK(path_profit(1.0, 0.2, 1.0, inelastic) == profit(1.0, 0.2, 1.0, inelastic));
}

TEST_CASE("discounted profit is additive over disjoint segments") {
    const auto& p = reference_params();
    const Policy policy = make_policy(reference_solution(), p);
    SimConfig cfg;
    for (std::uint64_t id = 0; id < 20; ++id) {
        const RegulatedPath path = simulate_path(policy, p, cfg, id);
        const std::size_t last = path.size() - 1;
        const double whole = discounted_profit(path, p, cfg.dt);
        for (std::size_t cut : {std::size_t{1}, std::size_t{333}, std::size_t{999}}) {
            const double split = discounted_profit(path, p, cfg.dt, 0, cut) + discounted_profit(path, p, cfg.dt, cut, last);
            CHECK(split == doctest::Approx(whole).epsilon(1e-12));
        }
    }
}

TEST_CASE("deterministic zero case has zero mean and error") {
    ModelParams p;
    p.sigma = 0.0;
    SimConfig cfg = short_run();
    cfg.r0 = 0.0;
    const EvalReport r = monte_carlo_J(Policy::zero(p), p, cfg, 10, 1);
    CHECK(r.j_mean == 0.0);
    CHECK(r.j_se == 0.0);
    CHECK(r.n_paths == 10);
}

TEST_CASE("standard error halves when paths quadruple") {
    const auto& p = reference_params();
    EvalOptions options;
    options.extend_horizon = false;
    const EvalReport small = monte_carlo_J(Policy::zero(p), p, short_run(), 1000, 11, options);
    const EvalReport large = monte_carlo_J(Policy::zero(p), p, short_run(), 4000, 11, options);
    CHECK(small.j_se / large.j_se == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("common random numbers across policies") {
    const auto& p = reference_params();
    SimConfig cfg;
    const Policy a = make_policy(reference_solution(), p);
    const Policy b = Policy::zero(p);
    std::uint64_t hash_a = 0xcbf29ce484222325ull;
    std::uint64_t hash_b = hash_a;
    for (std::uint64_t id = 0; id < 100; ++id) {
        for (double z : simulate_path(a, p, cfg, id).noise) hash_a = fnv1a(hash_a, z);
        for (double z : simulate_path(b, p, cfg, id).noise) hash_b = fnv1a(hash_b, z);
    }
    CHECK(hash_a == hash_b);
}

TEST_CASE("parallel estimate is bitwise equal to the serial reference") {
    const auto& p = reference_params();
    const Policy policy = make_policy(reference_solution(), p);
    EvalOptions options;
    options.extend_horizon = false;
    const EvalReport parallel = monte_carlo_J(policy, p, short_run(), 200, 42, options);
    const EvalReport serial = monte_carlo_J_serial(policy, p, short_run(), 200, 42);
    CHECK(parallel.j_mean == serial.j_mean);
    CHECK(parallel.j_se == serial.j_se);
    CHECK(parallel.path_values == serial.path_values);
    CHECK(parallel.max_abs_profit == serial.max_abs_profit);
    CHECK(parallel.mean_terminal_r == serial.mean_terminal_r);
    CHECK(parallel.min_price == serial.min_price);
    CHECK(parallel.max_price == serial.max_price);
    CHECK(parallel.max_investment == serial.max_investment);
}

TEST_CASE("results do not depend on the worker count") {
    const auto& p = reference_params();
    const Policy policy = make_policy(reference_solution(), p);
    std::vector<EvalReport> reports;
    for (int threads : {1, 2, 3, 8}) {
        EvalOptions options;
        options.threads = threads;
        reports.push_back(monte_carlo_J(policy, p, short_run(), 157, 9, options));
    }
    for (const auto& r : reports) {
        CHECK(r.j_mean == reports.front().j_mean);
        CHECK(r.j_se == reports.front().j_se);
        CHECK(r.path_values == reports.front().path_values);
    }
}

TEST_CASE("horizon is extended until the tail bound is negligible") {
    const auto& p = reference_params();
    const Policy policy = Policy::fixed(0.1, 1.1);
    SimConfig cfg = short_run();
    cfg.T = 2.0;
    const EvalReport r = monte_carlo_J(policy, p, cfg, 50, 3);
    CHECK(r.horizon > cfg.T);
    CHECK(r.tail_bound <= 1e-3 * std::abs(r.j_mean));
    EvalOptions fixed_horizon;
    fixed_horizon.extend_horizon = false;
    CHECK(monte_carlo_J(policy, p, cfg, 50, 3, fixed_horizon).horizon == doctest::Approx(2.0));
}

TEST_CASE("paired differences") {
    const auto& p = reference_params();
    EvalOptions options;
    options.extend_horizon = false;
    const EvalReport a = monte_carlo_J(Policy::zero(p), p, short_run(), 100, 1, options);
    const EvalReport b = monte_carlo_J(Policy::fixed(0.2, 1.5), p, short_run(), 100, 1, options);
    const PairedDifference self = paired_difference(a, a);
    CHECK(self.mean == 0.0);
    CHECK(self.se == 0.0);
    const PairedDifference d = paired_difference(a, b);
    CHECK(d.mean == doctest::Approx(a.j_mean - b.j_mean).epsilon(1e-12));
    const EvalReport c = monte_carlo_J(Policy::zero(p), p, short_run(), 50, 1, options);
    CHECK_THROWS_AS((void)paired_difference(a, c), DomainError);
}

TEST_CASE("compare_policies is consistent and order preserving") {
    const auto& p = reference_params();
    const auto& sol = reference_solution();
    EvalOptions options;
    options.extend_horizon = false;
    const auto single = compare_policies({sol.k_star}, p, short_run(), ShootConfig{}, 100, 5, options);
    REQUIRE(single.size() == 1);
    const EvalReport direct = monte_carlo_J(make_policy(sol, p), p, short_run(), 100, 5, options);
    CHECK(single[0].j_mean == direct.j_mean);
    CHECK(single[0].path_values == direct.path_values);

    const auto forward = compare_policies({-0.5, sol.k_star, 0.5}, p, short_run(), ShootConfig{}, 100, 5, options);
    const auto backward = compare_policies({0.5, sol.k_star, -0.5}, p, short_run(), ShootConfig{}, 100, 5, options);
    REQUIRE(forward.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(forward[i].j_mean == backward[2 - i].j_mean);
        CHECK(forward[i].policy_label == backward[2 - i].policy_label);
    }
    CHECK(forward[0].policy_label == "k=-0.5");
}

TEST_CASE("zero and fixed policies stay below the value function") {
    const auto& p = reference_params();
    const auto& sol = reference_solution();
    SimConfig cfg;
    cfg.T = 40.0 / p.alpha;
    cfg.dt = 0.01;
    for (const Policy& policy : {Policy::zero(p), Policy::fixed(1.0, 2.0)}) {
        const VerificationResult v = verification_inequality(policy, p, cfg, 500, 8, sol);
        CHECK(v.holds);
        CHECK(v.margin > 0.0);
        CHECK(v.allowance == doctest::Approx(0.02 * std::abs(sol.Q_of_r0)));
        REQUIRE(v.report.q_of_r0);
        CHECK(*v.report.q_of_r0 == doctest::Approx(sol.Q_of_r0).epsilon(1e-14));
    }
}

TEST_CASE("sweep over the price sensitivity switches the price regime") {
    const auto& p = reference_params();
    SimConfig cfg = short_run();
    EvalOptions options;
    options.extend_horizon = false;
    const auto rows = sensitivity_sweep("a1", {0.3, 1.1}, p, cfg, ShootConfig{}, 50, 2, options);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ok);
    CHECK(rows[0].min_price == p.p0);
    CHECK(rows[0].max_price == p.p0);
    CHECK(rows[1].ok);
    CHECK(rows[1].min_price < rows[1].max_price);
}

TEST_CASE("single-value sweep reproduces solve and evaluate") {
    const auto& p = reference_params();
    SimConfig cfg = short_run();
    EvalOptions options;
    options.extend_horizon = false;
    const auto rows = sensitivity_sweep("delta", {0.5}, p, cfg, ShootConfig{}, 60, 4, options);
    REQUIRE(rows.size() == 1);
    const HjbSolution sol = shoot_kstar(p, ShootConfig{}, cfg.r0);
    const EvalReport r = monte_carlo_J(make_policy(sol, p), p, cfg, 60, 4, options);
    CHECK(rows[0].k_star == sol.k_star);
    CHECK(rows[0].q_of_r0 == sol.Q_of_r0);
    CHECK(rows[0].j_mean == r.j_mean);
    CHECK(rows[0].j_se == r.j_se);
}

TEST_CASE("larger market potential cannot reduce profit") {
    const auto& p = reference_params();
    ModelParams rich = p;
    rich.a0 = 2.0;
    EvalOptions options;
    options.extend_horizon = false;
    const Policy policy = Policy::fixed(0.1, 1.1);
    const EvalReport base = monte_carlo_J(policy, p, short_run(), 200, 6, options);
    const EvalReport more = monte_carlo_J(policy, rich, short_run(), 200, 6, options);
    for (std::size_t i = 0; i < base.path_values.size(); ++i) CHECK(more.path_values[i] >= base.path_values[i]);

    const auto rows = sensitivity_sweep("a0", {1.0, 2.0}, p, short_run(), ShootConfig{}, 20, 6, options);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1].q_of_r0 >= rows[0].q_of_r0);
}

TEST_CASE("sweep records failures per row") {
    const auto& p = reference_params();
    EvalOptions options;
    options.extend_horizon = false;
    const auto rows = sensitivity_sweep("gamma", {0.5, 5.0}, p, short_run(), ShootConfig{}, 10, 1, options);
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].ok);
    CHECK(rows[0].error.find("gamma") != std::string::npos);
    CHECK(rows[1].ok);
}

}  // TEST_SUITE
