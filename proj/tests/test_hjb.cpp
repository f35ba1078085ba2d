#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>

#include "fixtures.hpp"
#include "recycle/errors.hpp"
#include "recycle/hjb_solver.hpp"

using namespace recycle;
using fixtures::reference_params;
using fixtures::reference_solution;

namespace {

// 16 * 0.5^{1.25}
constexpr double kK0 = 6.727171322029716;

double terminal_or_minus_inf(const WTrajectory& t) {
    return t.truncated ? -std::numeric_limits<double>::infinity() : t.terminal_W();
}

}  // namespace

TEST_SUITE("hjb_solver") {

TEST_CASE("integration constant and initial values") {
    const auto& p = reference_params();
    CHECK(integration_constant(0.0, p) == doctest::Approx(kK0).epsilon(1e-14));
    const WTrajectory t = integrate_W(0.0, p, ShootConfig{});
    CHECK(t.Ws.front() == p.C_L);
    CHECK(t.Ys.front() == t.K_k);
    CHECK(t.K_k == doctest::Approx(kK0).epsilon(1e-14));
    CHECK(t.xs.front() == 0.0);
    CHECK(t.xs.size() == 4001);
    CHECK(t.xs.back() == doctest::Approx(1.0 - 1e-6).epsilon(1e-15));
    CHECK(std::adjacent_find(t.xs.begin(), t.xs.end(), std::greater_equal<>()) == t.xs.end());
}

TEST_CASE("sigma = 0 and bad shooting configs are rejected") {
    ModelParams p;
    p.sigma = 0.0;
    CHECK_THROWS_AS((void)integrate_W(0.0, p, ShootConfig{}), ValidationError);
    ShootConfig cfg;
    cfg.grid_n = 50;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = ShootConfig{};
    cfg.k_lo = 1.0;
    cfg.k_hi = 0.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
    cfg = ShootConfig{};
    cfg.eps_boundary = 0.0;
    CHECK_THROWS_AS(validate(cfg), ValidationError);
}

TEST_CASE("classify examples") {
    const std::vector<double> xs = {0.0, 0.25, 0.5, 0.75, 1.0};
    const Classification flat = classify(xs, {0.5, 0.5, 0.5, 0.5, 0.5});
    CHECK(flat.profile == Profile::PositiveNoMax);
    CHECK_FALSE(flat.crossing);

    const Classification peak = classify(xs, {0.5, 0.6, 0.4, 0.2, 0.1});
    CHECK(peak.profile == Profile::PositiveWithLocalMax);
    REQUIRE(peak.max_index);
    CHECK(*peak.max_index == 1);

    const Classification cross = classify(xs, {0.5, 0.2, -0.1, -0.5, -1.0});
    CHECK(cross.profile == Profile::CrossesEarly);
    REQUIRE(cross.crossing);
    CHECK(*cross.crossing == doctest::Approx(0.25 + 0.25 * 0.2 / 0.3).epsilon(1e-15));

    const Classification dive = classify({0.0, 0.25, 0.5}, {0.5, -0.1, -1e200}, true);
    CHECK(dive.profile == Profile::TerminalNegative);

    CHECK(to_string(Profile::CrossesEarly) == "CROSSES_EARLY");
    CHECK(to_string(Profile::PositiveWithLocalMax) == "POSITIVE_WITH_LOCAL_MAX");
    CHECK(to_string(Profile::PositiveNoMax) == "POSITIVE_NO_MAX");
    CHECK(to_string(Profile::TerminalNegative) == "TERMINAL_NEGATIVE");
}

TEST_CASE("slopes below k* cross, slopes above stay nonnegative") {
    const auto& p = reference_params();
    const double k_star = reference_solution().k_star;
    for (double dk : {0.01, 0.1, 0.5, 2.0, 10.0}) {
        const WTrajectory below = integrate_W(k_star - dk, p, ShootConfig{});
        CHECK((below.classification.profile == Profile::CrossesEarly ||
               below.classification.profile == Profile::TerminalNegative));
        const WTrajectory above = integrate_W(k_star + dk, p, ShootConfig{});
        CHECK((above.classification.profile == Profile::PositiveWithLocalMax ||
               above.classification.profile == Profile::PositiveNoMax));
        CHECK(above.terminal_W() > 0.0);
    }
}

TEST_CASE("shooting satisfies the boundary conditions") {
    const auto& p = reference_params();
    const ShootConfig cfg;
    const auto start = std::chrono::steady_clock::now();
    const HjbSolution sol = shoot_kstar(p, cfg);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    CHECK(seconds < 5.0);
    CHECK(std::abs(sol.trajectory.terminal_W()) <= cfg.tol_terminal);
    CHECK(*std::min_element(sol.trajectory.Ws.begin(), sol.trajectory.Ws.end()) >= -cfg.tol_terminal);
    CHECK(sol.bracket_hi - sol.bracket_lo <= cfg.tol_k);
    CHECK(sol.k_star == sol.bracket_hi);
    CHECK(sol.trajectory.k == sol.k_star);
    CHECK(sol.trajectory.Ws.front() == p.C_L);
    CHECK(sol.Q_of_r0 == doctest::Approx(sol.Q(0.5)).epsilon(1e-15));
    CHECK(sol.residual_sup == hjb_residual(sol, p));
}

TEST_CASE("Q interpolation reproduces the nodes") {
    const auto& sol = reference_solution();
    const auto& t = sol.trajectory;
    for (std::size_t i = 0; i < t.xs.size(); i += 397) CHECK(sol.Q(t.xs[i]) == doctest::Approx(t.Ys[i]).epsilon(1e-13));
}

TEST_CASE("different starting brackets find the same k*") {
    const auto& p = reference_params();
    ShootConfig narrow;
    narrow.k_lo = -0.5;
    narrow.k_hi = 0.5;
    ShootConfig wide;
    wide.k_lo = -8.0;
    wide.k_hi = 8.0;
    const double a = shoot_kstar(p, narrow).k_star;
    const double b = shoot_kstar(p, wide).k_star;
    CHECK(std::abs(a - b) <= 2.0 * narrow.tol_k);
}

TEST_CASE("bracket expansion gives up after the configured doublings") {
    ModelParams p;
    ShootConfig cfg;
    cfg.k_lo = 100.0;
    cfg.k_hi = 101.0;
    cfg.max_doublings = 2;
    CHECK_THROWS_AS((void)shoot_kstar(p, cfg), SolverError);
}

TEST_CASE("comparison property on random slope pairs") {
    const auto& p = reference_params();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> k_dist(-2.0, 2.0);
    int violations = 0;
    for (int trial = 0; trial < 50; ++trial) {
        double k1 = k_dist(rng);
        double k2 = k_dist(rng);
        if (k2 > k1) std::swap(k1, k2);
        const WTrajectory hi = integrate_W(k1, p, ShootConfig{});
        const WTrajectory lo = integrate_W(k2, p, ShootConfig{});
        const std::size_t common = std::min(hi.Ws.size(), lo.Ws.size());
        for (std::size_t i = 0; i < common; ++i)
            if (std::isfinite(hi.Ws[i]) && std::isfinite(lo.Ws[i]) && hi.Ws[i] < lo.Ws[i] - 1e-9) ++violations;
    }
    CHECK(violations == 0);
}

TEST_CASE("terminal value is nondecreasing in k") {
    const auto& p = reference_params();
    double previous = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 80; ++i) {
        const double k = -3.0 + 5.0 * i / 80.0;
        const double g = terminal_or_minus_inf(integrate_W(k, p, ShootConfig{}));
        CHECK(g >= previous);
        previous = g;
    }
}

TEST_CASE("Y is the running integral of W") {
    const auto& t = reference_solution().trajectory;
    const double h = t.step();
    double integral = t.K_k;
    double worst = 0.0;
    for (std::size_t i = 1; i < t.xs.size(); ++i) {
        integral += 0.5 * (t.xs[i] - t.xs[i - 1]) * (t.Ws[i] + t.Ws[i - 1]);
        worst = std::max(worst, std::abs(integral - t.Ys[i]));
    }
    CHECK(worst <= 10.0 * h * h);
}

TEST_CASE("grid refinement moves k* by less than 4 tol_k") {
    const auto& p = reference_params();
    ShootConfig fine;
    fine.grid_n = 8000;
    CHECK(std::abs(shoot_kstar(p, fine).k_star - reference_solution().k_star) < 4.0 * fine.tol_k);
}

TEST_CASE("crossings are transversal") {
    const auto& p = reference_params();
    int crossings = 0;
    for (int i = 0; i <= 40; ++i) {
        const double k = -4.0 + 2.25 * i / 40.0;
        const WTrajectory t = integrate_W(k, p, ShootConfig{});
        if (t.classification.profile != Profile::CrossesEarly) continue;
        ++crossings;
        const double c = *t.classification.crossing;
        const auto j = static_cast<std::size_t>(std::upper_bound(t.xs.begin(), t.xs.end(), c) - t.xs.begin());
        REQUIRE(j >= 1);
        REQUIRE(j < t.xs.size());
        const double slope = (t.Ws[j] - t.Ws[j - 1]) / (t.xs[j] - t.xs[j - 1]);
        CHECK(slope < -1e-6);
    }
    CHECK(crossings > 10);
}

WTrajectory constant_candidate(int n, double kappa) {
    WTrajectory t;
    for (int i = 0; i <= n; ++i) {
        t.xs.push_back((1.0 - 1e-3) * i / n);
        t.Ws.push_back(0.0);
        t.Ys.push_back(kappa);
    }
    return t;
}

// Largest gap between two residual profiles over nodes with lo <= x <= hi.
double profile_gap(const std::vector<std::pair<double, double>>& a,
                   const std::vector<std::pair<double, double>>& b, double lo, double hi) {
    REQUIRE(a.size() == b.size());
    double gap = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].first >= lo && a[i].first <= hi) gap = std::max(gap, std::abs(a[i].second - b[i].second));
    return gap;
}

TEST_CASE("residual of a constant candidate is G - alpha kappa") {
    const auto& p = reference_params();
    const double kappa = 0.7;
    double previous = 0.0;
    for (int n : {1000, 2000, 4000}) {
        const auto profile = hjb_residual_profile(constant_candidate(n, kappa), p);
        REQUIRE(profile.size() > static_cast<std::size_t>(n - 10));
        // G enters through its stencil mean, so the closed form holds up to O(h^2).
        double deviation = 0.0;
        for (const auto& [x, r] : profile) {
            const double expected = std::abs(G(x, p) - p.alpha * kappa) / (1.0 + p.alpha * kappa);
            if (x <= 0.9) CHECK(r == doctest::Approx(expected).epsilon(1e-5));
            if (x <= 0.99) deviation = std::max(deviation, std::abs(r - expected));
        }
        if (previous > 0.0) CHECK(deviation <= previous / 3.5);
        previous = deviation;
    }
    for (const auto& [x, r] : hjb_residual_profile(constant_candidate(1000, kappa), p, SlopeSource::SystemRhs))
        CHECK(r < 1e-14);
}

TEST_CASE("residual is small and converges under refinement") {
    const auto& p = reference_params();
    double previous_sup = 0.0;
    double previous_inner = 0.0;
    for (int n : {2000, 4000, 8000}) {
        ShootConfig cfg;
        cfg.grid_n = n;
        const HjbSolution sol = shoot_kstar(p, cfg);
        const auto profile = hjb_residual_profile(sol.trajectory, p);
        double inner = 0.0;
        for (const auto& [x, r] : profile)
            if (x >= 0.02 && x <= 0.99) inner = std::max(inner, r);
        if (n == 4000) CHECK(sol.residual_sup <= 1e-3);
        if (previous_sup > 0.0) {
            CHECK(sol.residual_sup < previous_sup);
            CHECK(inner <= previous_inner / 3.5);
        }
        previous_sup = sol.residual_sup;
        previous_inner = inner;
    }
}

TEST_CASE("finite-difference and system residuals agree to second order") {
    const auto& p = reference_params();
    std::vector<double> gaps;
    for (int n : {1000, 2000, 4000}) {
        ShootConfig cfg;
        cfg.grid_n = n;
        const WTrajectory t = integrate_W(reference_solution().k_star, p, cfg);
        gaps.push_back(profile_gap(hjb_residual_profile(t, p, SlopeSource::CentralDifference),
                                   hjb_residual_profile(t, p, SlopeSource::SystemRhs), 0.02, 0.99));
    }
    CHECK(gaps[1] <= gaps[0] / 3.5);
    CHECK(gaps[2] <= gaps[1] / 3.5);
}

TEST_CASE("inelastic regime solves with the same boundary conditions") {
    const auto& sol = fixtures::inelastic_solution();
    CHECK(std::abs(sol.trajectory.terminal_W()) <= 1e-4);
    CHECK(*std::min_element(sol.trajectory.Ws.begin(), sol.trajectory.Ws.end()) >= -1e-4);
    CHECK(sol.residual_sup <= 1e-3);
}

}  // TEST_SUITE
