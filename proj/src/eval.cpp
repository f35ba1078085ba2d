#include "recycle/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <omp.h>

#include "recycle/errors.hpp"

namespace recycle {

namespace {

void summarize(EvalReport& report, const std::vector<PathOutcome>& outcomes) {
    const auto n = static_cast<double>(outcomes.size());
    double sum = 0.0;
    double terminal = 0.0;
    report.max_abs_profit = 0.0;
    report.min_price = HUGE_VAL;
    report.max_price = -HUGE_VAL;
    report.max_investment = 0.0;
    for (const auto& o : outcomes) {
        sum += o.value;
        terminal += o.terminal_r;
        report.max_abs_profit = std::max(report.max_abs_profit, o.max_abs_profit);
        report.min_price = std::min(report.min_price, o.min_price);
        report.max_price = std::max(report.max_price, o.max_price);
        report.max_investment = std::max(report.max_investment, o.max_investment);
    }
    report.j_mean = sum / n;
    report.mean_terminal_r = terminal / n;
    double squares = 0.0;
    for (const auto& o : outcomes) squares += (o.value - report.j_mean) * (o.value - report.j_mean);
    report.j_se = outcomes.size() > 1 ? std::sqrt(squares / (n - 1.0) / n) : 0.0;
    report.n_paths = static_cast<long long>(outcomes.size());
}

double tail_bound(double horizon, double max_abs_profit, double alpha) {
    return std::exp(-alpha * horizon) * max_abs_profit / alpha;
}

std::string format_k(double k) {
    std::ostringstream os;
    os << "k=" << k;
    return os.str();
}

}  // namespace

double path_profit(double p, double u, double r, const ModelParams& params) {
    if (r >= 1.0 && params.elastic()) {
        if (!(u >= 0.0)) throw DomainError("profit: u must be nonnegative");
        return -u;
    }
    return profit(p, u, r, params);
}

double discounted_profit(const RegulatedPath& path, const ModelParams& params, double dt, std::size_t first,
                         std::size_t last) {
    const std::size_t n = path.ts.size();
    for (const auto* v : {&path.rs, &path.Ls, &path.us, &path.ps})
        if (v->size() != n) throw DomainError("discounted_profit: series lengths differ");
    if (n == 0 || last > n - 1 || first > last) throw DomainError("discounted_profit: step range out of bounds");
    double total = 0.0;
    for (std::size_t i = first; i < last; ++i) {
        const double discount = std::exp(-params.alpha * path.ts[i]);
        const double dL = path.Ls[i + 1] - path.Ls[i];
        total += discount * (path_profit(path.ps[i], path.us[i], path.rs[i], params) * dt - params.C_L * dL);
    }
    return total;
}

double discounted_profit(const RegulatedPath& path, const ModelParams& params, double dt) {
    if (path.ts.empty()) throw DomainError("discounted_profit: empty path");
    return discounted_profit(path, params, dt, 0, path.ts.size() - 1);
}

namespace {

// discounts[i] = e^{-alpha i dt}, the same expression discounted_profit evaluates.
std::vector<double> discount_table(const ModelParams& params, const SimConfig& cfg) {
    std::vector<double> table(static_cast<std::size_t>(cfg.steps()));
    for (std::size_t i = 0; i < table.size(); ++i)
        table[i] = std::exp(-params.alpha * (static_cast<double>(i) * cfg.dt));
    return table;
}

PathOutcome evaluate_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                          std::uint64_t path_index, const std::vector<double>& discounts) {
    NormalStream normals(cfg.seed, path_index);
    PathOutcome out;
    out.min_price = HUGE_VAL;
    out.max_price = -HUGE_VAL;
    double total = 0.0;
    double L = 0.0;
    out.terminal_r = run_path(policy, params, cfg, normals, [&](const StepRecord& s) {
        const double pi = path_profit(s.c.p, s.c.u, s.r, params);
        const double discount = discounts[static_cast<std::size_t>(s.index)];
        // Match discounted_profit: the penalty uses the difference of the running local time.
        const double L_next = L + s.dL;
        total += discount * (pi * cfg.dt - params.C_L * (L_next - L));
        L = L_next;
        out.max_abs_profit = std::max(out.max_abs_profit, std::abs(pi));
        out.min_price = std::min(out.min_price, s.c.p);
        out.max_price = std::max(out.max_price, s.c.p);
        out.max_investment = std::max(out.max_investment, s.c.u);
    });
    out.value = total;
    return out;
}

}  // namespace

PathOutcome evaluate_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                          std::uint64_t path_index) {
    return evaluate_path(policy, params, cfg, path_index, discount_table(params, cfg));
}

EvalReport monte_carlo_J(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                         long long n_paths, std::uint64_t base_seed, const EvalOptions& options) {
    validate(params);
    validate(cfg);
    if (n_paths < 2) throw ValidationError("n_paths must be at least 2");

    SimConfig run = cfg;
    run.seed = base_seed;
    run.regulated = true;
    const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();

    EvalReport report;
    report.policy_label = policy.label();
    std::vector<PathOutcome> outcomes(static_cast<std::size_t>(n_paths));
    for (int attempt = 0; attempt < 4; ++attempt) {
        const std::vector<double> discounts = discount_table(params, run);
#pragma omp parallel for schedule(dynamic, 8) num_threads(threads)
        for (long long i = 0; i < n_paths; ++i)
            outcomes[static_cast<std::size_t>(i)] = evaluate_path(policy, params, run, static_cast<std::uint64_t>(i), discounts);

        summarize(report, outcomes);
        report.horizon = static_cast<double>(run.steps()) * run.dt;
        report.tail_bound = tail_bound(report.horizon, report.max_abs_profit, params.alpha);
        const double allowed = options.truncation_fraction * std::abs(report.j_mean);
        if (!options.extend_horizon || report.tail_bound <= allowed || allowed <= 0.0) break;
        const double needed =
            std::log(report.max_abs_profit / (params.alpha * allowed)) / params.alpha;
        run.T = std::ceil(1.25 * needed / run.dt) * run.dt;
    }
    if (options.keep_path_values) {
        report.path_values.resize(outcomes.size());
        std::transform(outcomes.begin(), outcomes.end(), report.path_values.begin(),
                       [](const PathOutcome& o) { return o.value; });
    }
    return report;
}

EvalReport monte_carlo_J_serial(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                                long long n_paths, std::uint64_t base_seed) {
    validate(params);
    validate(cfg);
    if (n_paths < 2) throw ValidationError("n_paths must be at least 2");
    SimConfig run = cfg;
    run.seed = base_seed;
    run.regulated = true;

    EvalReport report;
    report.policy_label = policy.label();
    std::vector<PathOutcome> outcomes(static_cast<std::size_t>(n_paths));
    for (long long i = 0; i < n_paths; ++i) {
        const RegulatedPath path = simulate_path(policy, params, run, static_cast<std::uint64_t>(i));
        auto& o = outcomes[static_cast<std::size_t>(i)];
        o.value = discounted_profit(path, params, run.dt);
        o.terminal_r = path.rs.back();
        o.min_price = HUGE_VAL;
        o.max_price = -HUGE_VAL;
        for (std::size_t s = 0; s + 1 < path.size(); ++s) {
            o.max_abs_profit = std::max(o.max_abs_profit, std::abs(path_profit(path.ps[s], path.us[s], path.rs[s], params)));
            o.min_price = std::min(o.min_price, path.ps[s]);
            o.max_price = std::max(o.max_price, path.ps[s]);
            o.max_investment = std::max(o.max_investment, path.us[s]);
        }
    }
    summarize(report, outcomes);
    report.horizon = static_cast<double>(run.steps()) * run.dt;
    report.tail_bound = tail_bound(report.horizon, report.max_abs_profit, params.alpha);
    report.path_values.resize(outcomes.size());
    std::transform(outcomes.begin(), outcomes.end(), report.path_values.begin(),
                   [](const PathOutcome& o) { return o.value; });
    return report;
}

PairedDifference paired_difference(const EvalReport& a, const EvalReport& b) {
    if (a.path_values.size() != b.path_values.size() || a.path_values.size() < 2)
        throw DomainError("paired_difference: reports need matching per-path values");
    const auto n = static_cast<double>(a.path_values.size());
    PairedDifference d;
    for (std::size_t i = 0; i < a.path_values.size(); ++i) d.mean += a.path_values[i] - b.path_values[i];
    d.mean /= n;
    double squares = 0.0;
    for (std::size_t i = 0; i < a.path_values.size(); ++i) {
        const double e = a.path_values[i] - b.path_values[i] - d.mean;
        squares += e * e;
    }
    d.se = std::sqrt(squares / (n - 1.0) / n);
    return d;
}

std::vector<EvalReport> compare_policies(const std::vector<double>& k_values, const ModelParams& params,
                                         const SimConfig& cfg, const ShootConfig& shoot, long long n_paths,
                                         std::uint64_t base_seed, const EvalOptions& options) {
    std::vector<EvalReport> reports;
    reports.reserve(k_values.size());
    for (double k : k_values) {
        const WTrajectory traj = integrate_W(k, params, shoot);
        if (traj.truncated) throw SolverError("trajectory for " + format_k(k) + " overflowed");
        const Policy policy = Policy::optimal(traj, params, format_k(k));
        reports.push_back(monte_carlo_J(policy, params, cfg, n_paths, base_seed, options));
    }
    return reports;
}

VerificationResult verification_inequality(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                                           long long n_paths, std::uint64_t base_seed, const HjbSolution& sol,
                                           double allowance_fraction, const EvalOptions& options) {
    VerificationResult v;
    v.report = monte_carlo_J(policy, params, cfg, n_paths, base_seed, options);
    const double q = sol.Q(cfg.r0);
    v.report.q_of_r0 = q;
    v.allowance = allowance_fraction * std::abs(q);
    v.margin = q + 3.0 * v.report.j_se + v.allowance - v.report.j_mean;
    v.holds = v.margin >= 0.0;
    return v;
}

std::vector<SweepRow> sensitivity_sweep(const std::string& param_name, const std::vector<double>& values,
                                        const ModelParams& base_params, const SimConfig& cfg,
                                        const ShootConfig& shoot, long long n_paths, std::uint64_t base_seed,
                                        const EvalOptions& options) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double value : values) {
        SweepRow row;
        row.param_name = param_name;
        row.value = value;
        try {
            ModelParams p = base_params;
            set_param(p, param_name, value);
            validate(p);
            const HjbSolution sol = shoot_kstar(p, shoot, cfg.r0);
            const EvalReport report = monte_carlo_J(make_policy(sol, p), p, cfg, n_paths, base_seed, options);
            row.k_star = sol.k_star;
            row.q_of_r0 = sol.Q_of_r0;
            row.j_mean = report.j_mean;
            row.j_se = report.j_se;
            row.mean_terminal_r = report.mean_terminal_r;
            row.min_price = report.min_price;
            row.max_price = report.max_price;
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace recycle
