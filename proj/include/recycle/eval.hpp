#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "recycle/hjb_solver.hpp"
#include "recycle/model.hpp"
#include "recycle/policy.hpp"
#include "recycle/sde.hpp"

namespace recycle {

/// Running profit booked along a simulated path. With elastic demand a state pinned at r = 1 sells
/// nothing: the optimal price vanishes there and the continuous process spends no time at the barrier.
[[nodiscard]] double path_profit(double p, double u, double r, const ModelParams& params);

/// Sum over steps of e^{-alpha t_i} [pi(p_i, u_i, r_i) dt - C_L dL_i], controls at the left node.
[[nodiscard]] double discounted_profit(const RegulatedPath& path, const ModelParams& params, double dt);

/// Same sum restricted to steps [first, last).
[[nodiscard]] double discounted_profit(const RegulatedPath& path, const ModelParams& params, double dt,
                                       std::size_t first, std::size_t last);

/// Per-path outcome of the streaming kernel.
struct PathOutcome {
    double value = 0.0;       ///< realized discounted profit
    double terminal_r = 0.0;
    double max_abs_profit = 0.0;
    double min_price = 0.0;
    double max_price = 0.0;
    double max_investment = 0.0;
};

/// Simulates one regulated path from stream (base_seed, path_index) and accumulates its
/// discounted profit without storing the series.
[[nodiscard]] PathOutcome evaluate_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                                        std::uint64_t path_index);

struct EvalOptions {
    int threads = 0;                      ///< 0 keeps the OpenMP default
    double truncation_fraction = 1e-3;    ///< tail bound must stay below this share of |j_mean|
    bool extend_horizon = true;           ///< rerun with a longer T when the tail bound is violated
    bool keep_path_values = true;
};

struct EvalReport {
    std::string policy_label;
    double j_mean = 0.0;
    double j_se = 0.0;
    long long n_paths = 0;
    std::optional<double> q_of_r0;
    double horizon = 0.0;        ///< T actually simulated
    double tail_bound = 0.0;     ///< e^{-alpha T} max|pi| / alpha
    double max_abs_profit = 0.0;
    double mean_terminal_r = 0.0;
    double min_price = 0.0;
    double max_price = 0.0;
    double max_investment = 0.0;
    std::vector<double> path_values;  ///< indexed by path, for paired comparisons
};

/// Mean and standard error of `discounted_profit` over paths 0..n_paths-1 of stream base_seed,
/// parallel over paths. The reduction runs in path-index order, so the result does not depend
/// on the number of threads.
[[nodiscard]] EvalReport monte_carlo_J(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                                       long long n_paths, std::uint64_t base_seed,
                                       const EvalOptions& options = {});

/// Serial reference: stores every path with `simulate_path` and sums `discounted_profit`.
[[nodiscard]] EvalReport monte_carlo_J_serial(const Policy& policy, const ModelParams& params,
                                              const SimConfig& cfg, long long n_paths, std::uint64_t base_seed);

struct PairedDifference {
    double mean = 0.0;  ///< mean of a - b
    double se = 0.0;
};

/// Paired statistics of two reports evaluated on common random numbers.
[[nodiscard]] PairedDifference paired_difference(const EvalReport& a, const EvalReport& b);

/// One report per k, each from the policy driven by W_k, all on common random numbers.
[[nodiscard]] std::vector<EvalReport> compare_policies(const std::vector<double>& k_values,
                                                       const ModelParams& params, const SimConfig& cfg,
                                                       const ShootConfig& shoot, long long n_paths,
                                                       std::uint64_t base_seed, const EvalOptions& options = {});

struct VerificationResult {
    bool holds = false;
    double margin = 0.0;  ///< Q(r0) + 3 se + allowance - j_mean
    double allowance = 0.0;
    EvalReport report;
};

/// Statistical check of J(r0, u, p) <= Q(r0) with an Euler-bias allowance of
/// allowance_fraction * |Q(r0)|.
[[nodiscard]] VerificationResult verification_inequality(const Policy& policy, const ModelParams& params,
                                                         const SimConfig& cfg, long long n_paths,
                                                         std::uint64_t base_seed, const HjbSolution& sol,
                                                         double allowance_fraction = 0.02,
                                                         const EvalOptions& options = {});

struct SweepRow {
    std::string param_name;
    double value = 0.0;
    bool ok = false;
    std::string error;
    double k_star = 0.0;
    double q_of_r0 = 0.0;
    double j_mean = 0.0;
    double j_se = 0.0;
    double mean_terminal_r = 0.0;
    double min_price = 0.0;
    double max_price = 0.0;
};

/// Re-solves and re-evaluates the optimal policy for each value of one parameter.
/// Failures are recorded in their row and do not abort the sweep.
[[nodiscard]] std::vector<SweepRow> sensitivity_sweep(const std::string& param_name,
                                                      const std::vector<double>& values,
                                                      const ModelParams& base_params, const SimConfig& cfg,
                                                      const ShootConfig& shoot, long long n_paths,
                                                      std::uint64_t base_seed, const EvalOptions& options = {});

}  // namespace recycle
