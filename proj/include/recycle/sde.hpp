#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "recycle/errors.hpp"
#include "recycle/model.hpp"
#include "recycle/policy.hpp"
#include "recycle/rng.hpp"

namespace recycle {

struct SimConfig {
    double r0 = 0.5;
    double T = 2.0;
    double dt = 0.002;
    std::uint64_t seed = 1;
    bool regulated = true;

    [[nodiscard]] long long steps() const { return std::llround(T / dt); }
    bool operator==(const SimConfig&) const = default;
};

const SimConfig& validate(const SimConfig& cfg);

/// One simulated trajectory. Every series has steps + 1 entries indexed by the time grid;
/// us/ps hold the controls applied from each node, and noise[i] / proposals[i] belong to the
/// step leaving node i (the final entry is unused and zero).
struct RegulatedPath {
    std::vector<double> ts;
    std::vector<double> rs;
    std::vector<double> Ls;
    std::vector<double> Us;
    std::vector<double> us;
    std::vector<double> ps;
    std::vector<double> noise;      ///< Brownian increments sqrt(dt) * xi
    std::vector<double> proposals;  ///< Euler proposals before projection
    double j_realized = 0.0;

    [[nodiscard]] std::size_t size() const noexcept { return ts.size(); }
};

/// Per-step record handed to path observers.
struct StepRecord {
    long long index;
    double t;
    double r;         ///< state at the start of the step
    Controls c;       ///< controls frozen over the step
    double drift;     ///< R(u, r)
    double dW;        ///< Brownian increment
    double proposal;  ///< r + R dt + sigma dW
    double dL;
    double dU;
    double r_next;
};

/// Euler-Maruyama with a one-step Skorokhod projection onto [0, 1]. Calls
/// `observer(const StepRecord&)` for every step and returns the terminal state.
/// In unregulated mode the state is left free and the drift sees r clamped to [0, 1].
/// `normals()` must yield standard normal draws; NormalStream is the production source.
template <class Normals, class Observer>
double run_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg, Normals& normals,
                Observer&& observer) {
    const long long n = cfg.steps();
    const double dt = cfg.dt;
    const double sqrt_dt = std::sqrt(dt);
    double r = cfg.r0;
    double last_u = -1.0;
    double last_root = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double r_eval = r < 0.0 ? 0.0 : (r > 1.0 ? 1.0 : r);
        double root;
        const Controls c = policy.at(r_eval, root);
        if (root < 0.0) {
            // Constant-control policies repeat u, so reuse its root.
            if (c.u != last_u) {
                if (!(c.u >= 0.0)) throw DomainError("run_path: investment must be nonnegative");
                last_u = c.u;
                last_root = power(c.u, 1.0 / params.gamma);
            }
            root = last_root;
        }
        const double drift = drift_from_root(root, r_eval, params);
        const double dW = sqrt_dt * normals();
        const double proposal = r + drift * dt + params.sigma * dW;
        double dL = 0.0;
        double dU = 0.0;
        double next = proposal;
        if (cfg.regulated) {
            if (proposal < 0.0) {
                dL = -proposal;
                next = 0.0;
            } else if (proposal > 1.0) {
                dU = proposal - 1.0;
                next = 1.0;
            }
        }
        observer(StepRecord{i, static_cast<double>(i) * dt, r, c, drift, dW, proposal, dL, dU, next});
        r = next;
    }
    return r;
}

/// Regulated path under `policy`, storing every series. Deterministic in (cfg.seed, path_index).
[[nodiscard]] RegulatedPath simulate_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                                          std::uint64_t path_index = 0);

/// Free Euler-Maruyama path under constant controls; requires cfg.regulated == false.
[[nodiscard]] RegulatedPath simulate_unregulated(const ModelParams& params, const SimConfig& cfg, double u,
                                                 double p, std::uint64_t path_index = 0);

}  // namespace recycle
