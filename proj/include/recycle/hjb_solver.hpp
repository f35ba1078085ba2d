#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "recycle/model.hpp"

namespace recycle {

/// Discretization of the shooting problem on [0, 1 - eps_boundary].
struct ShootConfig {
    int grid_n = 4000;
    double eps_boundary = 1e-6;
    double k_lo = -2.0;
    double k_hi = 2.0;
    double tol_k = 1e-5;
    double tol_terminal = 1e-4;
    int max_doublings = 20;
    int max_bisections = 200;

    bool operator==(const ShootConfig&) const = default;
};

/// Throws ValidationError if the configuration is unusable.
const ShootConfig& validate(const ShootConfig& cfg);

enum class Profile {
    CrossesEarly,          ///< W changes sign before the last grid point
    PositiveWithLocalMax,  ///< W >= 0 and W has a strict local maximum (x = 0 included)
    PositiveNoMax,         ///< W >= 0 and nondecreasing to the end
    TerminalNegative,      ///< integration truncated while W was diving to -infinity
};

[[nodiscard]] std::string_view to_string(Profile p) noexcept;

struct Classification {
    Profile profile = Profile::PositiveNoMax;
    /// First zero of W by linear interpolation (CrossesEarly / TerminalNegative).
    std::optional<double> crossing;
    /// Grid index of the first strict local maximum, if any.
    std::optional<std::size_t> max_index;
};

/// One shot of the parameterized initial-value problem
///   Y' = W,  W' = (2/sigma^2)[(1-gamma)(1-x)^{gamma/(gamma-1)} F(W) + delta x W - G(x) + alpha Y]
/// with W(0) = C_L, W'(0) = k and Y(0) = K_k.
struct WTrajectory {
    double k = 0.0;
    double K_k = 0.0;
    std::vector<double> xs;
    std::vector<double> Ws;
    std::vector<double> Ys;
    bool truncated = false;  ///< integration stopped on overflow before the last grid point
    Classification classification;

    [[nodiscard]] double terminal_W() const { return Ws.back(); }
    [[nodiscard]] double step() const { return xs.size() > 1 ? xs[1] - xs[0] : 0.0; }
};

/// K_k = (sigma^2/2 k + (gamma-1) F(C_L)) / alpha.
[[nodiscard]] double integration_constant(double k, const ModelParams& params);

/// Right-hand side of the first-order system, returns W'.
[[nodiscard]] double w_slope(double x, double y, double w, const ModelParams& params);

/// Fixed-step RK4 over the configured grid. Throws ValidationError when sigma == 0.
[[nodiscard]] WTrajectory integrate_W(double k, const ModelParams& params, const ShootConfig& cfg);

/// Profile of a (possibly truncated) W series on its grid.
[[nodiscard]] Classification classify(const std::vector<double>& xs, const std::vector<double>& Ws,
                                      bool truncated = false);
[[nodiscard]] Classification classify(const WTrajectory& traj);

struct HjbSolution {
    double k_star = 0.0;
    WTrajectory trajectory;
    double residual_sup = 0.0;
    double r0 = 0.5;
    double Q_of_r0 = 0.0;
    int bisections = 0;
    double bracket_lo = 0.0;  ///< final bracket; k_star is its upper end
    double bracket_hi = 0.0;

    /// Q(r) by cubic Hermite interpolation of (Y, W) on the solver grid; r in [0, 1].
    [[nodiscard]] double Q(double r) const;
};

/// Locates k* = inf{k : W_k stays nonnegative on the grid} by bracketing and bisection,
/// returning the trajectory at the upper end of the final bracket.
[[nodiscard]] HjbSolution shoot_kstar(const ModelParams& params, const ShootConfig& cfg,
                                      double r0 = 0.5);

enum class SlopeSource {
    CentralDifference,  ///< Q'' from central differences of W, singular G part subtracted
    SystemRhs,          ///< Q'' = W' evaluated from the first-order system
};

/// Sup over interior nodes x in [2/n, 1 - eps - 2/n] of the normalized HJB residual
///   |sigma^2/2 Q'' + (gamma-1)(1-x)^{gamma/(gamma-1)} F(Q') - delta x Q' + G(x) - alpha Q| / (1 + |alpha Q|).
[[nodiscard]] double hjb_residual(const WTrajectory& traj, const ModelParams& params,
                                  SlopeSource source = SlopeSource::CentralDifference);
[[nodiscard]] double hjb_residual(const HjbSolution& sol, const ModelParams& params);

/// Pointwise residual series over the same interior nodes (x, residual).
[[nodiscard]] std::vector<std::pair<double, double>> hjb_residual_profile(
    const WTrajectory& traj, const ModelParams& params,
    SlopeSource source = SlopeSource::CentralDifference);

}  // namespace recycle
