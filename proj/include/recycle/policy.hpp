#pragma once

#include <memory>
#include <string>
#include <vector>

#include "recycle/hjb_solver.hpp"
#include "recycle/model.hpp"

namespace recycle {

inline constexpr double kDefaultPriceFloor = 1e-9;

struct Controls {
    double u = 0.0;  ///< recycling investment
    double p = 1.0;  ///< retail price
};

/// p*(r) = a1 c_v (1 - r)/(a1 - 1) floored at p_min when a1 > 1; the cap p0 when a1 <= 1.
[[nodiscard]] double optimal_price(double r, const ModelParams& params, double p_min = kDefaultPriceFloor);

/// u*(r) = F((1 - r) Q'(r)).
[[nodiscard]] double optimal_investment(double r, const ModelParams& params, double qprime_at_r);

/// The supremand of the HJB equation at fixed controls (u, p).
[[nodiscard]] double hamiltonian(double u, double p, double r, double q, double qp, double qpp,
                                 const ModelParams& params);

/// Lattice argmax of `hamiltonian` over [0, u_max] x [p_min, p_max] with (grid + 1)^2 points.
/// Ties resolve to the lexicographically smallest (u, p).
[[nodiscard]] Controls argmax_hamiltonian_bruteforce(double r, double q, double qp, double qpp,
                                                     const ModelParams& params, double u_max,
                                                     double p_max, int grid,
                                                     double p_min = kDefaultPriceFloor);

/// Piecewise-linear interpolant of a nonnegative-clamped series on a uniform grid, extended by
/// its last value to the right.
class GridInterpolant {
public:
    GridInterpolant() = default;
    GridInterpolant(const std::vector<double>& xs, const std::vector<double>& values);

    [[nodiscard]] double operator()(double x) const noexcept;
    [[nodiscard]] const std::vector<double>& nodes() const noexcept { return xs_; }
    [[nodiscard]] const std::vector<double>& values() const noexcept { return values_; }

private:
    std::vector<double> xs_;
    std::vector<double> values_;
    double inv_step_ = 0.0;
};

/// Feedback control r -> (u, p).
class Policy {
public:
    enum class Kind { Optimal, Zero, Fixed };

    /// Closed-form controls driven by the solved Q' (or by any shot W_k).
    static Policy optimal(const WTrajectory& traj, const ModelParams& params, std::string label = "optimal",
                          double p_min = kDefaultPriceFloor);
    /// No investment, price held at the cap p0.
    static Policy zero(const ModelParams& params);
    static Policy fixed(double u, double p);

    [[nodiscard]] Kind kind() const noexcept { return kind_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }
    [[nodiscard]] double qprime(double r) const noexcept;
    [[nodiscard]] Controls at(double r) const noexcept;
    /// Same controls; `root` receives u^{1/gamma} when the policy has it for free, else -1.
    [[nodiscard]] Controls at(double r, double& root) const noexcept;
    [[nodiscard]] double shot_slope() const noexcept { return k_; }

private:
    Kind kind_ = Kind::Zero;
    std::string label_;
    ModelParams params_;
    GridInterpolant qprime_;
    Controls fixed_;
    double p_min_ = kDefaultPriceFloor;
    double k_ = 0.0;
};

[[nodiscard]] Policy make_policy(const HjbSolution& sol, const ModelParams& params);

}  // namespace recycle
