#include "recycle/policy.hpp"

#include <algorithm>
#include <cmath>

#include "recycle/errors.hpp"

namespace recycle {

double optimal_price(double r, const ModelParams& params, double p_min) {
    if (!params.elastic()) return params.p0;
    const double p = params.a1 * params.c_v * (1.0 - r) / (params.a1 - 1.0);
    return std::max(p, p_min);
}

double optimal_investment(double r, const ModelParams& params, double qprime_at_r) {
    return F((1.0 - r) * qprime_at_r, params);
}

double hamiltonian(double u, double p, double r, double q, double qp, double qpp, const ModelParams& params) {
    return 0.5 * params.sigma2() * qpp + qp * drift_R(u, r, params) + profit(p, u, r, params) -
           params.alpha * q;
}

Controls argmax_hamiltonian_bruteforce(double r, double q, double qp, double qpp, const ModelParams& params,
                                       double u_max, double p_max, int grid, double p_min) {
    if (!(u_max > 0.0 && p_max > p_min)) throw DomainError("argmax: need u_max > 0 and p_max > p_min");
    if (grid < 100) throw DomainError("argmax: grid must be at least 100");
    Controls best{0.0, p_min};
    double best_h = -HUGE_VAL;
    for (int i = 0; i <= grid; ++i) {
        const double u = u_max * i / grid;
        for (int j = 0; j <= grid; ++j) {
            const double p = p_min + (p_max - p_min) * j / grid;
            const double h = hamiltonian(u, p, r, q, qp, qpp, params);
            if (h > best_h) {
                best_h = h;
                best = {u, p};
            }
        }
    }
    return best;
}

GridInterpolant::GridInterpolant(const std::vector<double>& xs, const std::vector<double>& values)
    : xs_(xs), values_(values.size()) {
    if (xs.size() != values.size() || xs.size() < 2) throw DomainError("interpolant needs >= 2 matching nodes");
    std::transform(values.begin(), values.end(), values_.begin(), [](double v) { return std::max(v, 0.0); });
    inv_step_ = 1.0 / (xs_[1] - xs_[0]);
}

double GridInterpolant::operator()(double x) const noexcept {
    if (values_.empty()) return 0.0;
    if (x <= xs_.front()) return values_.front();
    if (x >= xs_.back()) return values_.back();
    auto i = static_cast<std::size_t>((x - xs_.front()) * inv_step_);
    i = std::min(i, xs_.size() - 2);
    // The last cell may be shorter than the rest.
    if (x > xs_[i + 1]) ++i;
    const double t = (x - xs_[i]) / (xs_[i + 1] - xs_[i]);
    return values_[i] + t * (values_[i + 1] - values_[i]);
}

Policy Policy::optimal(const WTrajectory& traj, const ModelParams& params, std::string label, double p_min) {
    Policy p;
    p.kind_ = Kind::Optimal;
    p.label_ = std::move(label);
    p.params_ = params;
    p.qprime_ = GridInterpolant(traj.xs, traj.Ws);
    p.p_min_ = p_min;
    p.k_ = traj.k;
    return p;
}

Policy Policy::zero(const ModelParams& params) {
    Policy p;
    p.kind_ = Kind::Zero;
    p.label_ = "zero";
    p.params_ = params;
    p.fixed_ = {0.0, params.p0};
    return p;
}

Policy Policy::fixed(double u, double price) {
    if (!(u >= 0.0) || !(price > 0.0)) throw DomainError("fixed policy needs u >= 0 and p > 0");
    Policy p;
    p.kind_ = Kind::Fixed;
    p.label_ = "fixed(u=" + std::to_string(u) + ",p=" + std::to_string(price) + ")";
    p.fixed_ = {u, price};
    return p;
}

double Policy::qprime(double r) const noexcept { return kind_ == Kind::Optimal ? qprime_(r) : 0.0; }

Controls Policy::at(double r) const noexcept {
    double root;
    return at(r, root);
}

Controls Policy::at(double r, double& root) const noexcept {
    root = -1.0;
    if (kind_ != Kind::Optimal) return fixed_;
    const double x = (1.0 - r) * qprime_(r);
    // u = x^{gamma/(gamma-1)} = x * root, the same arithmetic as F.
    root = x > 0.0 ? power(x, 1.0 / (params_.gamma - 1.0)) : 0.0;
    return {x * root, optimal_price(r, params_, p_min_)};
}

Policy make_policy(const HjbSolution& sol, const ModelParams& params) {
    return Policy::optimal(sol.trajectory, params, "k*");
}

}  // namespace recycle
