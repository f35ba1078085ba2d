#include "recycle/hjb_solver.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "recycle/errors.hpp"

namespace recycle {

namespace {

constexpr double kBlowup = 1e150;

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

template <class Fn>
double gauss_legendre(double a, double b, Fn&& f) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) sum += kGlWeights[i] * f(mid + half * kGlNodes[i]);
    return half * sum;
}

// Integral of G over [a, b]. When G has an integrable singularity at r = 1 the substitution
// r = 1 - v^m turns (1 - r)^{1 - a1} into a smooth power of v.
double integral_G(double a, double b, const ModelParams& params) {
    if (params.elastic() && params.a1 < 2.0) {
        const double m = std::ceil(8.0 / (2.0 - params.a1));
        const double va = std::pow(1.0 - a, 1.0 / m);
        const double vb = std::pow(1.0 - b, 1.0 / m);
        return gauss_legendre(vb, va, [&](double v) {
            const double vm1 = std::pow(v, m - 1.0);
            return G(1.0 - vm1 * v, params) * m * vm1;
        });
    }
    const double mid = 0.5 * (a + b);
    const auto g = [&](double r) { return G(r, params); };
    return gauss_legendre(a, mid, g) + gauss_legendre(mid, b, g);
}

double mean_G(double a, double b, const ModelParams& params) { return integral_G(a, b, params) / (b - a); }

// W' without the forcing term -2G/sigma^2.
double smooth_slope(double x, double y, double w, const ModelParams& p) {
    const double damping = (1.0 - p.gamma) * std::pow(1.0 - x, p.gamma / (p.gamma - 1.0)) * F(w, p);
    return 2.0 / p.sigma2() * (damping + p.delta * x * w + p.alpha * y);
}

bool feasible(const WTrajectory& t) {
    return t.classification.profile == Profile::PositiveWithLocalMax ||
           t.classification.profile == Profile::PositiveNoMax;
}

}  // namespace

std::string_view to_string(Profile p) noexcept {
    switch (p) {
        case Profile::CrossesEarly: return "CROSSES_EARLY";
        case Profile::PositiveWithLocalMax: return "POSITIVE_WITH_LOCAL_MAX";
        case Profile::PositiveNoMax: return "POSITIVE_NO_MAX";
        case Profile::TerminalNegative: return "TERMINAL_NEGATIVE";
    }
    return "UNKNOWN";
}

const ShootConfig& validate(const ShootConfig& cfg) {
    if (cfg.grid_n < 100) throw ValidationError("grid_n must be at least 100");
    if (!(cfg.eps_boundary > 0.0 && cfg.eps_boundary <= 1e-3))
        throw ValidationError("eps_boundary must lie in (0, 1e-3]");
    if (!(cfg.k_lo < cfg.k_hi)) throw ValidationError("k_lo must be below k_hi");
    if (!(cfg.tol_k > 0.0)) throw ValidationError("tol_k must be positive");
    if (!(cfg.tol_terminal > 0.0)) throw ValidationError("tol_terminal must be positive");
    if (cfg.max_doublings < 0) throw ValidationError("max_doublings must be nonnegative");
    if (cfg.max_bisections < 1) throw ValidationError("max_bisections must be positive");
    return cfg;
}

double integration_constant(double k, const ModelParams& p) {
    return (0.5 * p.sigma2() * k + (p.gamma - 1.0) * F(p.C_L, p)) / p.alpha;
}

double w_slope(double x, double y, double w, const ModelParams& p) {
    const double damping = (1.0 - p.gamma) * std::pow(1.0 - x, p.gamma / (p.gamma - 1.0)) * F(w, p);
    return 2.0 / p.sigma2() * (damping + p.delta * x * w - G(x, p) + p.alpha * y);
}

WTrajectory integrate_W(double k, const ModelParams& params, const ShootConfig& cfg) {
    validate(cfg);
    if (!(params.sigma > 0.0)) throw ValidationError("shooting requires sigma > 0");

    const auto n = static_cast<std::size_t>(cfg.grid_n);
    const double end = 1.0 - cfg.eps_boundary;
    const double h = end / static_cast<double>(n);

    WTrajectory t;
    t.k = k;
    t.K_k = integration_constant(k, params);
    t.xs.reserve(n + 1);
    t.Ws.reserve(n + 1);
    t.Ys.reserve(n + 1);

    // Integrate V = W + (2/sigma^2) H with H(x) the integral of G from 0, so the singular
    // forcing is handled by quadrature rather than by the Runge-Kutta stages.
    const double scale = 2.0 / params.sigma2();
    std::vector<double> H(2 * n + 1, 0.0);
    for (std::size_t j = 1; j <= 2 * n; ++j) {
        const double a = 0.5 * h * static_cast<double>(j - 1);
        const double b = j == 2 * n ? end : 0.5 * h * static_cast<double>(j);
        H[j] = H[j - 1] + integral_G(a, b, params);
    }

    double y = t.K_k;
    double v = params.C_L;
    t.xs.push_back(0.0);
    t.Ws.push_back(v);
    t.Ys.push_back(y);

    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) * h;
        const double xh = x + 0.5 * h;
        const double x1 = i + 1 == n ? end : static_cast<double>(i + 1) * h;
        const double step = x1 - x;
        const double h0 = scale * H[2 * i];
        const double hh = scale * H[2 * i + 1];
        const double h1 = scale * H[2 * i + 2];

        const double w1 = v - h0;
        const double kv1 = smooth_slope(x, y, w1, params);
        const double w2 = v + 0.5 * step * kv1 - hh;
        const double kv2 = smooth_slope(xh, y + 0.5 * step * w1, w2, params);
        const double w3 = v + 0.5 * step * kv2 - hh;
        const double kv3 = smooth_slope(xh, y + 0.5 * step * w2, w3, params);
        const double w4 = v + step * kv3 - h1;
        const double kv4 = smooth_slope(x1, y + step * w3, w4, params);

        const double y_next = y + step / 6.0 * (w1 + 2.0 * w2 + 2.0 * w3 + w4);
        const double v_next = v + step / 6.0 * (kv1 + 2.0 * kv2 + 2.0 * kv3 + kv4);
        const double w_next = v_next - h1;
        if (!std::isfinite(y_next) || !std::isfinite(w_next) || std::abs(w_next) > kBlowup ||
            std::abs(y_next) > kBlowup) {
            t.truncated = true;
            break;
        }
        y = y_next;
        v = v_next;
        t.xs.push_back(x1);
        t.Ws.push_back(w_next);
        t.Ys.push_back(y);
    }
    t.classification = classify(t.xs, t.Ws, t.truncated);
    return t;
}

Classification classify(const std::vector<double>& xs, const std::vector<double>& Ws, bool truncated) {
    Classification c;
    const std::size_t n = Ws.size();
    if (n == 0) return c;

    for (std::size_t i = 0; i < n; ++i) {
        if (Ws[i] < 0.0) {
            if (i == 0) {
                c.crossing = xs[0];
            } else {
                const double w0 = Ws[i - 1];
                const double w1 = Ws[i];
                c.crossing = xs[i - 1] + (xs[i] - xs[i - 1]) * w0 / (w0 - w1);
            }
            c.profile = truncated && Ws.back() < 0.0 ? Profile::TerminalNegative : Profile::CrossesEarly;
            return c;
        }
    }

    if (n >= 2 && Ws[1] < Ws[0]) {
        c.max_index = 0;
    } else {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (Ws[i] > Ws[i - 1] && Ws[i] > Ws[i + 1]) {
                c.max_index = i;
                break;
            }
        }
    }
    c.profile = c.max_index ? Profile::PositiveWithLocalMax : Profile::PositiveNoMax;
    return c;
}

Classification classify(const WTrajectory& traj) { return classify(traj.xs, traj.Ws, traj.truncated); }

double HjbSolution::Q(double r) const {
    const auto& xs = trajectory.xs;
    const auto& Ys = trajectory.Ys;
    const auto& Ws = trajectory.Ws;
    if (r <= xs.front()) return Ys.front();
    if (r >= xs.back()) return Ys.back() + Ws.back() * (r - xs.back());
    const double h = trajectory.step();
    auto i = static_cast<std::size_t>(r / h);
    i = std::min(i, xs.size() - 2);
    while (i > 0 && xs[i] > r) --i;
    while (i + 2 < xs.size() && xs[i + 1] < r) ++i;
    const double dx = xs[i + 1] - xs[i];
    const double s = (r - xs[i]) / dx;
    const double s2 = s * s;
    const double s3 = s2 * s;
    return (2 * s3 - 3 * s2 + 1) * Ys[i] + (s3 - 2 * s2 + s) * dx * Ws[i] +
           (-2 * s3 + 3 * s2) * Ys[i + 1] + (s3 - s2) * dx * Ws[i + 1];
}

HjbSolution shoot_kstar(const ModelParams& params, const ShootConfig& cfg, double r0) {
    validate(params);
    validate(cfg);
    if (!(params.sigma > 0.0)) throw ValidationError("shooting requires sigma > 0");
    if (!(r0 >= 0.0 && r0 <= 1.0)) throw ValidationError("r0 must lie in [0,1]");

    double lo = cfg.k_lo;
    double hi = cfg.k_hi;
    WTrajectory lo_traj = integrate_W(lo, params, cfg);
    WTrajectory hi_traj = integrate_W(hi, params, cfg);

    // Existence of both ends: small k crosses zero, large k stays positive.
    double width = hi - lo;
    for (int d = 0; feasible(lo_traj); ++d) {
        if (d >= cfg.max_doublings)
            throw SolverError("bracket expansion failed: k_lo = " + std::to_string(lo) +
                              " still yields a nonnegative trajectory");
        hi = lo;
        hi_traj = std::move(lo_traj);
        width *= 2.0;
        lo = hi - width;
        lo_traj = integrate_W(lo, params, cfg);
    }
    for (int d = 0; !feasible(hi_traj); ++d) {
        if (d >= cfg.max_doublings)
            throw SolverError("bracket expansion failed: k_hi = " + std::to_string(hi) +
                              " still yields a crossing trajectory");
        lo = hi;
        width *= 2.0;
        hi = lo + width;
        hi_traj = integrate_W(hi, params, cfg);
    }

    int iterations = 0;
    while ((hi - lo > cfg.tol_k || hi_traj.terminal_W() > cfg.tol_terminal) &&
           iterations < cfg.max_bisections) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        ++iterations;
        WTrajectory mid_traj = integrate_W(mid, params, cfg);
        if (feasible(mid_traj)) {
            // k -> W_k(1 - eps) is nondecreasing; a violation means the grid is too coarse.
            if (mid_traj.terminal_W() > hi_traj.terminal_W() + cfg.tol_terminal)
                throw SolverError("terminal values are not monotone in k; refine grid_n");
            hi = mid;
            hi_traj = std::move(mid_traj);
        } else {
            lo = mid;
        }
    }
    if (hi_traj.terminal_W() > cfg.tol_terminal)
        throw SolverError("bisection stalled with |W(1-eps)| = " + std::to_string(hi_traj.terminal_W()) +
                          " above tol_terminal");

    HjbSolution sol;
    sol.k_star = hi;
    sol.bracket_lo = lo;
    sol.bracket_hi = hi;
    sol.bisections = iterations;
    sol.trajectory = std::move(hi_traj);
    sol.residual_sup = hjb_residual(sol.trajectory, params);
    sol.r0 = r0;
    sol.Q_of_r0 = sol.Q(r0);
    return sol;
}

std::vector<std::pair<double, double>> hjb_residual_profile(const WTrajectory& traj,
                                                            const ModelParams& p, SlopeSource source) {
    std::vector<std::pair<double, double>> out;
    const std::size_t size = traj.xs.size();
    if (size < 3 || traj.truncated) return out;
    const std::size_t n = size - 1;
    const double h = traj.step();
    const double end = traj.xs.back();
    const double margin = 2.0 / static_cast<double>(n);
    const double exponent = p.gamma / (p.gamma - 1.0);

    for (std::size_t i = 1; i < n; ++i) {
        const double x = traj.xs[i];
        if (x < margin - 1e-12 || x > end - margin + 1e-12) continue;
        const double w = traj.Ws[i];
        const double y = traj.Ys[i];
        double diffusion = 0.0;
        double source_term = 0.0;
        if (source == SlopeSource::SystemRhs) {
            diffusion = 0.5 * p.sigma2() * w_slope(x, y, w, p);
            source_term = G(x, p);
        } else {
            // Central difference of W; G enters through its mean over the same stencil so the
            // integrable singularity at x = 1 does not pollute the truncation error.
            diffusion = 0.5 * p.sigma2() * (traj.Ws[i + 1] - traj.Ws[i - 1]) / (2.0 * h);
            source_term = mean_G(traj.xs[i - 1], traj.xs[i + 1], p);
        }
        const double residual = diffusion + (p.gamma - 1.0) * std::pow(1.0 - x, exponent) * F(w, p) -
                                p.delta * x * w + source_term - p.alpha * y;
        out.emplace_back(x, std::abs(residual) / (1.0 + std::abs(p.alpha * y)));
    }
    return out;
}

double hjb_residual(const WTrajectory& traj, const ModelParams& params, SlopeSource source) {
    double sup = 0.0;
    for (const auto& [x, r] : hjb_residual_profile(traj, params, source)) sup = std::max(sup, r);
    return sup;
}

double hjb_residual(const HjbSolution& sol, const ModelParams& params) {
    return hjb_residual(sol.trajectory, params);
}

}  // namespace recycle
