#pragma once

#include <array>
#include <string_view>

namespace recycle {

/// Economic and dynamic constants of the regulated recycling-rate model.
///
/// Defaults reproduce the a1 > 1 reference example: gamma = 5, delta = 0.5,
/// sigma^2 = 2, alpha = 0.25, a1 = 1.1, a2 = 5, c_v = 0.2, C_L = 0.5. The market
/// potential a0 and price cap p0 are not part of that example and default to 1.
struct ModelParams {
    double gamma = 5.0;   ///< recycling-investment efficiency exponent, > 1
    double delta = 0.5;   ///< proportional decay rate of recycling, > 0
    double sigma = 1.4142135623730951;  ///< diffusion volatility, >= 0
    double alpha = 0.25;  ///< discount rate, > 0
    double a0 = 1.0;      ///< market potential
    double a1 = 1.1;      ///< demand price sensitivity
    double a2 = 5.0;      ///< demand greenness sensitivity
    double c_v = 0.2;     ///< unit cost of virgin resources
    double p0 = 1.0;      ///< price cap, binding when a1 <= 1
    double C_L = 0.5;     ///< penalty per unit of lower local time

    [[nodiscard]] double sigma2() const noexcept { return sigma * sigma; }
    /// True when the interior first-order price condition applies (a1 > 1).
    [[nodiscard]] bool elastic() const noexcept { return a1 > 1.0; }

    bool operator==(const ModelParams&) const = default;
};

/// Names accepted by `set_param` / `get_param` (sigma2 sets sigma = sqrt(value)).
inline constexpr std::array<std::string_view, 11> kParamNames = {
    "gamma", "delta", "sigma", "sigma2", "alpha", "a0", "a1", "a2", "c_v", "p0", "C_L"};

/// Returns `params` unchanged, or throws ValidationError naming the first broken invariant.
const ModelParams& validate(const ModelParams& params);

/// Sets a named parameter. Throws ValidationError for an unknown name.
void set_param(ModelParams& params, std::string_view name, double value);
[[nodiscard]] double get_param(const ModelParams& params, std::string_view name);

/// Recycling drift R(u, r) = gamma u^{1/gamma} (1 - r) - delta r.
[[nodiscard]] double drift_R(double u, double r, const ModelParams& params);

/// Cobb-Douglas demand D(p, r) = a0 p^{-a1} r^{a2}.
[[nodiscard]] double demand(double p, double r, const ModelParams& params);

/// x^a; repeated multiplication for small nonnegative integer a, square roots for a = 1/2 and 1/4.
[[nodiscard]] double power(double x, double a) noexcept;

/// R written in terms of u^{1/gamma}.
[[nodiscard]] double drift_from_root(double root, double r, const ModelParams& params) noexcept;

/// Profit rate pi(p, u, r) = [p - (1 - r) c_v] D(p, r) - u.
[[nodiscard]] double profit(double p, double u, double r, const ModelParams& params);

/// F(x) = x^{gamma/(gamma-1)} for x >= 0, zero otherwise.
[[nodiscard]] double F(double x, const ModelParams& params) noexcept;
[[nodiscard]] double F_prime(double x, const ModelParams& params) noexcept;

/// Maximized price term of the Hamiltonian, with the a1 <= 1 cap extension.
/// For a1 > 1 the function is singular at r = 1 and throws DomainError there.
[[nodiscard]] double G(double r, const ModelParams& params);
[[nodiscard]] double G_prime(double r, const ModelParams& params);

/// c = a0 c_v^{1-a1} [(a1/(a1-1))^{1-a1} - (a1/(a1-1))^{-a1}]; requires a1 > 1.
[[nodiscard]] double constant_c(const ModelParams& params);

}  // namespace recycle
