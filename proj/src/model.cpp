#include "recycle/model.hpp"

#include <cmath>
#include <string>

#include "recycle/errors.hpp"

namespace recycle {

namespace {

void require(bool ok, const char* message) {
    if (!ok) throw ValidationError(message);
}

void require_unit_interval(double r, const char* what) {
    if (!(r >= 0.0 && r <= 1.0)) throw DomainError(std::string(what) + ": r must lie in [0,1]");
}

}  // namespace

double power(double x, double a) noexcept {
    if (a >= 0.0 && a <= 32.0 && a == std::floor(a)) {
        auto n = static_cast<unsigned>(a);
        double result = 1.0;
        double base = x;
        while (n != 0) {
            if (n & 1u) result *= base;
            base *= base;
            n >>= 1;
        }
        return result;
    }
    if (a == 0.5) return std::sqrt(x);
    if (a == 0.25) return std::sqrt(std::sqrt(x));
    return std::pow(x, a);
}

const ModelParams& validate(const ModelParams& p) {
    require(std::isfinite(p.gamma) && std::isfinite(p.delta) && std::isfinite(p.sigma) &&
                std::isfinite(p.alpha) && std::isfinite(p.a0) && std::isfinite(p.a1) &&
                std::isfinite(p.a2) && std::isfinite(p.c_v) && std::isfinite(p.p0) &&
                std::isfinite(p.C_L),
            "all parameters must be finite");
    require(p.gamma > 1.0, "gamma must exceed 1");
    require(p.delta > 0.0, "delta must be positive");
    require(p.sigma >= 0.0, "sigma must be nonnegative");
    require(p.alpha > 0.0, "alpha must be positive");
    require(p.a0 > 0.0, "a0 must be positive");
    require(p.a1 > 0.0, "a1 must be positive");
    require(p.a2 > 0.0, "a2 must be positive");
    require(p.c_v > 0.0, "c_v must be positive");
    require(p.p0 > 0.0, "p0 must be positive");
    require(p.C_L > 0.0, "C_L must be positive");
    require(p.a1 > 1.0 || p.p0 >= p.c_v, "p0 must be >= c_v when a1 <= 1");
    return p;
}

void set_param(ModelParams& p, std::string_view name, double value) {
    if (name == "gamma") p.gamma = value;
    else if (name == "delta") p.delta = value;
    else if (name == "sigma") p.sigma = value;
    else if (name == "sigma2") {
        if (!(value >= 0.0)) throw ValidationError("sigma2 must be nonnegative");
        p.sigma = std::sqrt(value);
    }
    else if (name == "alpha") p.alpha = value;
    else if (name == "a0") p.a0 = value;
    else if (name == "a1") p.a1 = value;
    else if (name == "a2") p.a2 = value;
    else if (name == "c_v") p.c_v = value;
    else if (name == "p0") p.p0 = value;
    else if (name == "C_L") p.C_L = value;
    else throw ValidationError("unknown model parameter '" + std::string(name) + "'");
}

double get_param(const ModelParams& p, std::string_view name) {
    if (name == "gamma") return p.gamma;
    if (name == "delta") return p.delta;
    if (name == "sigma") return p.sigma;
    if (name == "sigma2") return p.sigma2();
    if (name == "alpha") return p.alpha;
    if (name == "a0") return p.a0;
    if (name == "a1") return p.a1;
    if (name == "a2") return p.a2;
    if (name == "c_v") return p.c_v;
    if (name == "p0") return p.p0;
    if (name == "C_L") return p.C_L;
    throw ValidationError("unknown model parameter '" + std::string(name) + "'");
}

double drift_R(double u, double r, const ModelParams& p) {
    if (!(u >= 0.0)) throw DomainError("drift_R: u must be nonnegative");
    require_unit_interval(r, "drift_R");
    return drift_from_root(power(u, 1.0 / p.gamma), r, p);
}

double drift_from_root(double root, double r, const ModelParams& p) noexcept {
    return p.gamma * root * (1.0 - r) - p.delta * r;
}

double demand(double price, double r, const ModelParams& p) {
    if (!(price > 0.0)) throw DomainError("demand: price must be positive");
    require_unit_interval(r, "demand");
    return p.a0 * std::pow(price, -p.a1) * power(r, p.a2);
}

double profit(double price, double u, double r, const ModelParams& p) {
    if (!(u >= 0.0)) throw DomainError("profit: u must be nonnegative");
    return (price - (1.0 - r) * p.c_v) * demand(price, r, p) - u;
}

double F(double x, const ModelParams& p) noexcept {
    return x > 0.0 ? x * power(x, 1.0 / (p.gamma - 1.0)) : 0.0;
}

double F_prime(double x, const ModelParams& p) noexcept {
    return x >= 0.0 ? p.gamma / (p.gamma - 1.0) * std::pow(x, 1.0 / (p.gamma - 1.0)) : 0.0;
}

double constant_c(const ModelParams& p) {
    if (!(p.a1 > 1.0)) throw DomainError("constant_c: requires a1 > 1");
    const double markup = p.a1 / (p.a1 - 1.0);
    return p.a0 * std::pow(p.c_v, 1.0 - p.a1) *
           (std::pow(markup, 1.0 - p.a1) - std::pow(markup, -p.a1));
}

double G(double r, const ModelParams& p) {
    require_unit_interval(r, "G");
    if (p.elastic()) {
        if (r == 1.0) throw DomainError("G: singular at r = 1 when a1 > 1");
        return constant_c(p) * std::pow(1.0 - r, 1.0 - p.a1) * power(r, p.a2);
    }
    return (p.p0 - p.c_v * (1.0 - r)) * p.a0 * std::pow(p.p0, -p.a1) * power(r, p.a2);
}

double G_prime(double r, const ModelParams& p) {
    require_unit_interval(r, "G_prime");
    if (r == 0.0 && p.a2 < 1.0) throw DomainError("G_prime: singular at r = 0 when a2 < 1");
    const double ra = power(r, p.a2);
    const double ra_m1 = power(r, p.a2 - 1.0);
    if (p.elastic()) {
        if (r == 1.0) throw DomainError("G_prime: singular at r = 1 when a1 > 1");
        return constant_c(p) * std::pow(1.0 - r, -p.a1) *
               ((p.a1 - 1.0) * ra + (1.0 - r) * p.a2 * ra_m1);
    }
    return p.a0 * std::pow(p.p0, -p.a1) *
           (p.c_v * ra + p.a2 * ra_m1 * (p.p0 - p.c_v * (1.0 - r)));
}

}  // namespace recycle
