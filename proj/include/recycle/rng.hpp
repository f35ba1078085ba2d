#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace recycle {

/// Standard normal stream for one Monte Carlo path.
///
/// The engine is std::mt19937_64 seeded through std::seed_seq with the words of
/// (seed, path_index); both are fully specified by the standard, so a stream is
/// reproducible across builds and independent of how paths are scheduled.
/// Normals come from the trigonometric Box-Muller transform on 53-bit uniforms,
/// consumed in pairs (cos branch first).
class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t path_index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(path_index),
                          static_cast<std::uint32_t>(path_index >> 32)};
        engine_.seed(seq);
    }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] keeps the logarithm finite; u2 in [0, 1).
        const double u1 = static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53;
        const double u2 = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace recycle
