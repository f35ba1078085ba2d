#pragma once

#include "recycle/hjb_solver.hpp"
#include "recycle/model.hpp"

namespace fixtures {

inline const recycle::ModelParams& reference_params() {
    static const recycle::ModelParams params;
    return params;
}

/// Solved reference problem, shared across test cases.
inline const recycle::HjbSolution& reference_solution() {
    static const recycle::HjbSolution sol = recycle::shoot_kstar(reference_params(), recycle::ShootConfig{});
    return sol;
}

inline recycle::ModelParams inelastic_params() {
    recycle::ModelParams p;
    p.a1 = 0.3;
    p.p0 = 1.0;
    return p;
}

inline const recycle::HjbSolution& inelastic_solution() {
    static const recycle::HjbSolution sol = recycle::shoot_kstar(inelastic_params(), recycle::ShootConfig{});
    return sol;
}

}  // namespace fixtures
