#include "recycle/sde.hpp"

#include "recycle/errors.hpp"

namespace recycle {

const SimConfig& validate(const SimConfig& cfg) {
    if (!(cfg.r0 >= 0.0 && cfg.r0 <= 1.0)) throw ValidationError("r0 must lie in [0,1]");
    if (!(cfg.T > 0.0)) throw ValidationError("T must be positive");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (cfg.dt > cfg.T) throw ValidationError("dt must not exceed T");
    return cfg;
}

namespace {

RegulatedPath record(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                     std::uint64_t path_index) {
    const auto n = static_cast<std::size_t>(cfg.steps());
    RegulatedPath path;
    for (auto* v : {&path.ts, &path.rs, &path.Ls, &path.Us, &path.us, &path.ps, &path.noise, &path.proposals})
        v->assign(n + 1, 0.0);

    NormalStream normals(cfg.seed, path_index);
    double L = 0.0;
    double U = 0.0;
    const double r_end = run_path(policy, params, cfg, normals, [&](const StepRecord& s) {
        const auto i = static_cast<std::size_t>(s.index);
        path.ts[i] = s.t;
        path.rs[i] = s.r;
        path.Ls[i] = L;
        path.Us[i] = U;
        path.us[i] = s.c.u;
        path.ps[i] = s.c.p;
        path.noise[i] = s.dW;
        path.proposals[i] = s.proposal;
        L += s.dL;
        U += s.dU;
    });
    path.ts[n] = static_cast<double>(n) * cfg.dt;
    path.rs[n] = r_end;
    path.Ls[n] = L;
    path.Us[n] = U;
    const double r_eval = r_end < 0.0 ? 0.0 : (r_end > 1.0 ? 1.0 : r_end);
    const Controls last = policy.at(r_eval);
    path.us[n] = last.u;
    path.ps[n] = last.p;
    return path;
}

}  // namespace

RegulatedPath simulate_path(const Policy& policy, const ModelParams& params, const SimConfig& cfg,
                            std::uint64_t path_index) {
    validate(params);
    validate(cfg);
    return record(policy, params, cfg, path_index);
}

RegulatedPath simulate_unregulated(const ModelParams& params, const SimConfig& cfg, double u, double p,
                                   std::uint64_t path_index) {
    validate(params);
    validate(cfg);
    if (cfg.regulated) throw ValidationError("simulate_unregulated requires regulated = false");
    return record(Policy::fixed(u, p), params, cfg, path_index);
}

}  // namespace recycle
