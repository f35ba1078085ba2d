#include "recycle/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "recycle/errors.hpp"
#include "recycle/policy.hpp"

namespace recycle::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::set<std::string> kSubcommands = {"solve", "simulate", "evaluate", "compare", "sweep"};

double as_double(const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError("key '" + key + "' expects a number");
    return v.get<double>();
}

long long as_integer(const std::string& key, const json& v) {
    if (v.is_number_integer() || v.is_number_unsigned()) return v.get<long long>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9e18) return static_cast<long long>(d);
    }
    throw ConfigError("key '" + key + "' expects an integer");
}

std::uint64_t as_unsigned(const std::string& key, const json& v) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const long long i = as_integer(key, v);
    if (i < 0) throw ConfigError("key '" + key + "' expects a nonnegative integer");
    return static_cast<std::uint64_t>(i);
}

bool as_bool(const std::string& key, const json& v) {
    if (!v.is_boolean()) throw ConfigError("key '" + key + "' expects true or false");
    return v.get<bool>();
}

std::string as_string(const std::string& key, const json& v) {
    if (!v.is_string()) throw ConfigError("key '" + key + "' expects a string");
    return v.get<std::string>();
}

std::vector<double> as_list(const std::string& key, const json& v) {
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError("key '" + key + "' expects a list of numbers");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(as_double(key, e));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, const json&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = [] {
        std::map<std::string, Setter> t;
        for (auto name : kParamNames) {
            t.emplace(std::string(name), [](RunConfig& c, const std::string& k, const json& v) {
                set_param(c.model, k, as_double(k, v));
            });
        }
        t["r0"] = [](RunConfig& c, const std::string& k, const json& v) { c.sim.r0 = as_double(k, v); };
        t["T"] = [](RunConfig& c, const std::string& k, const json& v) {
            if (v.is_null()) c.horizon.reset();
            else c.horizon = as_double(k, v);
        };
        t["dt"] = [](RunConfig& c, const std::string& k, const json& v) { c.sim.dt = as_double(k, v); };
        t["seed"] = [](RunConfig& c, const std::string& k, const json& v) { c.sim.seed = as_unsigned(k, v); };
        t["regulated"] = [](RunConfig& c, const std::string& k, const json& v) { c.sim.regulated = as_bool(k, v); };
        t["grid_n"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.shoot.grid_n = static_cast<int>(as_integer(k, v));
        };
        t["eps_boundary"] = [](RunConfig& c, const std::string& k, const json& v) { c.shoot.eps_boundary = as_double(k, v); };
        t["k_lo"] = [](RunConfig& c, const std::string& k, const json& v) { c.shoot.k_lo = as_double(k, v); };
        t["k_hi"] = [](RunConfig& c, const std::string& k, const json& v) { c.shoot.k_hi = as_double(k, v); };
        t["tol_k"] = [](RunConfig& c, const std::string& k, const json& v) { c.shoot.tol_k = as_double(k, v); };
        t["tol_terminal"] = [](RunConfig& c, const std::string& k, const json& v) { c.shoot.tol_terminal = as_double(k, v); };
        t["max_doublings"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.shoot.max_doublings = static_cast<int>(as_integer(k, v));
        };
        t["max_bisections"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.shoot.max_bisections = static_cast<int>(as_integer(k, v));
        };
        t["n_paths"] = [](RunConfig& c, const std::string& k, const json& v) { c.n_paths = as_integer(k, v); };
        t["base_seed"] = [](RunConfig& c, const std::string& k, const json& v) { c.base_seed = as_unsigned(k, v); };
        t["output_dir"] = [](RunConfig& c, const std::string& k, const json& v) { c.output_dir = as_string(k, v); };
        t["threads"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.threads = static_cast<int>(as_integer(k, v));
        };
        t["policy"] = [](RunConfig& c, const std::string& k, const json& v) { c.policy = as_string(k, v); };
        t["fixed_u"] = [](RunConfig& c, const std::string& k, const json& v) { c.fixed_u = as_double(k, v); };
        t["fixed_p"] = [](RunConfig& c, const std::string& k, const json& v) { c.fixed_p = as_double(k, v); };
        t["sim_paths"] = [](RunConfig& c, const std::string& k, const json& v) { c.sim_paths = as_integer(k, v); };
        t["plot_T"] = [](RunConfig& c, const std::string& k, const json& v) { c.plot_T = as_double(k, v); };
        t["k_values"] = [](RunConfig& c, const std::string& k, const json& v) { c.k_values = as_list(k, v); };
        t["include_kstar"] = [](RunConfig& c, const std::string& k, const json& v) { c.include_kstar = as_bool(k, v); };
        t["param_name"] = [](RunConfig& c, const std::string& k, const json& v) { c.param_name = as_string(k, v); };
        t["values"] = [](RunConfig& c, const std::string& k, const json& v) { c.values = as_list(k, v); };
        t["allowance_fraction"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.allowance_fraction = as_double(k, v);
        };
        t["truncation_fraction"] = [](RunConfig& c, const std::string& k, const json& v) {
            c.truncation_fraction = as_double(k, v);
        };
        return t;
    }();
    return table;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::string& header) : path_(path), out_(path) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
        out_ << header << '\n';
    }
    template <class... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(fields), first = false), ...);
        out_ << '\n';
    }
    void close() {
        out_.close();
        if (!out_) throw IoError("failed writing " + path_.string());
    }

private:
    static std::string cell(double v) { return fmt(v); }
    static std::string cell(long long v) { return std::to_string(v); }
    static std::string cell(std::size_t v) { return std::to_string(v); }
    static std::string cell(bool v) { return v ? "true" : "false"; }
    static std::string cell(const std::string& v) {
        if (v.find_first_of(",\"\n") == std::string::npos) return v;
        std::string q = "\"";
        for (char ch : v) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
        return q + "\"";
    }
    static std::string cell(const char* v) { return cell(std::string(v)); }

    fs::path path_;
    std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("failed writing " + path.string());
}

SimConfig sim_for(const RunConfig& cfg, const std::string& subcommand) {
    SimConfig s = cfg.sim;
    s.T = resolved_horizon(cfg, subcommand);
    return s;
}

EvalOptions eval_options(const RunConfig& cfg) {
    EvalOptions o;
    o.threads = cfg.threads;
    o.truncation_fraction = cfg.truncation_fraction;
    return o;
}

json report_json(const EvalReport& r) {
    json j = {{"policy", r.policy_label}, {"j_mean", r.j_mean},       {"j_se", r.j_se},
              {"n_paths", r.n_paths},     {"horizon", r.horizon},      {"tail_bound", r.tail_bound},
              {"mean_terminal_r", r.mean_terminal_r}, {"min_price", r.min_price}, {"max_price", r.max_price},
              {"max_investment", r.max_investment}};
    j["q_of_r0"] = r.q_of_r0 ? json(*r.q_of_r0) : json(nullptr);
    return j;
}

json solution_json(const HjbSolution& sol) {
    return {{"k_star", sol.k_star},
            {"K_k", sol.trajectory.K_k},
            {"residual_sup", sol.residual_sup},
            {"terminal_W", sol.trajectory.terminal_W()},
            {"Q_of_r0", sol.Q_of_r0},
            {"r0", sol.r0},
            {"bisections", sol.bisections},
            {"bracket", {sol.bracket_lo, sol.bracket_hi}},
            {"classification", std::string(to_string(sol.trajectory.classification.profile))}};
}

void write_paths(CsvWriter& csv, const std::string& prefix_label, const RegulatedPath& path, long long id,
                 bool with_label) {
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (with_label)
            csv.row(prefix_label, id, path.ts[i], path.rs[i], path.Ls[i], path.Us[i], path.us[i], path.ps[i]);
        else
            csv.row(id, path.ts[i], path.rs[i], path.Ls[i], path.Us[i], path.us[i], path.ps[i]);
    }
}

Policy choose_policy(const RunConfig& cfg, const std::optional<HjbSolution>& sol) {
    if (cfg.policy == "optimal") {
        if (!sol) throw ValidationError("policy 'optimal' requires sigma > 0");
        return make_policy(*sol, cfg.model);
    }
    if (cfg.policy == "zero") return Policy::zero(cfg.model);
    return Policy::fixed(cfg.fixed_u, cfg.fixed_p);
}

std::optional<HjbSolution> maybe_solve(const RunConfig& cfg) {
    if (!(cfg.model.sigma > 0.0)) return std::nullopt;
    return shoot_kstar(cfg.model, cfg.shoot, cfg.sim.r0);
}

json run_solve(const RunConfig& cfg, const fs::path& dir, json& artifacts) {
    const HjbSolution sol = shoot_kstar(cfg.model, cfg.shoot, cfg.sim.r0);
    CsvWriter csv(dir / "hjb_solution.csv", "x,W,Y");
    const auto& t = sol.trajectory;
    for (std::size_t i = 0; i < t.xs.size(); ++i) csv.row(t.xs[i], t.Ws[i], t.Ys[i]);
    csv.close();
    artifacts.push_back("hjb_solution.csv");

    json results = solution_json(sol);
    if (!cfg.k_values.empty()) {
        CsvWriter profiles(dir / "w_profiles.csv", "k,x,W,Y");
        json shots = json::array();
        for (double k : cfg.k_values) {
            const WTrajectory w = integrate_W(k, cfg.model, cfg.shoot);
            for (std::size_t i = 0; i < w.xs.size(); ++i) profiles.row(k, w.xs[i], w.Ws[i], w.Ys[i]);
            json s = {{"k", k}, {"K_k", w.K_k}, {"profile", std::string(to_string(w.classification.profile))},
                      {"terminal_W", w.terminal_W()}, {"truncated", w.truncated}};
            s["crossing"] = w.classification.crossing ? json(*w.classification.crossing) : json(nullptr);
            shots.push_back(s);
        }
        profiles.close();
        artifacts.push_back("w_profiles.csv");
        results["shots"] = shots;
    }
    return results;
}

json run_simulate(const RunConfig& cfg, const fs::path& dir, json& artifacts) {
    const auto sol = maybe_solve(cfg);
    const SimConfig sim = sim_for(cfg, "simulate");
    CsvWriter csv(dir / "paths.csv", "path_id,t,r,L,U,u,p");
    json realized = json::array();
    for (long long id = 0; id < cfg.sim_paths; ++id) {
        RegulatedPath path = sim.regulated
                                 ? simulate_path(choose_policy(cfg, sol), cfg.model, sim, static_cast<std::uint64_t>(id))
                                 : simulate_unregulated(cfg.model, sim, cfg.fixed_u, cfg.fixed_p,
                                                        static_cast<std::uint64_t>(id));
        path.j_realized = discounted_profit(path, cfg.model, sim.dt);
        realized.push_back(path.j_realized);
        write_paths(csv, "", path, id, false);
    }
    csv.close();
    artifacts.push_back("paths.csv");
    json results = {{"j_realized", realized}};
    results["k_star"] = sol ? json(sol->k_star) : json(nullptr);
    return results;
}

json run_evaluate(const RunConfig& cfg, const fs::path& dir, json& artifacts) {
    const HjbSolution sol = shoot_kstar(cfg.model, cfg.shoot, cfg.sim.r0);
    const Policy policy = choose_policy(cfg, sol);
    const SimConfig sim = sim_for(cfg, "evaluate");
    const VerificationResult v = verification_inequality(policy, cfg.model, sim, cfg.n_paths, cfg.base_seed, sol,
                                                         cfg.allowance_fraction, eval_options(cfg));
    CsvWriter csv(dir / "evaluation.csv", "policy,j_mean,j_se,n_paths,q_of_r0,margin,holds,horizon");
    csv.row(v.report.policy_label, v.report.j_mean, v.report.j_se, v.report.n_paths, *v.report.q_of_r0, v.margin,
            v.holds, v.report.horizon);
    csv.close();
    artifacts.push_back("evaluation.csv");
    json results = solution_json(sol);
    results["report"] = report_json(v.report);
    results["verification"] = {{"holds", v.holds}, {"margin", v.margin}, {"allowance", v.allowance}};
    return results;
}

json run_compare(const RunConfig& cfg, const fs::path& dir, json& artifacts) {
    const HjbSolution sol = shoot_kstar(cfg.model, cfg.shoot, cfg.sim.r0);
    std::vector<double> ks = cfg.k_values;
    if (cfg.include_kstar) ks.push_back(sol.k_star);
    const SimConfig sim = sim_for(cfg, "compare");
    auto reports = compare_policies(ks, cfg.model, sim, cfg.shoot, cfg.n_paths, cfg.base_seed, eval_options(cfg));
    if (cfg.include_kstar) reports.back().policy_label = "k*";

    const EvalReport* star = nullptr;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (ks[i] == sol.k_star) star = &reports[i];

    CsvWriter csv(dir / "compare.csv", "label,k,j_mean,j_se,n_paths,kstar_minus_this,paired_se");
    json rows = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const auto& r = reports[i];
        PairedDifference d;
        if (star) d = paired_difference(*star, r);
        csv.row(r.policy_label, ks[i], r.j_mean, r.j_se, r.n_paths, d.mean, d.se);
        json j = report_json(r);
        j["k"] = ks[i];
        j["kstar_minus_this"] = star ? json(d.mean) : json(nullptr);
        j["paired_se"] = star ? json(d.se) : json(nullptr);
        rows.push_back(j);
    }
    csv.close();
    artifacts.push_back("compare.csv");

    if (cfg.sim_paths > 0) {
        SimConfig plot = cfg.sim;
        plot.T = cfg.plot_T;
        plot.seed = cfg.base_seed;
        CsvWriter paths(dir / "compare_paths.csv", "k,path_id,t,r,L,U,u,p");
        for (double k : ks) {
            const Policy policy = Policy::optimal(integrate_W(k, cfg.model, cfg.shoot), cfg.model);
            for (long long id = 0; id < cfg.sim_paths; ++id) {
                const RegulatedPath path = simulate_path(policy, cfg.model, plot, static_cast<std::uint64_t>(id));
                write_paths(paths, fmt(k), path, id, true);
            }
        }
        paths.close();
        artifacts.push_back("compare_paths.csv");
    }
    json results = solution_json(sol);
    results["reports"] = rows;
    return results;
}

json run_sweep(const RunConfig& cfg, const fs::path& dir, json& artifacts) {
    const SimConfig sim = sim_for(cfg, "sweep");
    const auto rows = sensitivity_sweep(cfg.param_name, cfg.values, cfg.model, sim, cfg.shoot, cfg.n_paths,
                                        cfg.base_seed, eval_options(cfg));
    CsvWriter csv(dir / "sweep.csv",
                  "param,value,ok,k_star,q_of_r0,j_mean,j_se,mean_terminal_r,min_price,max_price,error");
    json out = json::array();
    for (const auto& r : rows) {
        csv.row(r.param_name, r.value, r.ok, r.k_star, r.q_of_r0, r.j_mean, r.j_se, r.mean_terminal_r, r.min_price,
                r.max_price, r.error);
        out.push_back({{"value", r.value}, {"ok", r.ok}, {"k_star", r.k_star}, {"q_of_r0", r.q_of_r0},
                       {"j_mean", r.j_mean}, {"j_se", r.j_se}, {"mean_terminal_r", r.mean_terminal_r},
                       {"min_price", r.min_price}, {"max_price", r.max_price}, {"error", r.error}});
    }
    csv.close();
    artifacts.push_back("sweep.csv");
    json results = {{"rows", out}};
    if (const auto sol = maybe_solve(cfg)) results["k_star"] = sol->k_star;
    return results;
}

int dispatch(const std::string& subcommand, const RunConfig& cfg) {
    const fs::path dir(cfg.output_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

    json artifacts = json::array();
    json results;
    if (subcommand == "solve") results = run_solve(cfg, dir, artifacts);
    else if (subcommand == "simulate") results = run_simulate(cfg, dir, artifacts);
    else if (subcommand == "evaluate") results = run_evaluate(cfg, dir, artifacts);
    else if (subcommand == "compare") results = run_compare(cfg, dir, artifacts);
    else results = run_sweep(cfg, dir, artifacts);

    const json manifest = {{"subcommand", subcommand},
                           {"config", to_json(cfg, subcommand)},
                           {"results", results},
                           {"artifacts", artifacts}};
    write_json(dir / "manifest.json", manifest);
    std::cout << manifest["results"].dump(2) << '\n';
    return kOk;
}

}  // namespace

void apply_key(RunConfig& cfg, const std::string& key, const json& value) {
    const auto& table = setters();
    const auto it = table.find(key);
    if (it == table.end()) throw ConfigError("unknown config key '" + key + "'");
    try {
        it->second(cfg, key, value);
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

void apply_object(RunConfig& cfg, const json& object) {
    const json& flat = object.contains("config") && object["config"].is_object() ? object["config"] : object;
    if (!flat.is_object()) throw ConfigError("config must be a JSON object");
    if (flat.contains("sigma") && flat.contains("sigma2"))
        throw ConfigError("set either sigma or sigma2, not both");
    for (const auto& [key, value] : flat.items()) apply_key(cfg, key, value);
}

json read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
}

json parse_override(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error&) {
        return json(text);
    }
}

double resolved_horizon(const RunConfig& cfg, const std::string& subcommand) {
    if (cfg.horizon) return *cfg.horizon;
    return subcommand == "simulate" ? 2.0 : 40.0 / cfg.model.alpha;
}

json to_json(const RunConfig& c, const std::string& subcommand) {
    json j;
    for (auto name : kParamNames)
        if (name != "sigma2") j[std::string(name)] = get_param(c.model, name);
    j["r0"] = c.sim.r0;
    j["T"] = resolved_horizon(c, subcommand);
    j["dt"] = c.sim.dt;
    j["seed"] = c.sim.seed;
    j["regulated"] = c.sim.regulated;
    j["grid_n"] = c.shoot.grid_n;
    j["eps_boundary"] = c.shoot.eps_boundary;
    j["k_lo"] = c.shoot.k_lo;
    j["k_hi"] = c.shoot.k_hi;
    j["tol_k"] = c.shoot.tol_k;
    j["tol_terminal"] = c.shoot.tol_terminal;
    j["max_doublings"] = c.shoot.max_doublings;
    j["max_bisections"] = c.shoot.max_bisections;
    j["n_paths"] = c.n_paths;
    j["base_seed"] = c.base_seed;
    j["output_dir"] = c.output_dir;
    j["threads"] = c.threads;
    j["policy"] = c.policy;
    j["fixed_u"] = c.fixed_u;
    j["fixed_p"] = c.fixed_p;
    j["sim_paths"] = c.sim_paths;
    j["plot_T"] = c.plot_T;
    j["k_values"] = c.k_values;
    j["include_kstar"] = c.include_kstar;
    j["param_name"] = c.param_name;
    j["values"] = c.values;
    j["allowance_fraction"] = c.allowance_fraction;
    j["truncation_fraction"] = c.truncation_fraction;
    return j;
}

void validate(const RunConfig& cfg, const std::string& subcommand) {
    recycle::validate(cfg.model);
    recycle::validate(cfg.shoot);
    SimConfig sim = cfg.sim;
    sim.T = resolved_horizon(cfg, subcommand);
    recycle::validate(sim);
    if (cfg.n_paths < 2) throw ValidationError("n_paths must be at least 2");
    if (cfg.threads < 0) throw ValidationError("threads must be nonnegative");
    if (cfg.sim_paths < 0) throw ValidationError("sim_paths must be nonnegative");
    if (!(cfg.plot_T > 0.0)) throw ValidationError("plot_T must be positive");
    if (cfg.policy != "optimal" && cfg.policy != "zero" && cfg.policy != "fixed")
        throw ValidationError("policy must be one of optimal, zero, fixed");
    if (!(cfg.fixed_u >= 0.0) || !(cfg.fixed_p > 0.0)) throw ValidationError("fixed policy needs fixed_u >= 0, fixed_p > 0");
    if (!(cfg.allowance_fraction >= 0.0)) throw ValidationError("allowance_fraction must be nonnegative");
    if (!(cfg.truncation_fraction > 0.0)) throw ValidationError("truncation_fraction must be positive");
    const bool needs_sigma = subcommand == "solve" || subcommand == "evaluate" || subcommand == "compare" ||
                             (subcommand == "simulate" && cfg.policy == "optimal" && cfg.sim.regulated);
    if (needs_sigma && !(cfg.model.sigma > 0.0)) throw ValidationError("sigma must be positive for " + subcommand);
    if (subcommand == "compare" && cfg.k_values.empty() && !cfg.include_kstar)
        throw ValidationError("compare needs k_values or include_kstar");
    if (subcommand == "sweep") {
        bool known = false;
        for (auto n : kParamNames) known = known || n == cfg.param_name;
        if (!known) throw ValidationError("sweep param_name must be a model parameter");
        if (cfg.values.empty()) throw ValidationError("sweep needs at least one value");
    }
}

int run(const std::vector<std::string>& args) {
    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

int run(int argc, const char* const* argv) {
    CLI::App app{"Regulated recycling-rate control: HJB shooting solver, reflected-path simulator and "
                 "Monte Carlo policy evaluation"};
    app.footer(
        "Subcommands: solve, simulate, evaluate, compare, sweep.\n"
        "Any config key may be overridden as --key=value (flag > file > default).\n"
        "Exit codes: 0 ok, 1 internal error, 2 config error, 3 validation error, 4 solver error, 5 I/O error.");
    std::string subcommand;
    std::string config_path;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    app.add_option("subcommand", subcommand, "solve | simulate | evaluate | compare | sweep")->required();
    app.add_option("--config", config_path, "flat JSON config file, or a manifest.json from an earlier run");
    app.add_option("--threads", threads, "worker cap for Monte Carlo (results do not depend on it)");
    app.add_option("--seed", seed, "sets both seed and base_seed");
    app.add_option("--out", out, "output directory");
    app.allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        if (!kSubcommands.contains(subcommand)) throw ConfigError("unknown subcommand '" + subcommand + "'");
        RunConfig cfg;
        if (!config_path.empty()) apply_object(cfg, read_config_file(config_path));

        json overrides = json::object();
        for (const auto& extra : app.remaining()) {
            const auto eq = extra.find('=');
            if (extra.rfind("--", 0) != 0 || eq == std::string::npos)
                throw ConfigError("unrecognized argument '" + extra + "' (expected --key=value)");
            overrides[extra.substr(2, eq - 2)] = parse_override(extra.substr(eq + 1));
        }
        if (overrides.contains("sigma") && overrides.contains("sigma2"))
            throw ConfigError("set either sigma or sigma2, not both");
        for (const auto& [key, value] : overrides.items()) apply_key(cfg, key, value);
        if (threads) cfg.threads = *threads;
        if (seed) {
            cfg.sim.seed = *seed;
            cfg.base_seed = *seed;
        }
        if (out) cfg.output_dir = *out;

        validate(cfg, subcommand);
        return dispatch(subcommand, cfg);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidationError;
    } catch (const DomainError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kValidationError;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kSolverError;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return kIoError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInternalError;
    }
}

}  // namespace recycle::cli
