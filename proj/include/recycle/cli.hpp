#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "recycle/eval.hpp"
#include "recycle/hjb_solver.hpp"
#include "recycle/model.hpp"
#include "recycle/sde.hpp"

namespace recycle::cli {

enum ExitCode : int {
    kOk = 0,
    kInternalError = 1,
    kConfigError = 2,
    kValidationError = 3,
    kSolverError = 4,
    kIoError = 5,
};

/// Fully resolved settings of one run. Every field maps to one flat config key.
struct RunConfig {
    ModelParams model;
    SimConfig sim;
    ShootConfig shoot;
    std::optional<double> horizon;  ///< key "T"; unset means 2 for simulate and 40/alpha otherwise
    long long n_paths = 10000;
    std::uint64_t base_seed = 20240601;
    std::string output_dir = "out";
    int threads = 0;
    std::string policy = "optimal";  ///< optimal | zero | fixed (evaluate, simulate)
    double fixed_u = 1.0;
    double fixed_p = 2.0;
    long long sim_paths = 1;
    double plot_T = 2.0;
    std::vector<double> k_values;
    bool include_kstar = true;
    std::string param_name;
    std::vector<double> values;
    double allowance_fraction = 0.02;
    double truncation_fraction = 1e-3;
};

/// Applies one flat key. Throws ConfigError for unknown keys or mistyped values.
void apply_key(RunConfig& cfg, const std::string& key, const nlohmann::json& value);

/// Applies every key of a flat object, or of the "config" member of a manifest.
void apply_object(RunConfig& cfg, const nlohmann::json& object);

/// Reads a config (or manifest) file. Throws ConfigError.
[[nodiscard]] nlohmann::json read_config_file(const std::string& path);

/// Parses the text of a --key=value override: JSON when it parses, a string otherwise.
[[nodiscard]] nlohmann::json parse_override(const std::string& text);

/// Horizon used by `subcommand` after defaults are resolved.
[[nodiscard]] double resolved_horizon(const RunConfig& cfg, const std::string& subcommand);

/// Flat JSON echo of every key, with the horizon resolved for `subcommand`.
[[nodiscard]] nlohmann::json to_json(const RunConfig& cfg, const std::string& subcommand);

/// Throws ValidationError when any module invariant fails.
void validate(const RunConfig& cfg, const std::string& subcommand);

/// Entry point: `recycle <subcommand> [--config PATH] [--threads N] [--seed N] [--out DIR] [--key=value ...]`.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);

}  // namespace recycle::cli
