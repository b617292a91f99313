#pragma once

// Experiment runner behind the tfcomm command line.
//
//   tfcomm <subcommand> --config <path> [--seed S] [--out DIR] [--set key=value]...
//
// Each subcommand reads a JSON config with a fixed key set, runs module
// operations, and writes CSV artifacts plus manifest.json into the output
// directory (--out, else $TFCOMM_OUT_DIR, else ./tfcomm_out).

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tfcomm/errors.hpp"
#include "tfcomm/types.hpp"

namespace tfcomm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitSchema = 2;
inline constexpr int kExitModule = 3;

inline constexpr const char* kOutDirEnv = "TFCOMM_OUT_DIR";

/// Config that does not match the schema of its experiment.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

const std::vector<std::string>& experiment_kinds();

/// Applies "a.b.c=value"; value is parsed as JSON, falling back to a string.
void apply_override(nlohmann::json& config, const std::string& assignment);

struct RunOptions {
    std::string kind;
    nlohmann::json config;
    std::filesystem::path config_dir;  ///< base for relative paths inside the config
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  ///< overrides config "seed"
};

struct Artifact {
    std::string file;
    std::string sha256;
};

struct RunResult {
    std::vector<Artifact> artifacts;
    nlohmann::json manifest;
};

/// Validates then executes. Schema problems throw ConfigError; module
/// failures propagate as tfcomm::Error.
RunResult run_experiment(const RunOptions& options);

enum class PlotKind { transfer_heatmap, spreading_heatmap, ambiguity_heatmap, capacity_curve };

PlotKind parse_plot_kind(const std::string& name);

/// Long-format (x, y, value_dB) CSV from a grid or sweep artifact, relative
/// to the maximum and clamped at floor_db.
std::string emit_plotdata(PlotKind kind, const std::string& source_csv, double floor_db = -40.0);

std::string sha256_hex(const std::string& bytes);

/// Full command-line entry point; returns the process exit code.
int main_entry(int argc, char** argv);

}  // namespace tfcomm::cli
