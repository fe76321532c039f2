#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nagd/csv.hpp"
#include "nagd/experiments.hpp"

namespace nagd {

inline constexpr const char* kToolVersion = "0.1.0";

/// One named CSV table produced by a command.
struct OutputTable {
    std::string file_name;
    CsvWriter csv;
};

/// Runs a validated spec and renders its tables without touching disk.
std::vector<OutputTable> render_tables(const ExperimentSpec& spec);

/// Renders, writes every table atomically into `out_dir`, then writes
/// manifest.json. Returns the paths written, manifest last.
std::vector<std::filesystem::path> execute(const ExperimentSpec& spec, const std::filesystem::path& out_dir);

/// Relevant hyperparameters as "key=value;key=value".
std::string hyperparams_string(const OptimizerSpec& opt);

/// File-name-safe tag for an optimizer, e.g. "nasgd_alpha_0.7".
std::string optimizer_slug(const OptimizerSpec& opt);

/// Entry point behind the `nagd` executable. 0 on success, 2 for an invalid
/// configuration or command line, 1 for any other failure.
int run_cli(int argc, const char* const* argv);

} // namespace nagd
