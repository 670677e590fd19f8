#pragma once

#include <CLI11.hpp>

namespace giraf::cli {

// Each function adds one subcommand whose callback performs the run.
void add_phantom_command(CLI::App &app);
void add_mask_command(CLI::App &app);
void add_recover_command(CLI::App &app);
void add_bench_command(CLI::App &app);
void add_validate_command(CLI::App &app);

} // namespace giraf::cli
