#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "repqed/config.hpp"

namespace repqed::cli {

struct RunOptions {
  std::string out_path;  // empty = standard output
  int jobs = 0;          // <= 0 = hardware concurrency
  std::optional<std::uint64_t> seed;
};

// Executes a parsed sweep config and writes its CSV (or runs verification).
// Returns the process exit code.
int run_command(const SweepConfig& config, const RunOptions& options,
                std::ostream& out, std::ostream& diag);

// Builds the preset config for one of the published datasets (fig2, fig3a,
// fig3b, fig5, fig6, fig8) and runs it.  Default output file is
// "<fig_id>.csv" unless options name a path.
int run_figure(const std::string& fig_id, const RunOptions& options,
               std::ostream& out, std::ostream& diag);

// Full command-line entry: repqed <command> --config <path>
// [--out <path>] [--jobs N] [--seed S], plus `repqed figure <id>`.
int run_main(int argc, const char* const* argv, std::ostream& out,
             std::ostream& diag);

}  // namespace repqed::cli
