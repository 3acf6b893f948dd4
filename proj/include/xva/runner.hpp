#pragma once

#include <filesystem>
#include <string>

#include "xva/config.hpp"

namespace xva::cli {

enum class Command { Price, ConvergeTable, Sweep, FairForward };

/// Builds the pricing problem described by the spec (equity or factor).
PricingProblem make_problem(const RunSpec& spec);

/// Executes one command and writes its CSV (plus metadata.txt) into out_dir.
/// Returns the path of the data file written. Output is byte-identical for
/// identical specs.
std::filesystem::path run(const RunSpec& spec, Command command,
                          const std::filesystem::path& out_dir);

}  // namespace xva::cli
