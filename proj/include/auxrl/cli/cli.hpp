#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace auxrl::cli {

enum ExitCode : int { kOk = 0, kValidation = 1, kRuntime = 2 };

// Entry point of the auxrl command line: run, compare, dimcheck, gradcheck.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Output root: $AUXRL_OUTPUT_ROOT if set, otherwise "results".
std::filesystem::path output_root();

// Relative paths resolve against the output root.
std::filesystem::path resolve_output(const std::filesystem::path& p);

}  // namespace auxrl::cli
