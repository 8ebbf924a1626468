#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pnpsvgd::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 1,
  kNumericalFailure = 2,
  kIoError = 3,
};

/// Adjoint tests at or above this relative error fail the dottest command.
inline constexpr double kDotTestTolerance = 1.0e-10;

/// pnpsvgd <synth|invert|stats|dottest> [--config <path>] [--out <dir>] [--seed <int>]
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace pnpsvgd::cli
