#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tgf/app/config.hpp"

namespace tgf::app {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeAbort = 3, kVerificationFailure = 4 };

// Runs `tgf <args...>` (args exclude the program name) and returns the exit
// code. Progress goes to `out`, diagnostics to `err`.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// The fields every command derives from the root seed.
SpectralField initial_field(const RunConfig& c);
TrackingTarget tracking_target(const RunConfig& c);
ControlField initial_control(const RunConfig& c);
ControlField direction(const RunConfig& c);

}  // namespace tgf::app
