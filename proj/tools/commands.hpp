#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "spinbath/donor.hpp"
#include "spinbath/run_config.hpp"

namespace spinbath::cli {

inline constexpr const char* tool_version = "1.0.0";

enum ExitCode { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_divergent = 3 };

const std::vector<std::string>& command_names();

DonorParameters resolve_donor(const RunConfig& cfg);
std::pair<int, int> parse_transition(const std::string& text, const DonorParameters& p);

int run_command(const std::string& name, const RunConfig& cfg, std::ostream& log);

}  // namespace spinbath::cli
