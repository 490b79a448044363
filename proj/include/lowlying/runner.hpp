#pragma once
#include "lowlying/config.hpp"

namespace lowlying {

inline constexpr const char* kToolVersion = "lowlying 1.0.0";

// Dispatch one experiment: writes the mode's artifact files plus
// <output>.manifest.json, or <output>.error.json and a nonzero exit code
// (2 ConfigError, 3 unrecovered CacheCorruption, 1 anything else).
int run(const ExperimentConfig& cfg);

std::string error_type_name(const std::exception& e);

} // namespace lowlying
