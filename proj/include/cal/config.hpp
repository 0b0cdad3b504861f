#pragma once

#include <stdexcept>
#include <string>

#include "cal/harness.hpp"

namespace cal {

// Bad configuration file or field value; the CLI maps this to exit code 1.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// TOML-style key table: [section] headers, key = value lines, # comments.
// Values: numbers, booleans, "strings", `auto`, and [a, b, c] lists.
// Unknown sections or keys are rejected with a line-anchored message.
ExperimentConfig load_config(const std::string& path);

// Field-level checks shared by file loading and flag overrides.
void validate_config(const ExperimentConfig& config);

// Fully resolved configuration plus the replication seeds, re-parseable as a
// config file; written next to run outputs so any run can be reproduced.
std::string manifest_text(const ExperimentConfig& config);

}  // namespace cal
