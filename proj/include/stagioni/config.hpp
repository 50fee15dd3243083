#pragma once

#include <stdexcept>
#include <string>

#include "stagioni/sim.hpp"

namespace stagioni::config {

/// Malformed config input; the message carries "<file>:<line>" context.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Parses the sectioned key-value scenario format. All fields are optional
/// and default to the built-in models; unknown sections or keys are
/// rejected with their location; values carry unit suffixes that are
/// validated against the expected dimension of each key.
sim::Scenario parse_string(const std::string& text,
                           const std::string& source_name = "<config>");

sim::Scenario load_file(const std::string& path);

/// Resolves a scenario config reference: an existing path is used as-is; a
/// bare name is searched in $STAGIONI_PRESET_DIR, then ./presets, then the
/// bundled preset directory. Throws ConfigError when nothing matches.
std::string resolve_config_path(const std::string& name_or_path);

}  // namespace stagioni::config
