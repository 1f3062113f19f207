#pragma once

#include <istream>
#include <string>
#include <utility>
#include <vector>

#include "greenmesh/sim.hpp"

namespace greenmesh {

// Flat `key = value` config files, `#` starts a comment. Keys are dotted
// (sim.days, energy.eta, ...). Precedence: built-in defaults, then the file,
// then explicit overrides. Unknown keys, malformed values, and invariant
// violations all raise ConfigError.

SimConfig default_config();

// All recognized keys, sorted.
std::vector<std::string> config_keys();

void apply_override(SimConfig& cfg, const std::string& key, const std::string& value);

// path may be empty (no file). Throws ConfigError if a named file is missing.
SimConfig parse_config(const std::string& path,
                       const std::vector<std::pair<std::string, std::string>>& overrides);

SimConfig parse_config_stream(std::istream& in, const std::string& label,
                              const std::vector<std::pair<std::string, std::string>>& overrides);

// Resolved settings, one `key = value` per line, re-parseable and lossless.
std::string render_config(const SimConfig& cfg);

} // namespace greenmesh
