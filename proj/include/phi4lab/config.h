#pragma once

#include <string>

#include "phi4lab/params.h"

namespace phi4lab {

// INI-style configuration; the grammar is documented in README.md.
// Every error is a ConfigError naming the offending "section.key".
// Relative cutoff table paths are resolved against `base_dir`.
ModelParams parse_config_string(const std::string& text, const std::string& base_dir = ".");
ModelParams parse_config_file(const std::string& path);

// Fully resolved configuration in the same grammar, 17 significant digits.
// parse_config_string(echo_config(p)) == p.
std::string echo_config(const ModelParams& params);

// Cross-field validation, also run by the parsers.
void validate(const ModelParams& params);

}  // namespace phi4lab
