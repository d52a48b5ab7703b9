#pragma once

// Config files are either a JSON object or flat `key = value` lines ('#'
// comments). Each entry becomes the flag `--key value` unless that flag
// already appears on the command line, so flags always win over the file.

#include <string>
#include <vector>

namespace statediv::cli {

/// Entries of a config document as (flag name, value) pairs. A JSON array
/// yields one pair per element (comma-separated text stays one value); JSON booleans yield
/// the bare flag when true and nothing when false.
std::vector<std::pair<std::string, std::string>> parse_config(const std::string& text);

/// `args` with the config entries appended as flags not already given.
std::vector<std::string> merge_config_args(const std::vector<std::string>& args, const std::string& config_text);

/// Reads the file named by `--config FILE` / `--config=FILE`, if any, and merges it.
/// Throws ConfigError when the file cannot be read or parsed.
std::vector<std::string> expand_config(const std::vector<std::string>& args);

}  // namespace statediv::cli
