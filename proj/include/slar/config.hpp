#pragma once

// Flat key = value scenario files. Blank lines and lines starting with '#'
// are ignored. Timing keys ending in _ms are milliseconds.

#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "slar/engine.hpp"

namespace slar::config {

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Throws engine::ConfigError on a line without '='.
KeyValues parse_key_values(std::istream& in);
KeyValues load_file(const std::string& path);

/// Throws engine::ConfigError for an unknown key or unparsable value.
void apply(engine::Scenario& scenario, std::string_view key, std::string_view value);
void apply_all(engine::Scenario& scenario, const KeyValues& kv);

std::span<const std::string_view> known_keys();

/// Parses "KEY=VALUE".
std::pair<std::string, std::string> split_assignment(std::string_view text);

}  // namespace slar::config
