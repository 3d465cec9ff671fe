#pragma once

#include <cstdint>
#include <string>

#include "trustmhe/simloop.hpp"

namespace trustmhe {

// The experiment file format is a single JSON object, versioned by a
// required top-level `schema_version` key (currently 1). Missing keys keep
// their built-in defaults; unknown keys anywhere are rejected with their
// full dotted path. All units SI, angles in radians.

// Canonical serialization of a config: stable key order, every field
// explicit. parse_config(config_to_text(c)) reproduces c exactly.
std::string config_to_text(const ExperimentConfig& cfg);

// The default experiment as config text (config_to_text of a
// default-constructed ExperimentConfig).
std::string default_config_text();

// Parses and validates config text. Throws std::invalid_argument with the
// offending key path on unknown keys, type mismatches, or a missing or
// unsupported schema_version, and propagates ExperimentConfig::validate()
// failures (which name the offending field).
ExperimentConfig parse_config(const std::string& json_text);

// parse_config over a file. Throws std::runtime_error when unreadable.
ExperimentConfig load_config(const std::string& path);

// Applies one `dotted.path=value` override onto config text and returns
// the updated text. The value is parsed as JSON when possible (numbers,
// booleans, null) and falls back to a string. The result is not validated
// here; a typo in the path surfaces as an unknown-key error at parse time.
std::string apply_override(const std::string& json_text, const std::string& assignment);

// FNV-1a (64-bit) over the canonical serialization. Any semantic change
// to the config, including the seed, changes the hash.
std::uint64_t config_hash(const ExperimentConfig& cfg);

// config_hash as 16 lowercase hex digits, used in artifact file names.
std::string config_hash_hex(const ExperimentConfig& cfg);

}  // namespace trustmhe
