#pragma once
#include <map>
#include <optional>
#include <string>

#include "isac/harness.hpp"

namespace isac::cfg {

/// Command-line overrides; each beats the corresponding file key.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> solver;
    std::optional<std::string> beams;
    std::optional<int> horizon;
    std::optional<int> antennas;  // sets both n_t and n_r
    std::optional<int> k;
    std::optional<double> rate;
};

struct LoadedConfig {
    sim::Scenario scenario;
    sim::SweepSpec sweep;
};

/// Flat dotted key-value scenario text; missing keys take the shipped
/// defaults, unknown keys and out-of-range values raise ConfigError naming
/// the key. An empty path yields the full default scenario.
LoadedConfig load_config(const std::string& path, const Overrides& ov = {});
LoadedConfig parse_config_text(const std::string& text, const std::string& name,
                               const Overrides& ov = {});

/// Canonical key=value map of a resolved configuration; written to the run
/// manifest so a run can be reproduced bit-exactly without the input file.
std::map<std::string, std::string> resolved_keys(const LoadedConfig& lc);

}  // namespace isac::cfg
