#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "wncs/engine.hpp"

namespace wncs {

// Scenario documents are JSON objects:
//
//   {
//     "subsystems": [{"A": [[1.1, 0], [0, 0.9]], "B": ..., "C": ..., "Q": ...,
//                     "R": ..., "W": ..., "V": ..., "x0_mean": [0, 0],
//                     "x0_cov": ..., "q_link": 0.85,
//                     "policy": {"scheme": "coil", "threshold": 0}}],
//     "network": {"dynamic_bits": 20, "static_bits": 9, "alpha": 1000,
//                 "dominant_bit": 1, "channels": 1, "static_ids": [511]},
//     "horizon": 1000, "trials": 1000, "seed": 1,
//     "sweep": {"coil": [0, 0.05], "voi": [0, 0.01]}
//   }
//
// Unknown keys are rejected. Parsing reports every problem found, each with
// the path to the offending key.

Scenario parse_scenario_text(std::string_view text);
Scenario parse_scenario_file(const std::filesystem::path& path);

// Named built-in scenarios ("paper-sec5").
Scenario preset_scenario(std::string_view name);
std::vector<std::string> preset_names();

// Resolves defaults: explicit static identifiers, q_link expanded to one
// entry per channel.
Scenario canonicalize(const Scenario& scenario);

// Canonical JSON text (keys sorted, reals in round-trip form).
std::string serialize_scenario(const Scenario& scenario);

// Hex SHA-256 of the canonical serialization.
std::string config_hash(const Scenario& scenario);

// Exact field-by-field equality.
bool same_scenario(const Scenario& a, const Scenario& b);

}  // namespace wncs
