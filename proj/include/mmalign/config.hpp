// SPDX-License-Identifier: Apache-2.0
//
// mmalign: sequential mmWave beam alignment simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef MMALIGN_CONFIG_HPP
#define MMALIGN_CONFIG_HPP

#include "mmalign/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Scenario files are flat JSON objects. Angles are given in degrees
// (theta_min_deg, theta_max_deg); complex values are split into _re/_im keys.
// Unknown keys are rejected.

namespace mmalign
{

inline constexpr std::string_view tool_version = "0.1.0";

struct ConfigOverrides
{
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::vector<double>> snr_db;
    std::optional<std::vector<Algorithm>> algorithms;
    std::optional<bool> paired_randomness;
    std::optional<int> tau;
};

// Parse a scenario document. Missing keys keep their defaults; an empty
// document (or one holding only whitespace) yields the default scenario.
ScenarioConfig parse_config_text(std::string_view text);
ScenarioConfig parse_config_file(const std::filesystem::path& path);

// File (if any), then overrides, then validation.
ScenarioConfig resolve_config(const std::optional<std::filesystem::path>& path, const ConfigOverrides& overrides);

void apply_overrides(ScenarioConfig& cfg, const ConfigOverrides& overrides);

// "lo:hi:step", inclusive of hi when it lies on the lattice. A bare number is
// a single point.
std::vector<double> parse_snr_range(std::string_view spec);

// Comma-separated algorithm names.
std::vector<Algorithm> parse_algorithm_list(std::string_view spec);

// Every field written explicitly; the result parses back to the same config.
std::string config_to_json(const ScenarioConfig& cfg, int indent = 2);

struct RunManifest
{
    ScenarioConfig config;
    std::string command;
    std::string version{tool_version};
    std::string timestamp;
    std::vector<std::string> outputs;

    std::string to_json() const;
};

// UTC, ISO 8601.
std::string utc_timestamp();

// Write to a sibling temporary and rename into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

} // namespace mmalign

#endif // MMALIGN_CONFIG_HPP
