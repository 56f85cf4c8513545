// SPDX-License-Identifier: Apache-2.0
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

#pragma once

#include "s2g/channel.hpp"
#include "s2g/scene.hpp"
#include "s2g/tracer.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace s2g
{

/// Raised for malformed or invalid configuration; the message names the
/// offending field or source position.
class ConfigError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

struct RunConfig
{
    SceneConfig scene;
    TraceLimits limits;
    SweepSpec sweep;
    double rx_height = 1.5;
    std::string output_dir; // empty: S2G_OUTPUT_DIR, then "s2g_out"
    int workers = 1;

    void validate() const;
};

/// Defaults, including the five canonical receiver positions of the scene.
RunConfig default_run_config();

/// Canonical street positions for a scene: mid-canyon, two near-wall
/// points, intersection center and intersection corner.
std::vector<ReceiverSpec> default_receivers(const SceneConfig &scene, double rx_height);

/// Parses and validates a config document. Missing keys keep defaults;
/// unknown keys are rejected.
RunConfig config_from_json(const nlohmann::json &doc);
nlohmann::json config_to_json(const RunConfig &cfg);

/// Reads a JSON file, applies `key.path=value` overrides, then parses.
RunConfig load_config(const std::string &path, const std::vector<std::string> &overrides = {});
RunConfig config_from_text(const std::string &text, const std::vector<std::string> &overrides = {});

/// Applies one dotted-path override to a document.
void apply_override(nlohmann::json &doc, const std::string &assignment);

std::string resolve_output_dir(const RunConfig &cfg);

} // namespace s2g
