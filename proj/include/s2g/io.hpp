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
#include "s2g/em.hpp"
#include "s2g/scene.hpp"
#include "s2g/tracer.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace s2g
{

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Quotes a CSV field when it contains a separator, quote or line break.
std::string csv_field(const std::string &s);

nlohmann::json scene_to_json(const Scene &scene);

void write_paths_csv(std::ostream &os, const std::vector<PropPath> &paths);
void write_contributions_csv(std::ostream &os, const std::vector<RayContribution> &contributions);

struct BreakdownRow
{
    double elevation = 0.0;
    double azimuth = 0.0;
    std::string rx_id;
    MechanismBreakdown breakdown;
};
void write_breakdown_csv(std::ostream &os, const std::vector<BreakdownRow> &rows);

void write_sweep_csv(std::ostream &os, const std::vector<CellResult> &rows);
void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows);
void write_errors_csv(std::ostream &os, const std::vector<CellResult> &rows);

/// Lossless JSON form of a finished cell, used by the sweep journal.
nlohmann::json cell_to_json(const CellResult &r);
CellResult cell_from_json(const nlohmann::json &j);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string &path, const std::string &text);

} // namespace s2g
