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

#include "s2g/em.hpp"
#include "s2g/scene.hpp"
#include "s2g/tracer.hpp"

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace s2g
{

struct MechanismBreakdown
{
    std::array<double, 7> power{};    // W, indexed like kMechanisms
    std::array<double, 7> fraction{}; // NaN when total power is zero
    double total = 0.0;
    bool defined = false;             // false for empty or zero-power input
};

MechanismBreakdown mechanism_breakdown(const std::vector<RayContribution> &contributions);

struct GridConfig
{
    int size = 15;
    double spacing_wavelengths = 0.25;

    void validate() const;
};

struct EnvelopeGrid
{
    int size = 0;
    Vec3 center = Vec3::Zero();
    double spacing = 0.0;
    std::vector<double> envelope; // row-major, index = iy * size + ix

    Vec3 point(int ix, int iy) const;
};

/// Grid sample positions: a horizontal square centered on `center`, x then y.
std::vector<Vec3> grid_points(const Vec3 &center, int size, double spacing);

/// Envelope |sum E_v| at every grid point. Throws std::invalid_argument
/// naming the first grid point that lies inside a building.
EnvelopeGrid sample_envelope_grid(const Tracer &tracer, const Vec3 &center, const GridConfig &grid,
                                  const FieldContext &ctx, TraceDiagnostics *diag = nullptr);

struct KFactorEstimate
{
    double nu = 0.0;
    double sigma = 0.0;
    double k_linear = 0.0;
    double k_db = 0.0;
    bool los = false;
    int n_samples = 0;
    bool converged = false;
};

inline constexpr double kKFactorCapDb = 60.0;

/// Maximum-likelihood Rice fit. Throws std::invalid_argument for fewer than
/// two samples or negative samples.
KFactorEstimate rice_fit(const std::vector<double> &samples);

/// Rice log-likelihood of samples (without the parameter-free sum of log r).
double rice_loglik(const std::vector<double> &samples, double nu, double sigma);

struct ReceiverSpec
{
    std::string id;
    Vec3 position = Vec3::Zero();
};

struct SweepSpec
{
    std::vector<double> elevations;
    std::vector<double> azimuths;
    std::vector<ReceiverSpec> receivers;
    GridConfig grid;
    double slant_range = 20000.0;
};

struct SweepCell
{
    std::size_t index = 0;
    double elevation = 0.0;
    double azimuth = 0.0;
    std::size_t rx_index = 0;
    ReceiverSpec rx;
};

struct CellResult
{
    SweepCell cell;
    bool ok = false;
    std::string error;
    bool los = false;
    KFactorEstimate k;
    MechanismBreakdown breakdown;
    TraceDiagnostics diag;
    int mixed_visibility = 0; // grid points whose LoS state differs from the center
};

struct AggregateRow
{
    double elevation = 0.0;
    std::string subset; // "los" or "all"
    double mean_k_db = 0.0;
    double std_k_db = 0.0;
    std::size_t n_cells = 0;
};

struct SweepResult
{
    std::vector<CellResult> rows;
    std::vector<AggregateRow> aggregates;
    bool any_failed() const;
};

/// Cells in canonical order: elevation, azimuth, receiver (list order).
std::vector<SweepCell> sweep_cells(const SweepSpec &spec);

/// Everything needed to evaluate cells; immutable and shared by workers.
struct SweepContext
{
    const Scene *scene = nullptr;
    std::shared_ptr<const PathCatalog> catalog;
    SweepSpec spec;
};

/// Trace, field and fit for one cell. Failures are reported in the result.
CellResult run_cell(const SweepContext &ctx, const SweepCell &cell);

/// Single-point contributions (path plus field) for a cell's grid center.
struct CellTrace
{
    std::vector<PropPath> paths;
    std::vector<RayContribution> contributions;
};
CellTrace trace_cell(const SweepContext &ctx, const SweepCell &cell);

std::vector<AggregateRow> aggregate(const std::vector<CellResult> &rows, const std::vector<double> &elevations);

/// Runs all cells not present in `done` on `workers` threads. `on_done` is
/// called (serialized) as each new cell completes. Rows are returned in
/// canonical order regardless of scheduling.
SweepResult run_sweep(const SweepContext &ctx, int workers, const std::vector<CellResult> &done = {},
                      const std::function<void(const CellResult &)> &on_done = {});

} // namespace s2g
