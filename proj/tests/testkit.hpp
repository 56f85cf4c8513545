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

#include "oracle/brute_force.hpp"
#include "s2g/em.hpp"
#include "s2g/tracer.hpp"

#include <string>
#include <vector>

namespace testkit
{

struct OracleCase
{
    std::string name;
    s2g::Vec3 tx;
    s2g::Vec3 rx;
};

// One isolated building with generic transmitter/receiver placements.
s2g::Scene single_building();
std::vector<OracleCase> oracle_cases();

// Two buildings across a 20 m street, where diffraction can feed wall tiles.
s2g::Scene two_buildings();
std::vector<OracleCase> street_cases();
s2g::TraceLimits oracle_limits();

struct Mismatch
{
    std::string what;
};

/// Differences between the tracer's paths and the brute-force set.
std::vector<Mismatch> compare_with_oracle(const s2g::Scene &scene, const OracleCase &c, std::size_t *n_paths = nullptr);

// Lit-side over shadow-side total field across the incidence shadow boundary
// of a roof edge, plus the largest level change between neighbouring samples
// of a fine sweep through it. Reflections and scattering are disabled, so the
// geometric-optics field is the direct ray alone.
struct BoundarySweep
{
    double jump_db = 0.0;
    double max_step_db = 0.0;
    int samples = 0;
    int lit_samples = 0;
};
BoundarySweep shadow_boundary_sweep(double step = 0.005, double half_span = 0.5);

// |E_diffracted| / |E_direct| for a receiver 30 degrees into the lit region.
double lit_region_ratio();

// Scattered power integrated over the outward hemisphere at radius r, divided
// by S^2 times the power intercepted by the tile. Midpoint rule in (theta, phi).
double lambertian_hemisphere_ratio(double scattering_coefficient, double theta_i_deg, int n_theta = 400,
                                   int n_phi = 800);

// Seeded Rice envelope samples |nu + sigma (X + jY)| with K = nu^2 / (2 sigma^2).
std::vector<double> rician_samples(double nu, double sigma, int n, unsigned seed);

// Fits `trials` independent seeded draws. Returns median |K_hat - K_true| in
// dB for K_true_db, or for nu = 0 (Rayleigh) the median linear K_hat.
double rice_median_error_db(double k_true_db, int n, int trials, unsigned seed);
double rice_median_rayleigh_k(int n, int trials, unsigned seed);

} // namespace testkit
