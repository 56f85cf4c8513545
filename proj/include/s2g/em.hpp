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

#include "s2g/scene.hpp"
#include "s2g/tracer.hpp"

#include <complex>
#include <optional>

namespace s2g
{

using cdouble = std::complex<double>;
using CVec3 = Eigen::Vector3cd;

/// Reference spherical wave, 1 V/m at 1 m.
cdouble free_space_field(double length, double wavelength);

cdouble complex_permittivity(const MaterialParams &material, double frequency);

struct FresnelCoefficients
{
    cdouble te; // perpendicular (soft)
    cdouble tm; // parallel (hard)
};

/// Plane-interface reflection coefficients at incidence angle theta_i (from
/// the normal). The parallel coefficient refers to the basis pair
/// e_par_i = e_perp x k_i, e_par_r = k_r x e_perp, so both coefficients tend
/// to -1 for a perfect conductor and coincide at normal incidence.
FresnelCoefficients fresnel_coefficients(double theta_i, const MaterialParams &material, double frequency);

/// UTD transition function F(x) = 2j sqrt(x) e^{jx} int_{sqrt x}^inf e^{-j t^2} dt.
cdouble transition_function(double x);

struct WedgeAngles
{
    double phi = 0.0;   // observation angle from face 0
    double phi0 = 0.0;  // incidence angle from face 0
    double beta0 = kPi / 2; // angle between incident ray and edge
};

struct UtdCoefficient
{
    cdouble soft;
    cdouble hard;
};

/// Kouyoumjian-Pathak wedge coefficient with Luebbers' reflection weighting
/// of the face terms. A null material gives the perfectly conducting wedge.
UtdCoefficient utd_coefficient(double n, double s_i, double s_d, const WedgeAngles &angles, double k,
                               const MaterialParams *material, double frequency);

/// Same with explicit face reflection coefficients (face 0 and face n).
UtdCoefficient utd_coefficient(double n, double s_i, double s_d, const WedgeAngles &angles, double k,
                               const FresnelCoefficients &face_0, const FresnelCoefficients &face_n);

/// Lambertian effective-roughness scattering from one tile. Returns |E_s|^2.
double er_scattered_intensity(const Tile &tile, const Vec3 &from, const Vec3 &to, double incident_intensity,
                              double scattering_coefficient);

/// Polarization frame for a ray travelling along k: v is the projection of
/// `up` orthogonal to k, h = k x v.
struct PolFrame
{
    Vec3 v;
    Vec3 h;
};
PolFrame pol_frame(const Vec3 &k, const Vec3 &up);

/// Receiver-side frame: vertical projection, falling back to `fallback_up`
/// for rays arriving near the zenith or nadir.
PolFrame rx_frame(const Vec3 &k, const Vec3 &fallback_up);

struct FieldContext
{
    double frequency = 3e9;
    MaterialParams material;
    Vec3 tx_pol_ref = Vec3::UnitZ();       // launched polarization is this vector projected off the ray
    std::optional<cdouble> forced_gamma;   // overrides every Fresnel coefficient, wedge faces included

    double wavelength() const { return kSpeedOfLight / frequency; }
    double wavenumber() const { return 2.0 * kPi / wavelength(); }
};

/// Polarization reference of a satellite at (el, az): the unit vector
/// orthogonal to its line of sight in the local vertical plane.
Vec3 satellite_pol_ref(double elevation_deg, double azimuth_deg);

struct RayContribution
{
    Mechanism mechanism = Mechanism::L;
    cdouble e_v;
    cdouble e_h;
    double power = 0.0; // W, (|E_v|^2 + |E_h|^2) lambda^2 / (4 pi) / (2 eta)
    double delay = 0.0; // s
};

/// Transmit power implied by the reference field (1 V/m at 1 m, isotropic).
double reference_tx_power();

RayContribution path_field(const PropPath &path, const Scene &scene, const FieldContext &ctx);

} // namespace s2g
