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

#include "s2g/em.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace s2g
{

namespace
{

constexpr cdouble kJ{0.0, 1.0};

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

cdouble dot(const Vec3 &a, const CVec3 &b) { return a.x() * b.x() + a.y() * b.y() + a.z() * b.z(); }

CVec3 lift(const Vec3 &a) { return a.cast<cdouble>(); }

} // namespace

cdouble free_space_field(double length, double wavelength)
{
    if (!(length > 0.0))
        throw std::domain_error("free_space_field: length must be positive");
    const double k = 2.0 * kPi / wavelength;
    return std::exp(-kJ * (k * length)) / length;
}

cdouble complex_permittivity(const MaterialParams &material, double frequency)
{
    return {material.rel_permittivity, -material.conductivity / (2.0 * kPi * frequency * kVacuumPermittivity)};
}

FresnelCoefficients fresnel_coefficients(double theta_i, const MaterialParams &material, double frequency)
{
    const cdouble eps = complex_permittivity(material, frequency);
    const double c = std::cos(theta_i);
    const double s = std::sin(theta_i);
    const cdouble root = std::sqrt(eps - s * s);
    FresnelCoefficients out;
    out.te = (c - root) / (c + root);
    out.tm = (root - eps * c) / (root + eps * c);
    return out;
}

// ---------------------------------------------------------------------------
// Transition function

namespace
{

cdouble transition_asymptotic(double x)
{
    // F ~ sum_k j^k (2k-1)!! / (2x)^k, truncated at the smallest term.
    cdouble sum = 1.0;
    cdouble term = 1.0;
    double prev = 1.0;
    for (int k = 1; k < 60; ++k)
    {
        term *= kJ * (2.0 * k - 1.0) / (2.0 * x);
        const double mag = std::abs(term);
        if (mag > prev)
            break;
        sum += term;
        prev = mag;
        if (mag < 1e-17)
            break;
    }
    return sum;
}

} // namespace

cdouble transition_function(double x)
{
    if (!(x > 0.0))
        throw std::domain_error("transition_function: argument must be positive");
    if (x >= 30.0)
        return transition_asymptotic(x);

    // Rotate the contour onto tau = sqrt(x) + t e^{-j pi/4}:
    // F(x) = 2j sqrt(x) e^{-j pi/4} int_0^inf exp(-t^2 - sqrt(2x) (1 + j) t) dt.
    using boost::math::quadrature::gauss_kronrod;
    const double b = std::sqrt(2.0 * x);
    const double inf = std::numeric_limits<double>::infinity();
    auto re = [b](double t) { return std::exp(-t * t - b * t) * std::cos(b * t); };
    auto im = [b](double t) { return -std::exp(-t * t - b * t) * std::sin(b * t); };
    const double ir = gauss_kronrod<double, 31>::integrate(re, 0.0, inf, 15, 1e-13);
    const double ii = gauss_kronrod<double, 31>::integrate(im, 0.0, inf, 15, 1e-13);
    const cdouble integral{ir, ii};
    return 2.0 * kJ * std::sqrt(x) * std::exp(-kJ * (kPi / 4.0)) * integral;
}

// ---------------------------------------------------------------------------
// UTD

namespace
{

// cot((pi + sign*beta) / (2n)) F(kL a(beta)) with the boundary limit.
cdouble utd_term(double n, double beta, int sign, double kl)
{
    const double nn = std::round((beta + sign * kPi) / (2.0 * kPi * n));
    const double eps = kPi + sign * beta - 2.0 * kPi * n * nn;
    if (std::abs(eps) < 1e-9)
    {
        const double sg = eps < 0.0 ? -1.0 : 1.0;
        const cdouble e4 = std::exp(kJ * (kPi / 4.0));
        return n * (std::sqrt(2.0 * kPi * kl) * sg - 2.0 * kl * eps * e4) * e4;
    }
    const double half = 0.5 * (2.0 * kPi * n * nn - beta);
    const double a = 2.0 * std::cos(half) * std::cos(half);
    const double cot = 1.0 / std::tan((kPi + sign * beta) / (2.0 * n));
    if (a * kl <= 0.0)
        return 0.0;
    return cot * transition_function(kl * a);
}

} // namespace

UtdCoefficient utd_coefficient(double n, double s_i, double s_d, const WedgeAngles &angles, double k,
                               const FresnelCoefficients &face_0, const FresnelCoefficients &face_n)
{
    const double sb = std::sin(angles.beta0);
    const double l = s_i * s_d / (s_i + s_d) * sb * sb;
    const double kl = k * l;
    const cdouble pre = -std::exp(-kJ * (kPi / 4.0)) / (2.0 * n * std::sqrt(2.0 * kPi * k) * sb);

    const double diff = angles.phi - angles.phi0;
    const double sum = angles.phi + angles.phi0;
    const cdouble t1 = utd_term(n, diff, +1, kl);
    const cdouble t2 = utd_term(n, diff, -1, kl);
    const cdouble t3 = utd_term(n, sum, +1, kl);
    const cdouble t4 = utd_term(n, sum, -1, kl);

    UtdCoefficient out;
    out.soft = pre * (t1 + t2 + face_0.te * t4 + face_n.te * t3);
    out.hard = pre * (t1 + t2 - face_0.tm * t4 - face_n.tm * t3);
    return out;
}

UtdCoefficient utd_coefficient(double n, double s_i, double s_d, const WedgeAngles &angles, double k,
                               const MaterialParams *material, double frequency)
{
    FresnelCoefficients g0{-1.0, -1.0}, gn{-1.0, -1.0};
    if (material)
    {
        const double sb = std::sin(angles.beta0);
        const double th0 = std::acos(clamp_unit(std::abs(std::sin(angles.phi0)) * sb));
        const double thn = std::acos(clamp_unit(std::abs(std::sin(n * kPi - angles.phi)) * sb));
        g0 = fresnel_coefficients(th0, *material, frequency);
        gn = fresnel_coefficients(thn, *material, frequency);
    }
    return utd_coefficient(n, s_i, s_d, angles, k, g0, gn);
}

// ---------------------------------------------------------------------------
// Scattering

double er_scattered_intensity(const Tile &tile, const Vec3 &from, const Vec3 &to, double incident_intensity,
                              double scattering_coefficient)
{
    const Vec3 di = from - tile.center;
    const Vec3 ds = to - tile.center;
    const double rs = ds.norm();
    if (!(rs > 0.0) || !(di.norm() > 0.0))
        throw std::domain_error("er_scattered_intensity: zero distance");
    const double cos_i = tile.normal.dot(di) / di.norm();
    const double cos_s = tile.normal.dot(ds) / rs;
    if (cos_i <= 0.0 || cos_s <= 0.0)
        return 0.0;
    const double s2 = scattering_coefficient * scattering_coefficient;
    return incident_intensity * s2 * tile.area * cos_i * cos_s / (kPi * rs * rs);
}

// ---------------------------------------------------------------------------
// Frames and path composition

PolFrame pol_frame(const Vec3 &k, const Vec3 &up)
{
    Vec3 v = up - up.dot(k) * k;
    if (v.norm() < 1e-12)
        v = any_orthogonal(k);
    v.normalize();
    return {v, k.cross(v)};
}

PolFrame rx_frame(const Vec3 &k, const Vec3 &fallback_up)
{
    if (k.cross(Vec3::UnitZ()).norm() < 1e-3)
        return pol_frame(k, fallback_up);
    return pol_frame(k, Vec3::UnitZ());
}

Vec3 satellite_pol_ref(double elevation_deg, double azimuth_deg)
{
    const double el = deg2rad(elevation_deg), az = deg2rad(azimuth_deg);
    return Vec3(-std::sin(el) * std::cos(az), -std::sin(el) * std::sin(az), std::cos(el));
}

double reference_tx_power() { return 4.0 * kPi / (2.0 * kFreeSpaceImpedance); }

RayContribution path_field(const PropPath &path, const Scene &scene, const FieldContext &ctx)
{
    const auto &vx = path.vertices;
    const auto &ix = path.interactions;
    if (vx.size() != ix.size() + 2)
        throw std::invalid_argument("path_field: malformed path");
    const double k = ctx.wavenumber();
    const std::size_t nseg = vx.size() - 1;
    std::vector<Vec3> dir(nseg);
    std::vector<double> len(nseg);
    for (std::size_t i = 0; i < nseg; ++i)
    {
        const Vec3 d = vx[i + 1] - vx[i];
        len[i] = d.norm();
        if (!(len[i] > 0.0))
            throw std::invalid_argument("path_field: zero-length segment");
        dir[i] = d / len[i];
    }

    CVec3 e = lift(pol_frame(dir[0], ctx.tx_pol_ref).v) * (std::exp(-kJ * (k * len[0])) / len[0]);
    double travelled = len[0]; // since the last source (tx or edge)
    bool diffracted = false;
    double rho = 0.0;

    for (std::size_t i = 0; i < ix.size(); ++i)
    {
        const Interaction &it = ix[i];
        const Vec3 &ki = dir[i];
        const Vec3 &ko = dir[i + 1];
        const double l = len[i + 1];
        if (it.type == InteractionType::Reflection)
        {
            const Vec3 &n = scene.faces()[it.element].normal();
            const double theta = std::acos(clamp_unit(std::abs(ki.dot(n))));
            FresnelCoefficients g;
            if (ctx.forced_gamma)
                g = {*ctx.forced_gamma, *ctx.forced_gamma};
            else
                g = fresnel_coefficients(theta, ctx.material, ctx.frequency);
            Vec3 perp = ki.cross(n);
            perp = perp.norm() < 1e-12 ? any_orthogonal(n) : perp.normalized();
            const Vec3 par_i = perp.cross(ki);
            const Vec3 par_r = ko.cross(perp);
            const cdouble ep = dot(perp, e), ea = dot(par_i, e);
            e = g.te * ep * lift(perp) + g.tm * ea * lift(par_r);
        }
        else if (it.type == InteractionType::Diffraction)
        {
            const Wedge &w = scene.wedges()[it.element];
            const double s_in = travelled;
            double s_out = 0.0;
            for (std::size_t j = i + 1; j < nseg; ++j)
            {
                s_out += len[j];
                if (j < ix.size() && ix[j].type != InteractionType::Reflection)
                    break;
            }
            WedgeAngles ang;
            ang.beta0 = std::acos(clamp_unit(ki.dot(w.dir)));
            ang.phi0 = w.azimuth_of(-ki);
            ang.phi = w.azimuth_of(ko);
            const auto d = ctx.forced_gamma
                               ? utd_coefficient(w.n, s_in, s_out, ang, k, {*ctx.forced_gamma, *ctx.forced_gamma},
                                                 {*ctx.forced_gamma, *ctx.forced_gamma})
                               : utd_coefficient(w.n, s_in, s_out, ang, k, &ctx.material, ctx.frequency);
            const Vec3 phi_i = -(w.dir.cross(ki)).normalized();
            const Vec3 beta_i = phi_i.cross(ki);
            const Vec3 phi_d = (w.dir.cross(ko)).normalized();
            const Vec3 beta_d = phi_d.cross(ko);
            const cdouble eb = dot(beta_i, e), ef = dot(phi_i, e);
            e = -(d.soft * eb * lift(beta_d) + d.hard * ef * lift(phi_d));
            e *= std::sqrt(s_in / (l * (s_in + l))) * std::exp(-kJ * (k * l));
            diffracted = true;
            rho = s_in;
            travelled = l;
            continue;
        }
        else
        {
            const Tile &tile = scene.tiles()[it.element];
            const double intensity = e.squaredNorm();
            const double is =
                er_scattered_intensity(tile, vx[i], vx[i + 2], intensity, ctx.material.scattering_coefficient);
            const cdouble a = std::sqrt(0.5 * is) * std::exp(-kJ * (k * path.total_length));
            const PolFrame f = rx_frame(ko, ctx.tx_pol_ref);
            e = a * (lift(f.v) + lift(f.h));
            break;
        }

        double spread;
        if (diffracted)
            spread = std::sqrt(rho / ((travelled + l) * (rho + travelled + l))) /
                     std::sqrt(rho / (travelled * (rho + travelled)));
        else
            spread = travelled / (travelled + l);
        e *= spread * std::exp(-kJ * (k * l));
        travelled += l;
    }

    const PolFrame fr = rx_frame(dir.back(), ctx.tx_pol_ref);
    RayContribution out;
    out.mechanism = path.mechanism;
    out.e_v = dot(fr.v, e);
    out.e_h = dot(fr.h, e);
    const double lambda = ctx.wavelength();
    out.power = (std::norm(out.e_v) + std::norm(out.e_h)) * lambda * lambda / (4.0 * kPi) / (2.0 * kFreeSpaceImpedance);
    out.delay = path.total_length / kSpeedOfLight;
    return out;
}

} // namespace s2g
