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

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <numbers>

namespace s2g
{

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kVacuumPermittivity = 8.8541878128e-12;
inline constexpr double kFreeSpaceImpedance = 376.730313668;

// Lift applied to interaction points before occlusion tests.
inline constexpr double kSurfaceLift = 1e-6;

// Building interiors are shrunk by this amount so that rays grazing a surface
// are never reported as blocked.
inline constexpr double kOcclusionTolerance = 1e-7;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Axis-aligned box. Occlusion always refers to the open interior.
struct Aabb
{
    Vec3 lo = Vec3::Zero();
    Vec3 hi = Vec3::Zero();

    bool contains(const Vec3 &p, double tol = 0.0) const
    {
        return p.x() > lo.x() + tol && p.x() < hi.x() - tol && p.y() > lo.y() + tol &&
               p.y() < hi.y() - tol && p.z() > lo.z() + tol && p.z() < hi.z() - tol;
    }

    bool overlaps(const Aabb &o) const
    {
        return lo.x() < o.hi.x() && o.lo.x() < hi.x() && lo.y() < o.hi.y() && o.lo.y() < hi.y() &&
               lo.z() < o.hi.z() && o.lo.z() < hi.z();
    }
};

// Parameter interval [t0, t1] of the segment a + t (b - a), t in [0,1], lying
// strictly inside the box shrunk by `shrink`. Returns false when empty.
inline bool clip_segment_to_box(const Vec3 &a, const Vec3 &b, const Aabb &box, double shrink,
                                double &t0, double &t1)
{
    t0 = 0.0;
    t1 = 1.0;
    const Vec3 d = b - a;
    for (int k = 0; k < 3; ++k)
    {
        const double lo = box.lo[k] + shrink;
        const double hi = box.hi[k] - shrink;
        if (lo >= hi)
            return false;
        if (d[k] == 0.0)
        {
            if (a[k] <= lo || a[k] >= hi)
                return false;
            continue;
        }
        double ta = (lo - a[k]) / d[k];
        double tb = (hi - a[k]) / d[k];
        if (ta > tb)
            std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 >= t1)
            return false;
    }
    return t0 < t1;
}

inline bool segment_hits_box(const Vec3 &a, const Vec3 &b, const Aabb &box, double shrink)
{
    double t0, t1;
    return clip_segment_to_box(a, b, box, shrink, t0, t1);
}

/// Oriented plane n . x = offset with unit normal n.
struct Plane
{
    Vec3 normal = Vec3::UnitZ();
    double offset = 0.0;

    double signed_distance(const Vec3 &p) const { return normal.dot(p) - offset; }
    Vec3 mirror(const Vec3 &p) const { return p - 2.0 * signed_distance(p) * normal; }
    Vec3 mirror_direction(const Vec3 &d) const { return d - 2.0 * d.dot(normal) * normal; }
};

// Any unit vector orthogonal to v (v need not be normalised).
inline Vec3 any_orthogonal(const Vec3 &v)
{
    const Vec3 ref = std::abs(v.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
    return v.cross(ref).normalized();
}

} // namespace s2g
