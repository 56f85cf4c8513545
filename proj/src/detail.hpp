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

#include "s2g/geometry.hpp"
#include "s2g/scene.hpp"

#include <Eigen/Dense>

#include <vector>

namespace s2g::detail
{

// p -> rot * p + shift
struct Isometry
{
    Eigen::Matrix3d rot = Eigen::Matrix3d::Identity();
    Vec3 shift = Vec3::Zero();

    Vec3 apply(const Vec3 &p) const { return rot * p + shift; }
    Vec3 apply_direction(const Vec3 &d) const { return rot * d; }
};

// mirror(plane) o m
inline Isometry mirror_after(const Plane &pl, const Isometry &m)
{
    const Eigen::Matrix3d h = Eigen::Matrix3d::Identity() - 2.0 * pl.normal * pl.normal.transpose();
    Isometry out;
    out.rot = h * m.rot;
    out.shift = h * m.shift + 2.0 * pl.offset * pl.normal;
    return out;
}

// m o mirror(plane)
inline Isometry mirror_before(const Isometry &m, const Plane &pl)
{
    const Eigen::Matrix3d h = Eigen::Matrix3d::Identity() - 2.0 * pl.normal * pl.normal.transpose();
    Isometry out;
    out.rot = m.rot * h;
    out.shift = m.rot * (2.0 * pl.offset * pl.normal) + m.shift;
    return out;
}

inline constexpr double kGroundHalfExtent = 1e7;

// Face outline; the unbounded ground is stood in for by a large square.
inline std::vector<Vec3> face_polygon(const Face &f)
{
    if (!f.bounded)
    {
        const double e = kGroundHalfExtent;
        const Vec3 o = f.plane.offset * f.normal();
        return {o - e * f.u_axis - e * f.v_axis, o + e * f.u_axis - e * f.v_axis, o + e * f.u_axis + e * f.v_axis,
                o - e * f.u_axis + e * f.v_axis};
    }
    const auto c = f.corners();
    return {c.begin(), c.end()};
}

} // namespace s2g::detail
