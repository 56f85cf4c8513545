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

#include <algorithm>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace s2g
{

/// Electrical and roughness parameters shared by walls and ground.
struct MaterialParams
{
    double rel_permittivity = 5.31;
    double conductivity = 0.079;          // S/m
    double scattering_coefficient = 0.4;  // effective-roughness S, amplitude fraction

    void validate() const;
};

struct SceneConfig
{
    double block_size_x = 40.0;
    double block_size_y = 30.0;
    double street_width = 20.0;
    double building_height = 20.0;
    int blocks_x = 3;
    int blocks_y = 3;
    double tile_size = 5.0;
    bool roof_tiles = false;
    double frequency = 3e9;
    MaterialParams material;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;

    double wavelength() const { return kSpeedOfLight / frequency; }
    double extent_x() const { return blocks_x * block_size_x + (blocks_x - 1) * street_width; }
    double extent_y() const { return blocks_y * block_size_y + (blocks_y - 1) * street_width; }
};

enum class FaceKind
{
    Ground,
    Wall,
    Roof
};

const char *to_string(FaceKind kind);

/// Axis-aligned planar rectangle (or the unbounded ground plane).
struct Face
{
    int id = -1;
    FaceKind kind = FaceKind::Wall;
    int building = -1; // -1 for the ground
    Vec3 origin = Vec3::Zero();
    Vec3 u_axis = Vec3::UnitX();
    Vec3 v_axis = Vec3::UnitY();
    double u_len = 0.0;
    double v_len = 0.0;
    Plane plane;
    bool bounded = true;

    const Vec3 &normal() const { return plane.normal; }
    double area() const { return u_len * v_len; }
    Vec3 center() const { return origin + 0.5 * u_len * u_axis + 0.5 * v_len * v_axis; }
    std::array<Vec3, 4> corners() const;

    // In-plane coordinates of a point (assumed on or near the plane).
    double u_of(const Vec3 &p) const { return (p - origin).dot(u_axis); }
    double v_of(const Vec3 &p) const { return (p - origin).dot(v_axis); }

    /// True when the projection of p lies inside the rectangle grown by margin.
    bool contains(const Vec3 &p, double margin = 1e-9) const;
};

/// Convex building edge shared by two faces.
struct Wedge
{
    int id = -1;
    int building = -1;
    Vec3 a = Vec3::Zero();
    Vec3 b = Vec3::Zero();
    Vec3 dir = Vec3::UnitX(); // unit, a -> b
    double length = 0.0;
    int face_0 = -1;
    int face_n = -1;
    double n = 1.5;           // exterior angle / pi
    Vec3 t0 = Vec3::UnitX();  // in face 0, perpendicular to the edge, pointing away from it
    Vec3 n0 = Vec3::UnitZ();  // outward normal of face 0
    Vec3 bisector = Vec3::UnitZ();

    Vec3 point_at(double t) const { return a + t * dir; }

    /// Angle of direction d about the edge, measured from face 0 through the
    /// exterior region, in [0, 2 pi).
    double azimuth_of(const Vec3 &d) const;

    /// True when p lies in the exterior region (outside the interior angle).
    bool in_exterior(const Vec3 &p, double margin = 0.0) const;
};

struct Tile
{
    int id = -1;
    int face = -1;
    Vec3 center = Vec3::Zero();
    Vec3 normal = Vec3::UnitZ();
    double u0 = 0.0, u1 = 0.0; // extent in the parent face's (u, v) coordinates
    double v0 = 0.0, v1 = 0.0;
    double area = 0.0;
};

struct Building
{
    int id = -1;
    int ix = 0, iy = 0;
    Aabb box;
    std::array<int, 5> faces{}; // south, north, west, east, roof
};

/// Uniform 2-D grid over the footprint; every building is a vertical prism
/// standing on the ground, so one cell column holds all candidates.
class UniformGrid
{
  public:
    UniformGrid() = default;
    UniformGrid(const std::vector<Building> &buildings, double cell_size);

    /// Visits candidate building ids along the xy-projection of [a, b]
    /// restricted to [t0, t1]. The visitor returns true to stop early.
    template <class Visitor>
    bool walk(const Vec3 &a, const Vec3 &b, double t0, double t1, Visitor &&visit) const;

    const Aabb &bounds() const { return bounds_; }
    bool empty() const { return cells_.empty(); }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

  private:
    Aabb bounds_;
    double cell_ = 1.0;
    int nx_ = 0, ny_ = 0;
    std::vector<std::vector<int>> cells_;
};

class Scene
{
  public:
    /// Regular Manhattan grid of box buildings.
    static Scene build_manhattan(const SceneConfig &config);

    /// Scene without buildings; the ground plane is optional.
    static Scene open_field(const SceneConfig &config, bool with_ground = true);

    const SceneConfig &config() const { return config_; }
    const std::vector<Building> &buildings() const { return buildings_; }
    const std::vector<Face> &faces() const { return faces_; }
    const std::vector<Wedge> &wedges() const { return wedges_; }
    const std::vector<Tile> &tiles() const { return tiles_; }
    const MaterialParams &material() const { return config_.material; }
    std::optional<int> ground_face() const { return ground_; }
    const UniformGrid &index() const { return grid_; }

    /// True iff the open segment (a, b) enters a building interior or passes
    /// below the ground.
    bool occluded(const Vec3 &a, const Vec3 &b) const;

    /// Building whose interior contains p, if any.
    std::optional<int> building_containing(const Vec3 &p) const;

    /// Tiles belonging to face f, as a contiguous id range [first, last).
    std::pair<int, int> tiles_of_face(int f) const { return face_tiles_[f]; }

  private:
    void add_building_faces(Building &b);
    void add_building_wedges(const Building &b);
    void tessellate(const Face &f);

    SceneConfig config_;
    std::vector<Building> buildings_;
    std::vector<Face> faces_;
    std::vector<Wedge> wedges_;
    std::vector<Tile> tiles_;
    std::vector<std::pair<int, int>> face_tiles_;
    std::optional<int> ground_;
    UniformGrid grid_;
};

/// Satellite position at slant range along (elevation, azimuth) from anchor;
/// azimuth 0 is the +x street axis.
Vec3 satellite_position(double elevation_deg, double azimuth_deg, double slant_range, const Vec3 &anchor);

/// Unit vector from the anchor toward the satellite.
Vec3 satellite_direction(double elevation_deg, double azimuth_deg);

// ---------------------------------------------------------------------------

template <class Visitor>
bool UniformGrid::walk(const Vec3 &a, const Vec3 &b, double t0, double t1, Visitor &&visit) const
{
    if (cells_.empty())
        return false;
    const double dx = b.x() - a.x(), dy = b.y() - a.y();
    const double px = a.x() + t0 * dx - bounds_.lo.x();
    const double py = a.y() + t0 * dy - bounds_.lo.y();
    int ix = std::clamp(static_cast<int>(std::floor(px / cell_)), 0, nx_ - 1);
    int iy = std::clamp(static_cast<int>(std::floor(py / cell_)), 0, ny_ - 1);

    const int step_x = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int step_y = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    double next_x = inf, next_y = inf, delta_x = inf, delta_y = inf;
    if (step_x != 0)
    {
        const double edge = (ix + (step_x > 0 ? 1 : 0)) * cell_;
        next_x = t0 + (edge - px) / dx;
        delta_x = cell_ / std::abs(dx);
    }
    if (step_y != 0)
    {
        const double edge = (iy + (step_y > 0 ? 1 : 0)) * cell_;
        next_y = t0 + (edge - py) / dy;
        delta_y = cell_ / std::abs(dy);
    }

    while (true)
    {
        for (int id : cells_[static_cast<std::size_t>(iy) * nx_ + ix])
            if (visit(id))
                return true;
        if (next_x < next_y)
        {
            if (next_x > t1)
                break;
            ix += step_x;
            next_x += delta_x;
        }
        else
        {
            if (next_y > t1)
                break;
            iy += step_y;
            next_y += delta_y;
        }
        if (ix < 0 || iy < 0 || ix >= nx_ || iy >= ny_)
            break;
    }
    return false;
}

} // namespace s2g
