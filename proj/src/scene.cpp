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

#include "s2g/scene.hpp"

#include <stdexcept>
#include <string>

namespace s2g
{

namespace
{

void require(bool ok, const char *field, const char *what)
{
    if (!ok)
        throw std::invalid_argument(std::string(field) + ": " + what);
}

// Splits [0, len) into pieces of `step`, the last one truncated.
std::vector<std::pair<double, double>> split_extent(double len, double step)
{
    std::vector<std::pair<double, double>> out;
    const double tol = 1e-9 * std::max(1.0, len);
    double s = 0.0;
    while (s < len - tol)
    {
        const double e = std::min(len, s + step);
        out.emplace_back(s, (len - e) <= tol ? len : e);
        s = out.back().second;
    }
    return out;
}

} // namespace

void MaterialParams::validate() const
{
    require(std::isfinite(rel_permittivity) && rel_permittivity >= 1.0, "material.rel_permittivity", "must be >= 1");
    require(std::isfinite(conductivity) && conductivity >= 0.0, "material.conductivity", "must be >= 0");
    require(scattering_coefficient >= 0.0 && scattering_coefficient <= 1.0, "material.scattering_coefficient",
            "must lie in [0, 1]");
}

void SceneConfig::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    require(positive(block_size_x), "scene.block_size_x", "must be > 0");
    require(positive(block_size_y), "scene.block_size_y", "must be > 0");
    require(positive(street_width), "scene.street_width", "must be > 0");
    require(positive(building_height), "scene.building_height", "must be > 0");
    require(blocks_x >= 1, "scene.blocks_x", "must be >= 1");
    require(blocks_y >= 1, "scene.blocks_y", "must be >= 1");
    require(positive(tile_size), "scene.tile_size", "must be > 0");
    require(tile_size <= std::min({block_size_x, block_size_y, building_height}), "scene.tile_size",
            "must not exceed the smallest wall dimension");
    require(positive(frequency), "scene.frequency_hz", "must be > 0");
    material.validate();
}

const char *to_string(FaceKind kind)
{
    switch (kind)
    {
    case FaceKind::Ground:
        return "ground";
    case FaceKind::Wall:
        return "wall";
    case FaceKind::Roof:
        return "roof";
    }
    return "?";
}

std::array<Vec3, 4> Face::corners() const
{
    const Vec3 du = u_len * u_axis, dv = v_len * v_axis;
    return {origin, origin + du, origin + du + dv, origin + dv};
}

bool Face::contains(const Vec3 &p, double margin) const
{
    if (!bounded)
        return true;
    const double u = u_of(p), v = v_of(p);
    return u >= -margin && u <= u_len + margin && v >= -margin && v <= v_len + margin;
}

double Wedge::azimuth_of(const Vec3 &d) const
{
    const double x = d.dot(t0);
    const double y = d.dot(n0);
    double phi = std::atan2(y, x);
    if (phi < 0.0)
        phi += 2.0 * kPi;
    return phi;
}

bool Wedge::in_exterior(const Vec3 &p, double margin) const
{
    // Convex edge: exterior is the union of the two faces' front half-spaces.
    const Vec3 r = p - a;
    const Vec3 nn = -t0; // outward normal of face n for a right-angle corner
    return r.dot(n0) > -margin || r.dot(nn) > -margin;
}

// ---------------------------------------------------------------------------

UniformGrid::UniformGrid(const std::vector<Building> &buildings, double cell_size) : cell_(cell_size)
{
    if (buildings.empty())
        return;
    bounds_ = buildings.front().box;
    for (const auto &b : buildings)
    {
        bounds_.lo = bounds_.lo.cwiseMin(b.box.lo);
        bounds_.hi = bounds_.hi.cwiseMax(b.box.hi);
    }
    nx_ = std::max(1, static_cast<int>(std::ceil((bounds_.hi.x() - bounds_.lo.x()) / cell_)));
    ny_ = std::max(1, static_cast<int>(std::ceil((bounds_.hi.y() - bounds_.lo.y()) / cell_)));
    cells_.assign(static_cast<std::size_t>(nx_) * ny_, {});
    for (const auto &b : buildings)
    {
        const int x0 = std::clamp(static_cast<int>(std::floor((b.box.lo.x() - bounds_.lo.x()) / cell_)), 0, nx_ - 1);
        const int x1 = std::clamp(static_cast<int>(std::floor((b.box.hi.x() - bounds_.lo.x()) / cell_)), 0, nx_ - 1);
        const int y0 = std::clamp(static_cast<int>(std::floor((b.box.lo.y() - bounds_.lo.y()) / cell_)), 0, ny_ - 1);
        const int y1 = std::clamp(static_cast<int>(std::floor((b.box.hi.y() - bounds_.lo.y()) / cell_)), 0, ny_ - 1);
        for (int iy = y0; iy <= y1; ++iy)
            for (int ix = x0; ix <= x1; ++ix)
                cells_[static_cast<std::size_t>(iy) * nx_ + ix].push_back(b.id);
    }
}

// ---------------------------------------------------------------------------

Scene Scene::open_field(const SceneConfig &config, bool with_ground)
{
    config.validate();
    Scene s;
    s.config_ = config;
    if (with_ground)
    {
        Face g;
        g.id = 0;
        g.kind = FaceKind::Ground;
        g.building = -1;
        g.origin = Vec3::Zero();
        g.u_axis = Vec3::UnitX();
        g.v_axis = Vec3::UnitY();
        g.plane = Plane{Vec3::UnitZ(), 0.0};
        g.bounded = false;
        s.faces_.push_back(g);
        s.face_tiles_.emplace_back(0, 0);
        s.ground_ = 0;
    }
    return s;
}

Scene Scene::build_manhattan(const SceneConfig &config)
{
    Scene s = open_field(config, true);
    const double px = config.block_size_x + config.street_width;
    const double py = config.block_size_y + config.street_width;
    for (int iy = 0; iy < config.blocks_y; ++iy)
    {
        for (int ix = 0; ix < config.blocks_x; ++ix)
        {
            Building b;
            b.id = static_cast<int>(s.buildings_.size());
            b.ix = ix;
            b.iy = iy;
            b.box.lo = Vec3(ix * px, iy * py, 0.0);
            b.box.hi = Vec3(ix * px + config.block_size_x, iy * py + config.block_size_y, config.building_height);
            s.add_building_faces(b);
            s.buildings_.push_back(b);
        }
    }
    for (const auto &b : s.buildings_)
        s.add_building_wedges(b);
    s.grid_ = UniformGrid(s.buildings_, config.street_width);
    return s;
}

void Scene::add_building_faces(Building &b)
{
    const Vec3 lo = b.box.lo, hi = b.box.hi;
    const double dx = hi.x() - lo.x(), dy = hi.y() - lo.y(), dz = hi.z() - lo.z();

    auto add = [&](FaceKind kind, const Vec3 &origin, const Vec3 &u, double ul, const Vec3 &v, double vl,
                   const Vec3 &normal) {
        Face f;
        f.id = static_cast<int>(faces_.size());
        f.kind = kind;
        f.building = b.id;
        f.origin = origin;
        f.u_axis = u;
        f.v_axis = v;
        f.u_len = ul;
        f.v_len = vl;
        f.plane = Plane{normal, normal.dot(origin)};
        faces_.push_back(f);
        tessellate(faces_.back());
        return f.id;
    };

    b.faces[0] = add(FaceKind::Wall, lo, Vec3::UnitX(), dx, Vec3::UnitZ(), dz, -Vec3::UnitY());
    b.faces[1] = add(FaceKind::Wall, Vec3(lo.x(), hi.y(), lo.z()), Vec3::UnitX(), dx, Vec3::UnitZ(), dz, Vec3::UnitY());
    b.faces[2] = add(FaceKind::Wall, lo, Vec3::UnitY(), dy, Vec3::UnitZ(), dz, -Vec3::UnitX());
    b.faces[3] = add(FaceKind::Wall, Vec3(hi.x(), lo.y(), lo.z()), Vec3::UnitY(), dy, Vec3::UnitZ(), dz, Vec3::UnitX());
    b.faces[4] = add(FaceKind::Roof, Vec3(lo.x(), lo.y(), hi.z()), Vec3::UnitX(), dx, Vec3::UnitY(), dy, Vec3::UnitZ());
}

void Scene::add_building_wedges(const Building &b)
{
    auto add = [&](const Vec3 &a, const Vec3 &e, int f0, int fn) {
        Wedge w;
        w.id = static_cast<int>(wedges_.size());
        w.building = b.id;
        w.a = a;
        w.b = e;
        w.length = (e - a).norm();
        w.dir = (e - a) / w.length;
        w.face_0 = f0;
        w.face_n = fn;
        w.n = 1.5;
        const Face &face0 = faces_[f0];
        const Vec3 c = face0.center() - a;
        w.t0 = (c - c.dot(w.dir) * w.dir).normalized();
        w.n0 = face0.normal();
        w.bisector = (face0.normal() + faces_[fn].normal()).normalized();
        wedges_.push_back(w);
    };

    const Vec3 lo = b.box.lo, hi = b.box.hi;
    const double h = hi.z();
    const int south = b.faces[0], north = b.faces[1], west = b.faces[2], east = b.faces[3], roof = b.faces[4];

    // roof edges
    add(Vec3(lo.x(), lo.y(), h), Vec3(hi.x(), lo.y(), h), roof, south);
    add(Vec3(lo.x(), hi.y(), h), Vec3(hi.x(), hi.y(), h), roof, north);
    add(Vec3(lo.x(), lo.y(), h), Vec3(lo.x(), hi.y(), h), roof, west);
    add(Vec3(hi.x(), lo.y(), h), Vec3(hi.x(), hi.y(), h), roof, east);
    // vertical corners
    add(Vec3(lo.x(), lo.y(), lo.z()), Vec3(lo.x(), lo.y(), h), south, west);
    add(Vec3(hi.x(), lo.y(), lo.z()), Vec3(hi.x(), lo.y(), h), south, east);
    add(Vec3(lo.x(), hi.y(), lo.z()), Vec3(lo.x(), hi.y(), h), north, west);
    add(Vec3(hi.x(), hi.y(), lo.z()), Vec3(hi.x(), hi.y(), h), north, east);
}

void Scene::tessellate(const Face &f)
{
    const int first = static_cast<int>(tiles_.size());
    if (f.kind == FaceKind::Wall || (f.kind == FaceKind::Roof && config_.roof_tiles))
    {
        const auto us = split_extent(f.u_len, config_.tile_size);
        const auto vs = split_extent(f.v_len, config_.tile_size);
        for (const auto &[v0, v1] : vs)
        {
            for (const auto &[u0, u1] : us)
            {
                Tile t;
                t.id = static_cast<int>(tiles_.size());
                t.face = f.id;
                t.u0 = u0;
                t.u1 = u1;
                t.v0 = v0;
                t.v1 = v1;
                t.area = (u1 - u0) * (v1 - v0);
                t.center = f.origin + 0.5 * (u0 + u1) * f.u_axis + 0.5 * (v0 + v1) * f.v_axis;
                t.normal = f.normal();
                tiles_.push_back(t);
            }
        }
    }
    face_tiles_.emplace_back(first, static_cast<int>(tiles_.size()));
}

bool Scene::occluded(const Vec3 &a, const Vec3 &b) const
{
    if (ground_ && std::min(a.z(), b.z()) < -kOcclusionTolerance)
        return true;
    if (grid_.empty())
        return false;

    // Restrict to the part of the segment inside the scene volume.
    Aabb vol = grid_.bounds();
    vol.lo.z() = 0.0;
    const double pad = 1.0;
    vol.lo -= Vec3(pad, pad, pad);
    vol.hi += Vec3(pad, pad, pad);
    double t0, t1;
    if (!clip_segment_to_box(a, b, vol, 0.0, t0, t1))
        return false;

    return grid_.walk(a, b, t0, t1, [&](int id) {
        return segment_hits_box(a, b, buildings_[id].box, kOcclusionTolerance);
    });
}

std::optional<int> Scene::building_containing(const Vec3 &p) const
{
    for (const auto &b : buildings_)
        if (b.box.contains(p))
            return b.id;
    return std::nullopt;
}

Vec3 satellite_direction(double elevation_deg, double azimuth_deg)
{
    const double el = deg2rad(elevation_deg), az = deg2rad(azimuth_deg);
    return Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el));
}

Vec3 satellite_position(double elevation_deg, double azimuth_deg, double slant_range, const Vec3 &anchor)
{
    if (!(elevation_deg > 0.0 && elevation_deg <= 90.0))
        throw std::invalid_argument("elevation must lie in (0, 90] degrees");
    if (!(slant_range > 0.0))
        throw std::invalid_argument("slant range must be positive");
    return anchor + slant_range * satellite_direction(elevation_deg, azimuth_deg);
}

} // namespace s2g
