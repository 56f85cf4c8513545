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

#include "brute_force.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace oracle
{

using s2g::Scene;
using s2g::Vec3;

namespace
{

constexpr double kTrim = 1e-6;   // metres kept clear at segment ends
constexpr double kShrink = 1e-7; // box interior margin

struct Step
{
    char kind; // 'R', 'D', 'S'
    int id;
};

Vec3 mirror(const s2g::Face &f, const Vec3 &p)
{
    const double d = f.plane.normal.dot(p) - f.plane.offset;
    return p - 2.0 * d * f.plane.normal;
}

double side(const s2g::Face &f, const Vec3 &p) { return f.plane.normal.dot(p) - f.plane.offset; }

bool on_face(const s2g::Face &f, const Vec3 &p)
{
    if (!f.bounded)
        return true;
    const double u = (p - f.origin).dot(f.u_axis);
    const double v = (p - f.origin).dot(f.v_axis);
    const double tol = 1e-9;
    return u >= -tol && u <= f.u_len + tol && v >= -tol && v <= f.v_len + tol;
}

// Point where segment a->b meets the face plane, if it crosses it.
std::optional<Vec3> cross_plane(const s2g::Face &f, const Vec3 &a, const Vec3 &b)
{
    const double da = side(f, a), db = side(f, b);
    if (da * db >= 0.0)
        return std::nullopt;
    return a + (da / (da - db)) * (b - a);
}

// Minimiser of |p(t) - a| + |p(t) - b| over the edge, by golden-section search.
std::optional<Vec3> edge_point(const s2g::Wedge &w, const Vec3 &a, const Vec3 &b)
{
    auto f = [&](double t) {
        const Vec3 p = w.a + t * w.dir;
        return (p - a).norm() + (p - b).norm();
    };
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double lo = 0.0, hi = w.length;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > 1e-11)
    {
        if (f1 < f2)
        {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
        else
        {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
    }
    const double t = 0.5 * (lo + hi);
    if (t < 1e-6 || t > w.length - 1e-6)
        return std::nullopt;
    return w.a + t * w.dir;
}

bool exterior(const Scene &scene, const s2g::Wedge &w, const Vec3 &p, const Vec3 &q)
{
    const Vec3 d = q - p;
    return d.dot(scene.faces()[w.face_0].normal()) > 1e-9 || d.dot(scene.faces()[w.face_n].normal()) > 1e-9;
}

// Interaction points for a sequence, or nothing if it is not realisable.
std::optional<std::vector<Vec3>> solve(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const std::vector<Step> &seq)
{
    const auto &faces = scene.faces();
    if (!seq.empty() && seq.back().kind == 'S')
    {
        // Scattering ends the path: the prefix runs to the tile center.
        const Vec3 center = scene.tiles()[seq.back().id].center;
        auto pre = solve(scene, tx, center, std::vector<Step>(seq.begin(), seq.end() - 1));
        if (!pre)
            return std::nullopt;
        pre->push_back(center);
        return pre;
    }
    // The sequence is split at its diffraction (if any) into reflection runs
    // unfolded by images.
    int pivot = -1;
    for (std::size_t i = 0; i < seq.size(); ++i)
        if (seq[i].kind != 'R')
            pivot = static_cast<int>(i);

    auto run_points = [&](Vec3 from, Vec3 to, int first, int last) -> std::optional<std::vector<Vec3>> {
        // Reflections seq[first..last) between fixed points `from` and `to`.
        std::vector<Vec3> images{from};
        for (int i = first; i < last; ++i)
            images.push_back(mirror(faces[seq[i].id], images.back()));
        std::vector<Vec3> pts(last - first);
        Vec3 target = to;
        for (int i = last - 1; i >= first; --i)
        {
            const auto &f = faces[seq[i].id];
            auto hit = cross_plane(f, images[i - first + 1], target);
            if (!hit || !on_face(f, *hit))
                return std::nullopt;
            pts[i - first] = *hit;
            target = *hit;
        }
        // Both neighbours of every reflection point must face the surface.
        for (int i = first; i < last; ++i)
        {
            const Vec3 prev = i == first ? from : pts[i - first - 1];
            const Vec3 next = i == last - 1 ? to : pts[i - first + 1];
            const auto &f = faces[seq[i].id];
            if (side(f, prev) <= 1e-9 || side(f, next) <= 1e-9)
                return std::nullopt;
        }
        return pts;
    };

    std::vector<Vec3> pts(seq.size());
    if (pivot < 0)
    {
        auto r = run_points(tx, rx, 0, static_cast<int>(seq.size()));
        if (!r)
            return std::nullopt;
        return r;
    }

    Vec3 pivot_point;
    const Step &ps = seq[pivot];
    {
        Vec3 a = tx;
        for (int i = 0; i < pivot; ++i)
            a = mirror(faces[seq[i].id], a);
        Vec3 b = rx;
        for (int i = static_cast<int>(seq.size()) - 1; i > pivot; --i)
            b = mirror(faces[seq[i].id], b);
        auto p = edge_point(scene.wedges()[ps.id], a, b);
        if (!p)
            return std::nullopt;
        pivot_point = *p;
    }
    auto before = run_points(tx, pivot_point, 0, pivot);
    auto after = run_points(pivot_point, rx, pivot + 1, static_cast<int>(seq.size()));
    if (!before || !after)
        return std::nullopt;
    std::copy(before->begin(), before->end(), pts.begin());
    pts[pivot] = pivot_point;
    std::copy(after->begin(), after->end(), pts.begin() + pivot + 1);
    return pts;
}

std::string key_of(const std::vector<Step> &seq)
{
    std::string k;
    for (std::size_t i = 0; i < seq.size(); ++i)
    {
        if (i)
            k += ';';
        k += seq[i].kind;
        k += ':';
        k += seq[i].kind == 'R' ? 'f' : seq[i].kind == 'D' ? 'w' : 't';
        k += std::to_string(seq[i].id);
    }
    return k;
}

void try_sequence(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const std::vector<Step> &seq,
                  std::vector<BrutePath> &out)
{
    auto pts = solve(scene, tx, rx, seq);
    if (!pts)
        return;
    std::vector<Vec3> verts{tx};
    verts.insert(verts.end(), pts->begin(), pts->end());
    verts.push_back(rx);

    for (std::size_t i = 0; i < seq.size(); ++i)
    {
        const Vec3 &p = verts[i + 1];
        const Vec3 &prev = verts[i], &next = verts[i + 2];
        if (seq[i].kind == 'D')
        {
            const auto &w = scene.wedges()[seq[i].id];
            if (!exterior(scene, w, p, prev) || !exterior(scene, w, p, next))
                return;
        }
        if (seq[i].kind == 'S')
        {
            const auto &t = scene.tiles()[seq[i].id];
            if ((prev - t.center).dot(t.normal) <= 1e-9 || (next - t.center).dot(t.normal) <= 1e-9)
                return;
        }
    }
    double length = 0.0;
    for (std::size_t i = 0; i + 1 < verts.size(); ++i)
    {
        if (blocked(scene, verts[i], verts[i + 1]))
            return;
        length += (verts[i + 1] - verts[i]).norm();
    }
    out.push_back({key_of(seq), length, verts});
}

} // namespace

bool blocked(const Scene &scene, const Vec3 &a, const Vec3 &b)
{
    const double len = (b - a).norm();
    if (len <= 2.0 * kTrim)
        return false;
    const double t0 = kTrim / len, t1 = 1.0 - kTrim / len;
    if (scene.ground_face())
    {
        const Vec3 p = a + t0 * (b - a), q = a + t1 * (b - a);
        if (p.z() < -1e-9 || q.z() < -1e-9)
            return true;
    }
    for (const auto &bld : scene.buildings())
    {
        double lo = t0, hi = t1;
        bool hit = true;
        for (int k = 0; k < 3 && hit; ++k)
        {
            const double bmin = bld.box.lo[k] + kShrink, bmax = bld.box.hi[k] - kShrink;
            const double d = b[k] - a[k];
            if (std::abs(d) < 1e-15)
            {
                if (a[k] <= bmin || a[k] >= bmax)
                    hit = false;
                continue;
            }
            double ta = (bmin - a[k]) / d, tb = (bmax - a[k]) / d;
            if (ta > tb)
                std::swap(ta, tb);
            lo = std::max(lo, ta);
            hi = std::min(hi, tb);
            if (lo >= hi)
                hit = false;
        }
        if (hit)
            return true;
    }
    return false;
}

std::vector<BrutePath> enumerate_paths(const Scene &scene, const Vec3 &tx, const Vec3 &rx, const BruteLimits &limits)
{
    const int nf = static_cast<int>(scene.faces().size());
    const int nw = static_cast<int>(scene.wedges().size());
    const int nt = static_cast<int>(scene.tiles().size());
    std::vector<BrutePath> out;

    // Reflection sequences (no face twice in a row) up to the cap.
    std::vector<std::vector<Step>> runs{{}};
    for (std::size_t i = 0; i < runs.size(); ++i)
    {
        if (static_cast<int>(runs[i].size()) >= limits.max_reflections)
            continue;
        for (int f = 0; f < nf; ++f)
        {
            if (!runs[i].empty() && runs[i].back().id == f)
                continue;
            auto next = runs[i];
            next.push_back({'R', f});
            runs.push_back(next);
        }
    }

    for (const auto &run : runs)
        try_sequence(scene, tx, rx, run, out);

    if (limits.max_diffractions >= 1)
        for (int w = 0; w < nw; ++w)
            for (const auto &pre : runs)
                for (const auto &post : runs)
                {
                    if (pre.size() + post.size() > static_cast<std::size_t>(limits.max_reflections))
                        continue;
                    std::vector<Step> seq = pre;
                    seq.push_back({'D', w});
                    seq.insert(seq.end(), post.begin(), post.end());
                    try_sequence(scene, tx, rx, seq, out);
                }

    if (limits.scattering)
        for (int t = 0; t < nt; ++t)
        {
            try_sequence(scene, tx, rx, {{'S', t}}, out);
            if (limits.max_reflections >= 1)
                for (int f = 0; f < nf; ++f)
                    try_sequence(scene, tx, rx, {{'R', f}, {'S', t}}, out);
            if (limits.max_diffractions >= 1)
                for (int w = 0; w < nw; ++w)
                    try_sequence(scene, tx, rx, {{'D', w}, {'S', t}}, out);
        }

    std::sort(out.begin(), out.end(), [](const BrutePath &a, const BrutePath &b) { return a.key < b.key; });
    return out;
}

} // namespace oracle
