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

#include "s2g/tracer.hpp"

#include "detail.hpp"

#include <algorithm>
#include <stdexcept>

namespace s2g
{

namespace
{

using detail::face_polygon;
using detail::Isometry;

constexpr double kStrict = 1e-9;

using Polygon = std::vector<Vec3>;

Polygon clip_polygon(const Polygon &poly, const Plane &pl, double eps)
{
    Polygon out;
    const std::size_t n = poly.size();
    if (n == 0)
        return out;
    out.reserve(n + 2);
    for (std::size_t i = 0; i < n; ++i)
    {
        const Vec3 &a = poly[i];
        const Vec3 &b = poly[(i + 1) % n];
        const double da = pl.signed_distance(a) + eps;
        const double db = pl.signed_distance(b) + eps;
        if (da >= 0.0)
            out.push_back(a);
        if ((da >= 0.0) != (db >= 0.0))
            out.push_back(a + (da / (da - db)) * (b - a));
    }
    return out;
}

double polygon_area(const Polygon &poly)
{
    Vec3 acc = Vec3::Zero();
    for (std::size_t i = 1; i + 1 < poly.size(); ++i)
        acc += (poly[i] - poly[0]).cross(poly[i + 1] - poly[0]);
    return 0.5 * acc.norm();
}

Vec3 centroid(const Polygon &poly)
{
    Vec3 c = Vec3::Zero();
    for (const auto &p : poly)
        c += p;
    return c / static_cast<double>(poly.size());
}

// Necessary condition for a straight unfolded segment between two point
// sets to cross a convex polygon from its front side.
bool hull_crosses(const std::vector<Vec3> &from, const std::vector<Vec3> &to, const Polygon &poly, const Vec3 &normal)
{
    const Plane pl{normal, normal.dot(poly[0])};
    bool front = false, back = false;
    for (const auto &p : from)
        front = front || pl.signed_distance(p) > kStrict;
    for (const auto &p : to)
        back = back || pl.signed_distance(p) < -kStrict;
    if (!front || !back)
        return false;
    const Vec3 c = centroid(poly);
    for (std::size_t i = 0; i < poly.size(); ++i)
    {
        const Vec3 &a = poly[i];
        const Vec3 &b = poly[(i + 1) % poly.size()];
        Vec3 m = (b - a).cross(normal);
        if (m.dot(c - a) > 0.0)
            m = -m;
        bool all_out = true;
        for (const auto &p : from)
            all_out = all_out && m.dot(p - a) > kStrict;
        for (const auto &p : to)
            all_out = all_out && m.dot(p - a) > kStrict;
        if (all_out)
            return false;
    }
    return true;
}

} // namespace

// ---------------------------------------------------------------------------
// PathCatalog

PathCatalog::PathCatalog(const Scene &scene, const TraceLimits &limits) : scene_(&scene), limits_(limits)
{
    limits_.validate();
    const auto &faces = scene.faces();
    const auto &wedges = scene.wedges();
    nf_ = static_cast<int>(faces.size());
    nw_ = static_cast<int>(wedges.size());

    std::vector<Polygon> polys;
    polys.reserve(faces.size());
    for (const auto &f : faces)
        polys.push_back(face_polygon(f));

    auto any_front = [](const Plane &pl, const Polygon &pts) {
        return std::any_of(pts.begin(), pts.end(), [&](const Vec3 &p) { return pl.signed_distance(p) > kStrict; });
    };
    auto any_exterior = [](const Wedge &w, const Polygon &pts) {
        return std::any_of(pts.begin(), pts.end(), [&](const Vec3 &p) { return w.in_exterior(p, -kStrict); });
    };

    ff_.assign(static_cast<std::size_t>(nf_) * nf_, 0);
    for (int f = 0; f < nf_; ++f)
        for (int g = 0; g < nf_; ++g)
            if (f != g && any_front(faces[f].plane, polys[g]) && any_front(faces[g].plane, polys[f]))
                ff_[static_cast<std::size_t>(f) * nf_ + g] = 1;

    wf_.assign(static_cast<std::size_t>(nw_) * nf_, 0);
    for (int w = 0; w < nw_; ++w)
    {
        const Polygon ends{wedges[w].a, wedges[w].b};
        for (int f = 0; f < nf_; ++f)
            if (any_front(faces[f].plane, ends) && any_exterior(wedges[w], polys[f]))
                wf_[static_cast<std::size_t>(w) * nf_ + f] = 1;
    }

    ww_.assign(static_cast<std::size_t>(nw_) * nw_, 0);
    for (int w = 0; w < nw_; ++w)
        for (int v = 0; v < nw_; ++v)
            if (w != v && any_exterior(wedges[w], {wedges[v].a, wedges[v].b}) &&
                any_exterior(wedges[v], {wedges[w].a, wedges[w].b}))
                ww_[static_cast<std::size_t>(w) * nw_ + v] = 1;

    core_index_.assign(static_cast<std::size_t>(nw_) * nw_, {});
    if (limits_.max_diffractions >= 1)
        build_cores();
}

const std::vector<int> &PathCatalog::cores_between(int first_wedge, int last_wedge) const
{
    if (core_index_.empty())
        return empty_;
    return core_index_[static_cast<std::size_t>(first_wedge) * nw_ + last_wedge];
}

void PathCatalog::build_cores()
{
    const auto &faces = scene_->faces();
    const auto &wedges = scene_->wedges();
    const int max_d = limits_.max_diffractions;
    const int max_total = limits_.max_rd_total;
    const int max_r = std::min(limits_.max_reflections, max_total - 2);

    // Reflections between two wedges must admit a straight unfolded line.
    auto run_feasible = [&](int w1, const std::vector<int> &run, int w2) {
        Isometry m;
        for (auto it = run.rbegin(); it != run.rend(); ++it)
            m = detail::mirror_after(faces[*it].plane, m);
        const std::vector<Vec3> from{wedges[w1].a, wedges[w1].b};
        const std::vector<Vec3> to{m.apply(wedges[w2].a), m.apply(wedges[w2].b)};
        Isometry prefix;
        for (int f : run)
        {
            Polygon poly = face_polygon(faces[f]);
            for (auto &p : poly)
                p = prefix.apply(p);
            if (!hull_crosses(from, to, poly, prefix.apply_direction(faces[f].normal())))
                return false;
            prefix = detail::mirror_before(prefix, faces[f].plane);
        }
        return true;
    };

    std::vector<Interaction> seq;
    int r = 0, d = 0;
    auto emit = [&]() {
        Core c{seq, r, d};
        const int first = seq.front().element, last = seq.back().element;
        core_index_[static_cast<std::size_t>(first) * nw_ + last].push_back(static_cast<int>(cores_.size()));
        cores_.push_back(std::move(c));
    };

    auto dfs = [&](auto &&self) -> void {
        const Interaction last = seq.back();
        if (last.type == InteractionType::Diffraction)
        {
            emit();
            const int wl = last.element;
            if (d + 1 <= max_d && (r == 0 || r + d + 1 <= max_total))
            {
                for (int w = 0; w < nw_; ++w)
                {
                    if (!wedge_wedge(wl, w))
                        continue;
                    seq.push_back({InteractionType::Diffraction, w});
                    ++d;
                    self(self);
                    --d;
                    seq.pop_back();
                }
            }
            if (d + 1 <= max_d && r + 1 <= max_r && r + d + 2 <= max_total)
            {
                for (int f = 0; f < nf_; ++f)
                {
                    if (!wedge_face(wl, f))
                        continue;
                    seq.push_back({InteractionType::Reflection, f});
                    ++r;
                    self(self);
                    --r;
                    seq.pop_back();
                }
            }
            return;
        }

        const int fl = last.element;
        if (r + 1 <= max_r && r + d + 2 <= max_total)
        {
            for (int g = 0; g < nf_; ++g)
            {
                if (!face_face(fl, g))
                    continue;
                seq.push_back({InteractionType::Reflection, g});
                ++r;
                self(self);
                --r;
                seq.pop_back();
            }
        }
        std::vector<int> run;
        std::size_t k = seq.size();
        while (k > 0 && seq[k - 1].type == InteractionType::Reflection)
            --k;
        const int w1 = seq[k - 1].element;
        for (std::size_t i = k; i < seq.size(); ++i)
            run.push_back(seq[i].element);
        if (d + 1 <= max_d && r + d + 1 <= max_total)
        {
            for (int w = 0; w < nw_; ++w)
            {
                if (!wedge_face(w, fl) || !run_feasible(w1, run, w))
                    continue;
                seq.push_back({InteractionType::Diffraction, w});
                ++d;
                self(self);
                --d;
                seq.pop_back();
            }
        }
    };

    for (int w = 0; w < nw_; ++w)
    {
        seq.assign(1, {InteractionType::Diffraction, w});
        r = 0;
        d = 1;
        dfs(dfs);
    }
}

// ---------------------------------------------------------------------------
// BeamTree

BeamTree::BeamTree(const Scene &scene, const PathCatalog &catalog, const Vec3 &source, int max_depth, double radius)
    : scene_(&scene), radius_(radius)
{
    Node root;
    root.apex = source;
    nodes_.push_back(root);
    const auto &faces = scene.faces();

    auto make_sides = [&](const Vec3 &apex, const Polygon &poly, const Plane &window) {
        std::vector<Plane> sides{window};
        const Vec3 c = centroid(poly);
        for (std::size_t i = 0; i < poly.size(); ++i)
        {
            const Vec3 &a = poly[i];
            const Vec3 &b = poly[(i + 1) % poly.size()];
            const Vec3 e = b - a;
            if (e.norm() < 1e-12)
                continue;
            const Vec3 dir = e.normalized();
            Vec3 n = (a - apex).cross(dir);
            if (n.norm() < 1e-12)
                continue;
            n.normalize();
            if (n.dot(c - a) < 0.0)
                n = -n;
            if (radius > 0.0)
            {
                Vec3 w = (a - apex) - (a - apex).dot(dir) * dir;
                const double dc = w.norm();
                if (radius >= 0.999 * dc)
                    continue;
                w /= dc;
                const double alpha = std::asin(radius / dc);
                Vec3 u = window.normal.cross(dir);
                if (u.dot(c - a) < 0.0)
                    u = -u;
                const double theta = std::atan2(u.dot(n), u.dot(w));
                if (theta + alpha > kPi - 1e-6)
                    continue;
                n = (std::cos(alpha) * n + std::sin(alpha) * w).normalized();
            }
            sides.push_back(Plane{n, n.dot(a)});
        }
        return sides;
    };

    for (std::size_t i = 0; i < nodes_.size(); ++i)
    {
        if (nodes_[i].depth >= max_depth)
            continue;
        const Node parent = nodes_[i];
        for (const auto &f : faces)
        {
            if (parent.face >= 0 && !catalog.face_face(parent.face, f.id))
                continue;
            if (!(f.plane.signed_distance(parent.apex) > (radius > 0.0 ? -radius : kStrict)))
                continue;
            Polygon poly = face_polygon(f);
            for (const auto &side : parent.sides)
            {
                poly = clip_polygon(poly, side, kStrict);
                if (poly.size() < 3)
                    break;
            }
            if (poly.size() < 3 || polygon_area(poly) < 1e-12)
                continue;
            Node child;
            child.parent = static_cast<int>(i);
            child.face = f.id;
            child.depth = parent.depth + 1;
            child.apex = f.plane.mirror(parent.apex);
            child.sides = make_sides(child.apex, poly, f.plane);
            child.aperture = std::move(poly);
            nodes_.push_back(std::move(child));
        }
    }
}

bool BeamTree::contains(int node, const Vec3 &p, double margin) const
{
    for (const auto &side : nodes_[node].sides)
        if (side.signed_distance(p) < -margin)
            return false;
    return true;
}

bool BeamTree::clip_wedge(int node, const Wedge &w, double &t0, double &t1) const
{
    t0 = 0.0;
    t1 = w.length;
    const auto &sides = nodes_[node].sides;
    for (std::size_t k = 0; k < sides.size(); ++k)
    {
        // Points on the reflecting plane itself cannot be reached after the bounce.
        const double lim = k == 0 ? kStrict : -kStrict;
        const double s0 = sides[k].signed_distance(w.a) - lim;
        const double slope = sides[k].normal.dot(w.dir);
        if (std::abs(slope) < 1e-15)
        {
            if (s0 < 0.0)
                return false;
            continue;
        }
        const double root = -s0 / slope;
        if (slope > 0.0)
            t0 = std::max(t0, root);
        else
            t1 = std::min(t1, root);
        if (t0 >= t1)
            return false;
    }
    return t0 < t1;
}

std::vector<int> BeamTree::face_chain(int node) const
{
    std::vector<int> out;
    for (int n = node; n > 0; n = nodes_[n].parent)
        out.push_back(nodes_[n].face);
    std::reverse(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Tracer

namespace
{

int prefix_depth(const TraceLimits &l)
{
    if (l.max_diffractions < 1 || l.max_rd_total < 2)
        return 0;
    return std::min(l.max_reflections, l.max_rd_total - 1);
}

int tx_depth(const TraceLimits &l)
{
    int depth = l.max_reflections;
    depth = std::max(depth, prefix_depth(l));
    return depth;
}

} // namespace

double screen_margin(double radius) { return std::max(1.0, 8.0 * radius); }

Tracer::Tracer(std::shared_ptr<const PathCatalog> catalog, const Vec3 &tx)
    : catalog_(std::move(catalog)), tx_(tx),
      tx_beams_(catalog_->scene(), *catalog_, tx, tx_depth(catalog_->limits()), 0.0)
{
    const auto &wedges = scene().wedges();
    tx_wedges_.assign(wedges.size(), {});
    if (limits().max_diffractions >= 1)
    {
        const int pd = prefix_depth(limits());
        for (int n = 0; n < static_cast<int>(tx_beams_.nodes().size()); ++n)
        {
            const auto &node = tx_beams_.nodes()[n];
            if (node.depth > pd)
                continue;
            for (const auto &w : wedges)
            {
                if (!w.in_exterior(node.apex, -kStrict))
                    continue;
                double t0, t1;
                if (tx_beams_.clip_wedge(n, w, t0, t1))
                    tx_wedges_[w.id].push_back({n, t0, t1});
            }
        }
    }
    build_tile_prefixes();
}

std::optional<PropPath> Tracer::assemble(const std::vector<Interaction> &seq, const std::vector<Vec3> &points,
                                         const Vec3 &rx) const
{
    const Scene &sc = scene();
    PropPath path;
    path.vertices.reserve(points.size() + 2);
    path.vertices.push_back(tx_);
    path.vertices.insert(path.vertices.end(), points.begin(), points.end());
    path.vertices.push_back(rx);
    path.interactions = seq;

    for (std::size_t k = 0; k < seq.size(); ++k)
    {
        if (seq[k].type != InteractionType::Diffraction)
            continue;
        const Wedge &w = sc.wedges()[seq[k].element];
        if (!w.in_exterior(path.vertices[k], 0.0) || !w.in_exterior(path.vertices[k + 2], 0.0))
            return std::nullopt;
    }
    double len = 0.0;
    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k)
    {
        Vec3 a = path.vertices[k], b = path.vertices[k + 1];
        if (k > 0)
            a = lifted_point(sc, seq[k - 1], a);
        if (k < seq.size())
            b = lifted_point(sc, seq[k], b);
        if (sc.occluded(a, b))
            return std::nullopt;
        len += (path.vertices[k + 1] - path.vertices[k]).norm();
    }
    path.total_length = len;
    path.mechanism = classify(seq);
    return path;
}

std::optional<PropPath> Tracer::finish(const std::vector<Interaction> &seq, const Vec3 &rx,
                                       TraceDiagnostics *diag) const
{
    if (diag)
        ++diag->candidates;
    const ChainSolution sol = solve_chain(scene(), tx_, rx, seq);
    if (sol.status == ChainSolution::Status::NotConverged && diag)
        ++diag->fermat_nonconverged;
    if (sol.status != ChainSolution::Status::Ok)
        return std::nullopt;
    return assemble(seq, sol.points, rx);
}

void Tracer::build_tile_prefixes()
{
    const TraceLimits &l = limits();
    if (!l.scattering)
        return;
    const Scene &sc = scene();
    const auto &tiles = sc.tiles();

    auto add = [&](const Tile &tile, std::vector<Interaction> seq, std::vector<Vec3> points) {
        const Plane &pl = sc.faces()[tile.face].plane;
        const Vec3 &last = points.empty() ? tx_ : points.back();
        if (!(pl.signed_distance(last) > 0.0))
            return;
        // Reuse the path assembly checks with the tile center standing in
        // for the receiver, lifted off the wall.
        const Vec3 target = tile.center + kSurfaceLift * tile.normal;
        auto path = assemble(seq, points, target);
        if (!path)
            return;
        TilePrefix tp;
        tp.tile = tile.id;
        Vec3 prev = tx_;
        for (const auto &p : points)
        {
            tp.length += (p - prev).norm();
            prev = p;
        }
        tp.length += (tile.center - prev).norm();
        tp.seq = std::move(seq);
        tp.points = std::move(points);
        tile_prefixes_.push_back(std::move(tp));
    };

    // S
    for (const auto &tile : tiles)
        add(tile, {}, {});

    // RS
    const int rs_depth = std::min(l.max_reflections, l.max_rs_total - 1);
    for (int n = 1; n < static_cast<int>(tx_beams_.nodes().size()); ++n)
    {
        const auto &node = tx_beams_.nodes()[n];
        if (node.depth > rs_depth)
            continue;
        const auto faces = tx_beams_.face_chain(n);
        std::vector<Interaction> seq;
        for (int f : faces)
            seq.push_back({InteractionType::Reflection, f});
        for (const auto &tile : tiles)
        {
            if (tile.face == node.face || !tx_beams_.contains(n, tile.center))
                continue;
            const ChainSolution sol = solve_chain(sc, tx_, tile.center, seq);
            if (sol.status != ChainSolution::Status::Ok)
                continue;
            add(tile, seq, sol.points);
        }
    }

    // DS
    const int ds_d = std::min(l.max_diffractions, l.max_ds_total - 1);
    if (ds_d >= 1)
    {
        for (const auto &core : catalog_->cores())
        {
            if (core.reflections > 0 || core.diffractions > ds_d)
                continue;
            const Wedge &first = sc.wedges()[core.seq.front().element];
            const Wedge &last = sc.wedges()[core.seq.back().element];
            if (!first.in_exterior(tx_, -kStrict))
                continue;
            for (const auto &tile : tiles)
            {
                if (!catalog_->wedge_face(last.id, tile.face) || !last.in_exterior(tile.center, -kStrict))
                    continue;
                const ChainSolution sol = solve_chain(sc, tx_, tile.center, core.seq);
                if (sol.status != ChainSolution::Status::Ok)
                    continue;
                add(tile, core.seq, sol.points);
            }
        }
    }
}

CandidateSet Tracer::candidates(const Vec3 &center, double radius) const
{
    CandidateSet set;
    set.center = center;
    set.radius = radius;
    const TraceLimits &l = limits();
    const Scene &sc = scene();
    const auto &tx_nodes = tx_beams_.nodes();

    for (int n = 1; n < static_cast<int>(tx_nodes.size()); ++n)
        if (tx_nodes[n].depth <= l.max_reflections && tx_beams_.contains(n, center, radius))
            set.reflection_nodes.push_back(n);

    if (l.max_diffractions >= 1)
    {
        const int rd = prefix_depth(l);
        const BeamTree rx_beams(sc, *catalog_, center, rd, radius);
        const auto &rx_nodes = rx_beams.nodes();
        const double ext_margin = radius > 0.0 ? radius : -kStrict;
        std::vector<std::vector<WedgeEntry>> rx_wedges(sc.wedges().size());
        for (int n = 0; n < static_cast<int>(rx_nodes.size()); ++n)
        {
            for (const auto &w : sc.wedges())
            {
                if (!w.in_exterior(rx_nodes[n].apex, ext_margin))
                    continue;
                double t0, t1;
                if (rx_beams.clip_wedge(n, w, t0, t1))
                    rx_wedges[w.id].push_back({n, t0, t1});
            }
        }

        std::vector<std::vector<int>> tx_faces(tx_nodes.size()), rx_faces(rx_nodes.size());
        const double margin = screen_margin(radius);
        std::vector<Interaction> seq;
        const int nw = static_cast<int>(sc.wedges().size());
        for (int w1 = 0; w1 < nw; ++w1)
        {
            for (const auto &p : tx_wedges_[w1])
            {
                if (tx_faces[p.node].empty() && p.node > 0)
                    tx_faces[p.node] = tx_beams_.face_chain(p.node);
                for (int w2 = 0; w2 < nw; ++w2)
                {
                    const auto &list = catalog_->cores_between(w1, w2);
                    if (list.empty() || rx_wedges[w2].empty())
                        continue;
                    for (const auto &q : rx_wedges[w2])
                    {
                        const int pre = tx_nodes[p.node].depth, post = rx_nodes[q.node].depth;
                        for (int ci : list)
                        {
                            const auto &core = catalog_->cores()[ci];
                            const int r = pre + post + core.reflections;
                            const int d = core.diffractions;
                            if (d > l.max_diffractions)
                                continue;
                            if (r > 0 && (r > l.max_reflections || r + d > l.max_rd_total))
                                continue;
                            if (core.seq.size() == 1 && (std::max(p.t0, q.t0) > std::min(p.t1, q.t1)))
                                continue;
                            if (rx_faces[q.node].empty() && q.node > 0)
                                rx_faces[q.node] = rx_beams.face_chain(q.node);
                            seq.clear();
                            for (int f : tx_faces[p.node])
                                seq.push_back({InteractionType::Reflection, f});
                            seq.insert(seq.end(), core.seq.begin(), core.seq.end());
                            for (auto it = rx_faces[q.node].rbegin(); it != rx_faces[q.node].rend(); ++it)
                                seq.push_back({InteractionType::Reflection, *it});
                            if (radius > 0.0)
                            {
                                const ChainSolution sol = solve_chain(sc, tx_, center, seq);
                                if (sol.status == ChainSolution::Status::Geometry || sol.violation > margin)
                                    continue;
                            }
                            set.chains.push_back(seq);
                        }
                    }
                }
            }
        }
    }

    for (int i = 0; i < static_cast<int>(tile_prefixes_.size()); ++i)
    {
        const Plane &pl = sc.faces()[sc.tiles()[tile_prefixes_[i].tile].face].plane;
        if (pl.signed_distance(center) > (radius > 0.0 ? -radius : 0.0))
            set.tile_prefixes.push_back(i);
    }
    return set;
}

std::vector<PropPath> Tracer::evaluate(const CandidateSet &set, const Vec3 &rx, TraceDiagnostics *diag) const
{
    const Scene &sc = scene();
    std::vector<PropPath> out;
    if (auto p = los(rx))
        out.push_back(std::move(*p));

    std::vector<Interaction> seq;
    for (int n : set.reflection_nodes)
    {
        seq.clear();
        for (int f : tx_beams_.face_chain(n))
            seq.push_back({InteractionType::Reflection, f});
        if (auto p = finish(seq, rx, diag))
            out.push_back(std::move(*p));
    }
    for (const auto &chain : set.chains)
        if (auto p = finish(chain, rx, diag))
            out.push_back(std::move(*p));

    for (int i : set.tile_prefixes)
    {
        const TilePrefix &tp = tile_prefixes_[i];
        const Tile &tile = sc.tiles()[tp.tile];
        if (!(sc.faces()[tile.face].plane.signed_distance(rx) > 0.0))
            continue;
        if (sc.occluded(tile.center + kSurfaceLift * tile.normal, rx))
            continue;
        PropPath path;
        path.vertices.reserve(tp.points.size() + 3);
        path.vertices.push_back(tx_);
        path.vertices.insert(path.vertices.end(), tp.points.begin(), tp.points.end());
        path.vertices.push_back(tile.center);
        path.vertices.push_back(rx);
        path.interactions = tp.seq;
        path.interactions.push_back({InteractionType::Scattering, tile.id});
        path.total_length = tp.length + (rx - tile.center).norm();
        path.mechanism = classify(path.interactions);
        out.push_back(std::move(path));
    }

    std::sort(out.begin(), out.end(), path_less);
    if (diag)
        diag->paths += out.size();
    return out;
}

std::vector<PropPath> Tracer::trace(const Vec3 &rx, TraceDiagnostics *diag) const
{
    return evaluate(candidates(rx, 0.0), rx, diag);
}

std::optional<PropPath> Tracer::los(const Vec3 &rx) const { return trace_los(tx_, rx, scene()); }

// ---------------------------------------------------------------------------
// Wrappers

std::optional<PropPath> trace_los(const Vec3 &tx, const Vec3 &rx, const Scene &scene)
{
    if (scene.occluded(tx, rx))
        return std::nullopt;
    PropPath p;
    p.vertices = {tx, rx};
    p.mechanism = Mechanism::L;
    p.total_length = (rx - tx).norm();
    return p;
}

namespace
{

std::vector<PropPath> filtered(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits,
                               std::initializer_list<Mechanism> keep)
{
    auto catalog = std::make_shared<const PathCatalog>(scene, limits);
    const Tracer tracer(catalog, tx);
    auto all = tracer.trace(rx);
    std::vector<PropPath> out;
    for (auto &p : all)
        if (std::find(keep.begin(), keep.end(), p.mechanism) != keep.end())
            out.push_back(std::move(p));
    return out;
}

} // namespace

std::vector<PropPath> trace_reflections(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits)
{
    return filtered(tx, rx, scene, limits, {Mechanism::R});
}

std::vector<PropPath> trace_diffractions(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits)
{
    return filtered(tx, rx, scene, limits, {Mechanism::D});
}

std::vector<PropPath> trace_mixed_rd(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits)
{
    return filtered(tx, rx, scene, limits, {Mechanism::RD});
}

std::vector<PropPath> trace_scattering(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits)
{
    return filtered(tx, rx, scene, limits, {Mechanism::S, Mechanism::RS, Mechanism::DS});
}

} // namespace s2g
