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

#include <Eigen/Dense>

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace s2g
{

const char *to_string(Mechanism m)
{
    switch (m)
    {
    case Mechanism::L:
        return "L";
    case Mechanism::R:
        return "R";
    case Mechanism::D:
        return "D";
    case Mechanism::S:
        return "S";
    case Mechanism::RD:
        return "RD";
    case Mechanism::RS:
        return "RS";
    case Mechanism::DS:
        return "DS";
    }
    return "?";
}

std::optional<Mechanism> mechanism_from_string(const std::string &s)
{
    for (Mechanism m : kMechanisms)
        if (s == to_string(m))
            return m;
    return std::nullopt;
}

std::string to_string(const Interaction &i)
{
    switch (i.type)
    {
    case InteractionType::Reflection:
        return "R:f" + std::to_string(i.element);
    case InteractionType::Diffraction:
        return "D:w" + std::to_string(i.element);
    case InteractionType::Scattering:
        return "S:t" + std::to_string(i.element);
    }
    return "?";
}

std::size_t PropPath::reflections() const
{
    return static_cast<std::size_t>(std::count_if(interactions.begin(), interactions.end(), [](const Interaction &i) {
        return i.type == InteractionType::Reflection;
    }));
}

std::size_t PropPath::diffractions() const
{
    return static_cast<std::size_t>(std::count_if(interactions.begin(), interactions.end(), [](const Interaction &i) {
        return i.type == InteractionType::Diffraction;
    }));
}

Mechanism classify(const std::vector<Interaction> &interactions)
{
    int r = 0, d = 0, s = 0;
    for (std::size_t k = 0; k < interactions.size(); ++k)
    {
        switch (interactions[k].type)
        {
        case InteractionType::Reflection:
            ++r;
            break;
        case InteractionType::Diffraction:
            ++d;
            break;
        case InteractionType::Scattering:
            ++s;
            if (k + 1 != interactions.size())
                throw std::invalid_argument("scattering must be the last interaction");
            break;
        }
    }
    if (s > 1 || (s == 1 && r > 0 && d > 0))
        throw std::invalid_argument("interaction mix outside the mechanism taxonomy");
    if (s == 1)
        return r > 0 ? Mechanism::RS : (d > 0 ? Mechanism::DS : Mechanism::S);
    if (r == 0 && d == 0)
        return Mechanism::L;
    if (d == 0)
        return Mechanism::R;
    if (r == 0)
        return Mechanism::D;
    return Mechanism::RD;
}

bool path_less(const PropPath &a, const PropPath &b)
{
    if (a.mechanism != b.mechanism)
        return a.mechanism < b.mechanism;
    if (a.total_length != b.total_length)
        return a.total_length < b.total_length;
    return a.interactions < b.interactions;
}

void TraceLimits::validate() const
{
    auto check = [](int v, const char *name) {
        if (v < 0)
            throw std::invalid_argument(std::string("limits.") + name + ": must be >= 0");
    };
    check(max_reflections, "max_reflections");
    check(max_diffractions, "max_diffractions");
    check(max_rd_total, "max_rd_total");
    check(max_rs_total, "max_rs_total");
    check(max_ds_total, "max_ds_total");
}

Vec3 lifted_point(const Scene &scene, const Interaction &i, const Vec3 &p)
{
    switch (i.type)
    {
    case InteractionType::Reflection:
        return p + kSurfaceLift * scene.faces()[i.element].normal();
    case InteractionType::Diffraction:
        return p + kSurfaceLift * scene.wedges()[i.element].bisector;
    case InteractionType::Scattering:
        return p + kSurfaceLift * scene.tiles()[i.element].normal;
    }
    return p;
}

// ---------------------------------------------------------------------------
// Chain solver

namespace
{

using detail::Isometry;
using detail::mirror_after;

struct Anchor
{
    Vec3 base = Vec3::Zero();
    Vec3 dir = Vec3::Zero();
    int var = -1; // index into the parameter vector, -1 when fixed
    int wedge = -1;

    Vec3 at(const Eigen::VectorXd &t) const { return var < 0 ? base : Vec3(base + t[var] * dir); }
};

struct Leg
{
    std::vector<int> faces; // in travel order
    Isometry unfold;        // maps the far anchor into the near anchor's frame
};

constexpr int kMaxIterations = 200;
constexpr double kStepTolerance = 1e-10;
constexpr double kEdgeTolerance = 1e-7;

double chain_length(const std::vector<Anchor> &anchors, const std::vector<Leg> &legs, const Eigen::VectorXd &t)
{
    double len = 0.0;
    for (std::size_t i = 0; i < legs.size(); ++i)
        len += (anchors[i].at(t) - legs[i].unfold.apply(anchors[i + 1].at(t))).norm();
    return len;
}

} // namespace

ChainSolution solve_chain(const Scene &scene, const Vec3 &from, const Vec3 &to, const std::vector<Interaction> &chain)
{
    ChainSolution sol;
    sol.status = ChainSolution::Status::Ok;
    std::vector<Anchor> anchors;
    std::vector<Leg> legs(1);
    anchors.push_back(Anchor{from});
    int nvar = 0;
    for (const auto &it : chain)
    {
        if (it.type == InteractionType::Reflection)
        {
            legs.back().faces.push_back(it.element);
        }
        else if (it.type == InteractionType::Diffraction)
        {
            const Wedge &w = scene.wedges()[it.element];
            anchors.push_back(Anchor{w.a, w.dir, nvar++, w.id});
            legs.emplace_back();
        }
        else
        {
            throw std::invalid_argument("solve_chain: scattering is not a chain interaction");
        }
    }
    anchors.push_back(Anchor{to});

    for (auto &leg : legs)
    {
        Isometry m;
        for (auto it = leg.faces.rbegin(); it != leg.faces.rend(); ++it)
            m = mirror_after(scene.faces()[*it].plane, m);
        leg.unfold = m;
    }

    Eigen::VectorXd t(nvar);
    for (const auto &a : anchors)
        if (a.var >= 0)
            t[a.var] = 0.5 * scene.wedges()[a.wedge].length;

    if (nvar > 0)
    {
        bool converged = false;
        double f = chain_length(anchors, legs, t);
        for (int iter = 0; iter < kMaxIterations; ++iter)
        {
            sol.iterations = iter + 1;
            Eigen::VectorXd g = Eigen::VectorXd::Zero(nvar);
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nvar, nvar);
            bool degenerate = false;
            for (std::size_t i = 0; i < legs.size(); ++i)
            {
                const Anchor &na = anchors[i], &fa = anchors[i + 1];
                const Vec3 d = na.at(t) - legs[i].unfold.apply(fa.at(t));
                const double len = d.norm();
                if (len < 1e-12)
                {
                    degenerate = true;
                    break;
                }
                const Vec3 u = d / len;
                const Eigen::Matrix3d proj = (Eigen::Matrix3d::Identity() - u * u.transpose()) / len;
                Vec3 cols[2];
                int idx[2];
                int nc = 0;
                if (na.var >= 0)
                {
                    cols[nc] = na.dir;
                    idx[nc++] = na.var;
                }
                if (fa.var >= 0)
                {
                    cols[nc] = -(legs[i].unfold.rot * fa.dir);
                    idx[nc++] = fa.var;
                }
                for (int p = 0; p < nc; ++p)
                {
                    g[idx[p]] += cols[p].dot(u);
                    for (int q = 0; q < nc; ++q)
                        h(idx[p], idx[q]) += cols[p].dot(proj * cols[q]);
                }
            }
            if (degenerate)
            {
                sol.status = ChainSolution::Status::Geometry;
                sol.violation = std::numeric_limits<double>::infinity();
                return sol;
            }
            const double damping = 1e-12 * (h.trace() + 1.0);
            h += damping * Eigen::MatrixXd::Identity(nvar, nvar);
            Eigen::VectorXd step = -h.ldlt().solve(g);
            if (!step.allFinite())
                step = -g;

            double scale = 1.0;
            Eigen::VectorXd trial = t + step;
            double ft = chain_length(anchors, legs, trial);
            for (int k = 0; k < 40 && !(ft <= f); ++k)
            {
                scale *= 0.5;
                trial = t + scale * step;
                ft = chain_length(anchors, legs, trial);
            }
            const double moved = (scale * step).cwiseAbs().maxCoeff();
            t = trial;
            f = ft;
            if (moved < kStepTolerance)
            {
                converged = true;
                break;
            }
            if (t.cwiseAbs().maxCoeff() > 1e7)
                break;
        }
        for (const auto &a : anchors)
        {
            if (a.var < 0)
                continue;
            const double len = scene.wedges()[a.wedge].length;
            const double excess = std::max(-t[a.var], t[a.var] - len);
            if (excess > kEdgeTolerance)
            {
                sol.status = ChainSolution::Status::OffEdge;
                sol.violation = std::max(sol.violation, excess);
            }
        }
        if (!converged && sol.status == ChainSolution::Status::Ok)
            sol.status = ChainSolution::Status::NotConverged;
    }

    // Rebuild interaction points leg by leg.
    for (std::size_t i = 0; i < legs.size(); ++i)
    {
        Vec3 current = anchors[i].at(t);
        if (anchors[i].var >= 0)
        {
            const double len = scene.wedges()[anchors[i].wedge].length;
            t[anchors[i].var] = std::clamp(t[anchors[i].var], 0.0, len);
            current = anchors[i].at(t);
            sol.points.push_back(current);
        }
        const Vec3 target = anchors[i + 1].at(t);
        const auto &faces = legs[i].faces;
        // images[k] = image of target through faces[k..end)
        std::vector<Vec3> images(faces.size() + 1);
        images[faces.size()] = target;
        for (std::size_t k = faces.size(); k-- > 0;)
            images[k] = scene.faces()[faces[k]].plane.mirror(images[k + 1]);
        for (std::size_t k = 0; k < faces.size(); ++k)
        {
            const Face &face = scene.faces()[faces[k]];
            const double sc = face.plane.signed_distance(current);
            const double st = face.plane.signed_distance(images[k]);
            if (!(sc > 1e-9 && st < -1e-9))
            {
                sol.status = ChainSolution::Status::Geometry;
                sol.violation = std::numeric_limits<double>::infinity();
                return sol;
            }
            const Vec3 p = current + (sc / (sc - st)) * (images[k] - current);
            if (!face.contains(p, 1e-7))
            {
                const double u = face.u_of(p), v = face.v_of(p);
                const double excess = std::max({-u, u - face.u_len, -v, v - face.v_len});
                if (sol.status == ChainSolution::Status::Ok)
                    sol.status = ChainSolution::Status::OffFace;
                sol.violation = std::max(sol.violation, excess);
            }
            sol.points.push_back(p);
            current = p;
        }
    }
    return sol;
}

// ---------------------------------------------------------------------------
// Independent re-validation

std::string check_path(const Scene &scene, const PropPath &path)
{
    std::ostringstream err;
    if (path.vertices.size() != path.interactions.size() + 2)
        return "vertex count does not match interaction count";
    try
    {
        if (classify(path.interactions) != path.mechanism)
            return "mechanism class inconsistent with interactions";
    }
    catch (const std::exception &e)
    {
        return e.what();
    }

    double len = 0.0;
    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k)
        len += (path.vertices[k + 1] - path.vertices[k]).norm();
    if (std::abs(len - path.total_length) > 1e-6)
        return "total length mismatch";

    for (std::size_t k = 0; k < path.interactions.size(); ++k)
    {
        const Interaction &it = path.interactions[k];
        const Vec3 &prev = path.vertices[k];
        const Vec3 &p = path.vertices[k + 1];
        const Vec3 &next = path.vertices[k + 2];
        const Vec3 din = (p - prev).normalized();
        const Vec3 dout = (next - p).normalized();
        if (it.type == InteractionType::Reflection)
        {
            const Face &f = scene.faces()[it.element];
            if (std::abs(f.plane.signed_distance(p)) > 1e-6 || !f.contains(p, 1e-6))
                return "reflection point off its face";
            if (f.plane.signed_distance(prev) <= 0.0 || f.plane.signed_distance(next) <= 0.0)
                return "reflection from the back side";
            const Vec3 mirrored = f.plane.mirror_direction(din);
            const double ang = std::acos(std::clamp(mirrored.dot(dout), -1.0, 1.0));
            if (ang > 1e-6)
                return "specular law violated";
        }
        else if (it.type == InteractionType::Diffraction)
        {
            const Wedge &w = scene.wedges()[it.element];
            const double t = (p - w.a).dot(w.dir);
            const Vec3 foot = w.a + t * w.dir;
            if ((p - foot).norm() > 1e-6 || t < -1e-6 || t > w.length + 1e-6)
                return "diffraction point off its edge";
            const double bin = std::acos(std::clamp(din.dot(w.dir), -1.0, 1.0));
            const double bout = std::acos(std::clamp(dout.dot(w.dir), -1.0, 1.0));
            if (std::abs(bin - bout) > 1e-4)
                return "Keller cone violated";
        }
        else
        {
            const Tile &tile = scene.tiles()[it.element];
            if ((p - tile.center).norm() > 1e-9)
                return "scattering point is not the tile center";
            const Plane &pl = scene.faces()[tile.face].plane;
            if (pl.signed_distance(prev) <= 0.0 || pl.signed_distance(next) <= 0.0)
                return "scattering from the back side";
        }
    }

    for (std::size_t k = 0; k + 1 < path.vertices.size(); ++k)
    {
        Vec3 a = path.vertices[k], b = path.vertices[k + 1];
        if (k > 0)
            a = lifted_point(scene, path.interactions[k - 1], a);
        if (k < path.interactions.size())
            b = lifted_point(scene, path.interactions[k], b);
        if (scene.occluded(a, b))
        {
            err << "segment " << k << " occluded";
            return err.str();
        }
    }
    return {};
}

} // namespace s2g
