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

#include <array>
#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace s2g
{

/// Mechanism classes used for power bookkeeping.
enum class Mechanism
{
    L,
    R,
    D,
    S,
    RD,
    RS,
    DS
};

inline constexpr std::array<Mechanism, 7> kMechanisms = {Mechanism::L,  Mechanism::R,  Mechanism::D, Mechanism::S,
                                                          Mechanism::RD, Mechanism::RS, Mechanism::DS};

const char *to_string(Mechanism m);
std::optional<Mechanism> mechanism_from_string(const std::string &s);

enum class InteractionType
{
    Reflection,
    Diffraction,
    Scattering
};

/// One interaction: a face for reflections, a wedge for diffractions, a tile
/// for scattering.
struct Interaction
{
    InteractionType type = InteractionType::Reflection;
    int element = -1;

    auto operator<=>(const Interaction &) const = default;
};

std::string to_string(const Interaction &i);

struct PropPath
{
    std::vector<Vec3> vertices; // tx, interaction points..., rx
    std::vector<Interaction> interactions;
    Mechanism mechanism = Mechanism::L;
    double total_length = 0.0;

    std::size_t reflections() const;
    std::size_t diffractions() const;
};

/// Class implied by an interaction list; throws std::invalid_argument for
/// combinations outside the taxonomy.
Mechanism classify(const std::vector<Interaction> &interactions);

/// Canonical ordering: mechanism, then length, then interaction sequence.
bool path_less(const PropPath &a, const PropPath &b);

struct TraceLimits
{
    int max_reflections = 4;
    int max_diffractions = 3;
    int max_rd_total = 4;
    int max_rs_total = 2;
    int max_ds_total = 2;
    bool scattering = true;

    void validate() const;
};

struct TraceDiagnostics
{
    std::size_t candidates = 0;         // sequences handed to the geometric solver
    std::size_t fermat_nonconverged = 0;
    std::size_t paths = 0;
};

/// Shortest polyline through a chain of reflections and diffractions
/// between two fixed endpoints. Reflections are unfolded with images;
/// diffraction points minimise total length along their edge lines.
struct ChainSolution
{
    enum class Status
    {
        Ok,
        OffEdge,        // a diffraction point left its edge segment
        OffFace,        // a reflection point left its face
        Geometry,       // degenerate or back-facing configuration
        NotConverged
    };
    Status status = Status::Geometry;
    std::vector<Vec3> points; // interaction points only
    int iterations = 0;
    double violation = 0.0;   // largest distance by which a point left its edge or face
};

ChainSolution solve_chain(const Scene &scene, const Vec3 &from, const Vec3 &to,
                          const std::vector<Interaction> &chain);

/// Lifted copy of an interaction point used for occlusion tests.
Vec3 lifted_point(const Scene &scene, const Interaction &i, const Vec3 &p);

/// Independent geometric re-check of a path: specular law at reflections,
/// on-edge and Keller cone at diffractions, outward side at tiles and all
/// segments unoccluded. Returns an empty string when valid, otherwise the
/// first violation.
std::string check_path(const Scene &scene, const PropPath &path);

/// Precomputed, transmitter-independent enumeration data for one scene and
/// set of limits. Immutable and shareable between threads.
class PathCatalog
{
  public:
    PathCatalog(const Scene &scene, const TraceLimits &limits);

    const Scene &scene() const { return *scene_; }
    const TraceLimits &limits() const { return limits_; }

    struct Core
    {
        std::vector<Interaction> seq; // starts and ends with a diffraction
        int reflections = 0;
        int diffractions = 0;
    };

    /// Cores indexed by (first wedge, last wedge).
    const std::vector<int> &cores_between(int first_wedge, int last_wedge) const;
    const std::vector<Core> &cores() const { return cores_; }

    bool face_face(int f, int g) const { return ff_[static_cast<std::size_t>(f) * nf_ + g]; }
    bool wedge_face(int w, int f) const { return wf_[static_cast<std::size_t>(w) * nf_ + f]; }
    bool wedge_wedge(int w, int v) const { return ww_[static_cast<std::size_t>(w) * nw_ + v]; }

  private:
    void build_cores();

    const Scene *scene_;
    TraceLimits limits_;
    int nf_ = 0, nw_ = 0;
    std::vector<char> ff_, wf_, ww_;
    std::vector<Core> cores_;
    std::vector<std::vector<int>> core_index_;
    std::vector<int> empty_;
};

/// Image-method beam tree rooted at a point source.
class BeamTree
{
  public:
    struct Node
    {
        int parent = -1;
        int face = -1;
        int depth = 0;
        Vec3 apex = Vec3::Zero();
        std::vector<Vec3> aperture;
        std::vector<Plane> sides; // sides[0] is the face plane; inside: signed distance >= 0
    };

    /// With a positive `radius` every beam covers all sources within that
    /// distance of `source`.
    BeamTree(const Scene &scene, const PathCatalog &catalog, const Vec3 &source, int max_depth, double radius = 0.0);

    const std::vector<Node> &nodes() const { return nodes_; }
    bool contains(int node, const Vec3 &p, double margin = 0.0) const;

    /// Sub-interval [t0, t1] of wedge w inside the beam of `node`.
    bool clip_wedge(int node, const Wedge &w, double &t0, double &t1) const;

    /// Faces from the root to `node`, in source-to-node order.
    std::vector<int> face_chain(int node) const;

  private:
    const Scene *scene_;
    double radius_ = 0.0;
    std::vector<Node> nodes_;
};

/// Sequences worth solving for receivers inside a ball.
struct CandidateSet
{
    Vec3 center = Vec3::Zero();
    double radius = 0.0;
    std::vector<int> reflection_nodes;             // transmitter beam nodes (class R)
    std::vector<std::vector<Interaction>> chains;  // classes D and RD
    std::vector<int> tile_prefixes;                // indices into the tracer's tile prefixes
};

/// All transmitter-side work for one transmitter position; rx queries are
/// const and thread-safe.
class Tracer
{
  public:
    Tracer(std::shared_ptr<const PathCatalog> catalog, const Vec3 &tx);

    const Vec3 &tx() const { return tx_; }
    const Scene &scene() const { return catalog_->scene(); }
    const TraceLimits &limits() const { return catalog_->limits(); }

    /// Candidates for any receiver within `radius` of `center`. With a
    /// positive radius, chains are screened by solving them once at the
    /// center and keeping those within kScreenMargin of validity.
    CandidateSet candidates(const Vec3 &center, double radius) const;

    /// Valid paths for one receiver drawn from a candidate set, canonically ordered.
    std::vector<PropPath> evaluate(const CandidateSet &set, const Vec3 &rx, TraceDiagnostics *diag = nullptr) const;

    /// Every class for a single receiver, canonically ordered.
    std::vector<PropPath> trace(const Vec3 &rx, TraceDiagnostics *diag = nullptr) const;

    std::optional<PropPath> los(const Vec3 &rx) const;

    struct TilePrefix
    {
        int tile = -1;
        std::vector<Interaction> seq; // interactions before the tile
        std::vector<Vec3> points;     // their points
        double length = 0.0;          // tx to tile center
    };
    const std::vector<TilePrefix> &tile_prefixes() const { return tile_prefixes_; }

  private:
    struct WedgeEntry
    {
        int node;
        double t0, t1;
    };

    std::optional<PropPath> finish(const std::vector<Interaction> &seq, const Vec3 &rx, TraceDiagnostics *diag) const;
    std::optional<PropPath> assemble(const std::vector<Interaction> &seq, const std::vector<Vec3> &points,
                                     const Vec3 &rx) const;
    void build_tile_prefixes();

    std::shared_ptr<const PathCatalog> catalog_;
    Vec3 tx_;
    BeamTree tx_beams_;
    std::vector<std::vector<WedgeEntry>> tx_wedges_; // per wedge: beam nodes reaching it
    std::vector<TilePrefix> tile_prefixes_;
};

/// Distance margin used when screening chains for a receiver region.
double screen_margin(double radius);

// Convenience wrappers building a throw-away catalog.
std::optional<PropPath> trace_los(const Vec3 &tx, const Vec3 &rx, const Scene &scene);
std::vector<PropPath> trace_reflections(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits);
std::vector<PropPath> trace_diffractions(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits);
std::vector<PropPath> trace_mixed_rd(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits);
std::vector<PropPath> trace_scattering(const Vec3 &tx, const Vec3 &rx, const Scene &scene, const TraceLimits &limits);

} // namespace s2g
