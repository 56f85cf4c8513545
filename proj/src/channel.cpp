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

#include "s2g/channel.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace s2g
{

namespace
{

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t mechanism_index(Mechanism m) { return static_cast<std::size_t>(m); }

} // namespace

// ---------------------------------------------------------------------------
// Breakdown

MechanismBreakdown mechanism_breakdown(const std::vector<RayContribution> &contributions)
{
    MechanismBreakdown out;
    std::array<std::vector<double>, 7> per;
    for (const auto &c : contributions)
        per[mechanism_index(c.mechanism)].push_back(std::abs(c.power));
    for (std::size_t m = 0; m < per.size(); ++m)
    {
        std::sort(per[m].begin(), per[m].end());
        out.power[m] = std::accumulate(per[m].begin(), per[m].end(), 0.0);
    }
    out.total = std::accumulate(out.power.begin(), out.power.end(), 0.0);
    out.defined = out.total > 0.0;
    for (std::size_t m = 0; m < per.size(); ++m)
        out.fraction[m] = out.defined ? out.power[m] / out.total : kNaN;
    return out;
}

// ---------------------------------------------------------------------------
// Envelope grid

void GridConfig::validate() const
{
    if (size < 1)
        throw std::invalid_argument("grid.size: must be >= 1");
    if (!(spacing_wavelengths > 0.0) || !std::isfinite(spacing_wavelengths))
        throw std::invalid_argument("grid.spacing_wavelengths: must be > 0");
}

Vec3 EnvelopeGrid::point(int ix, int iy) const
{
    const double half = 0.5 * (size - 1);
    return center + Vec3((ix - half) * spacing, (iy - half) * spacing, 0.0);
}

std::vector<Vec3> grid_points(const Vec3 &center, int size, double spacing)
{
    EnvelopeGrid g;
    g.size = size;
    g.center = center;
    g.spacing = spacing;
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(size) * size);
    for (int iy = 0; iy < size; ++iy)
        for (int ix = 0; ix < size; ++ix)
            out.push_back(g.point(ix, iy));
    return out;
}

namespace
{

double grid_radius(int size, double spacing) { return std::sqrt(2.0) * 0.5 * (size - 1) * spacing; }

cdouble coherent_sum(const std::vector<RayContribution> &contribs)
{
    cdouble sum = 0.0;
    for (const auto &c : contribs)
        sum += c.e_v;
    return sum;
}

std::vector<RayContribution> fields_of(const std::vector<PropPath> &paths, const Scene &scene,
                                       const FieldContext &ctx)
{
    std::vector<RayContribution> out;
    out.reserve(paths.size());
    for (const auto &p : paths)
        out.push_back(path_field(p, scene, ctx));
    return out;
}

} // namespace

EnvelopeGrid sample_envelope_grid(const Tracer &tracer, const Vec3 &center, const GridConfig &grid,
                                  const FieldContext &ctx, TraceDiagnostics *diag)
{
    grid.validate();
    const Scene &scene = tracer.scene();
    EnvelopeGrid out;
    out.size = grid.size;
    out.center = center;
    out.spacing = grid.spacing_wavelengths * ctx.wavelength();
    const auto pts = grid_points(center, out.size, out.spacing);
    for (std::size_t i = 0; i < pts.size(); ++i)
    {
        if (auto b = scene.building_containing(pts[i]); b || pts[i].z() <= 0.0)
        {
            std::ostringstream msg;
            msg << "grid point " << i << " (" << pts[i].x() << ", " << pts[i].y() << ", " << pts[i].z()
                << ") lies inside " << (b ? "building " + std::to_string(*b) : std::string("the ground"));
            throw std::invalid_argument(msg.str());
        }
    }
    const CandidateSet set = tracer.candidates(center, grid_radius(out.size, out.spacing));
    out.envelope.reserve(pts.size());
    for (const auto &p : pts)
    {
        const auto paths = tracer.evaluate(set, p, diag);
        out.envelope.push_back(std::abs(coherent_sum(fields_of(paths, scene, ctx))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rice fit

namespace
{

double log_i0(double z)
{
    if (z < 500.0)
        return std::log(std::cyl_bessel_i(0.0, z));
    return z - 0.5 * std::log(2.0 * kPi * z) + std::log1p(1.0 / (8.0 * z) + 9.0 / (128.0 * z * z));
}

} // namespace

double rice_loglik(const std::vector<double> &samples, double nu, double sigma)
{
    const double s2 = sigma * sigma;
    double sum = 0.0;
    for (double r : samples)
        sum += -std::log(s2) - (r * r + nu * nu) / (2.0 * s2) + log_i0(r * nu / s2);
    return sum;
}

KFactorEstimate rice_fit(const std::vector<double> &samples)
{
    if (samples.size() < 2)
        throw std::invalid_argument("rice_fit: at least two samples are required");
    for (double r : samples)
        if (!(r >= 0.0) || !std::isfinite(r))
            throw std::invalid_argument("rice_fit: samples must be finite and non-negative");

    KFactorEstimate out;
    out.n_samples = static_cast<int>(samples.size());
    const double n = static_cast<double>(samples.size());
    double p = 0.0;
    for (double r : samples)
        p += r * r;
    p /= n;
    const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
    if (p == 0.0 || (*hi - *lo) <= 1e-12 * *hi)
    {
        out.nu = std::sqrt(p);
        out.sigma = 0.0;
        out.k_linear = std::numeric_limits<double>::infinity();
        out.k_db = kKFactorCapDb;
        out.converged = false;
        return out;
    }

    // Work on samples scaled to unit mean power.
    const double scale = std::sqrt(p);
    std::vector<double> x(samples.size());
    std::transform(samples.begin(), samples.end(), x.begin(), [scale](double r) { return r / scale; });
    double v = 0.0;
    for (double xi : x)
        v += (xi * xi - 1.0) * (xi * xi - 1.0);
    v /= n;

    const double k_max = std::pow(10.0, kKFactorCapDb / 10.0);
    const double nu_max = std::sqrt(k_max / (1.0 + k_max));
    auto neg_profile = [&](double nu) {
        const double s2 = 0.5 * (1.0 - nu * nu);
        return -rice_loglik(x, nu, std::sqrt(s2));
    };

    // Moment start, then a coarse scan to bracket the global maximum.
    const double disc = 1.0 - v;
    const double s2_init = disc > 0.0 ? 0.5 * (1.0 - std::sqrt(disc)) : 0.5;
    const double nu_init = std::sqrt(std::max(0.0, 1.0 - 2.0 * s2_init));
    constexpr int kScan = 200;
    std::vector<double> nodes(kScan + 1);
    for (int i = 0; i <= kScan; ++i)
        nodes[i] = nu_max * i / kScan;
    double best_nu = std::min(nu_init, nu_max);
    double best_f = neg_profile(best_nu);
    std::size_t best_i = 0;
    bool from_scan = false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
    {
        const double f = neg_profile(nodes[i]);
        if (f < best_f)
        {
            best_f = f;
            best_nu = nodes[i];
            best_i = i;
            from_scan = true;
        }
    }
    double a, b;
    if (from_scan)
    {
        a = nodes[best_i == 0 ? 0 : best_i - 1];
        b = nodes[std::min(best_i + 1, nodes.size() - 1)];
    }
    else
    {
        const double step = nu_max / kScan;
        a = std::max(0.0, best_nu - step);
        b = std::min(nu_max, best_nu + step);
    }

    std::uintmax_t iters = 200;
    const auto [nu_hat, f_hat] =
        boost::math::tools::brent_find_minima(neg_profile, a, b, std::numeric_limits<double>::digits / 2, iters);
    double nu = nu_hat;
    if (f_hat > best_f)
        nu = best_nu;
    out.converged = iters < 200;

    const double s2 = 0.5 * (1.0 - nu * nu);
    out.nu = nu * scale;
    out.sigma = std::sqrt(s2) * scale;
    out.k_linear = nu * nu / (2.0 * s2);
    out.k_db = out.k_linear > 0.0 ? 10.0 * std::log10(out.k_linear) : -kKFactorCapDb;
    out.k_db = std::clamp(out.k_db, -kKFactorCapDb, kKFactorCapDb);
    return out;
}

// ---------------------------------------------------------------------------
// Sweep

bool SweepResult::any_failed() const
{
    return std::any_of(rows.begin(), rows.end(), [](const CellResult &r) { return !r.ok; });
}

std::vector<SweepCell> sweep_cells(const SweepSpec &spec)
{
    std::vector<SweepCell> out;
    for (double el : spec.elevations)
        for (double az : spec.azimuths)
            for (std::size_t r = 0; r < spec.receivers.size(); ++r)
            {
                SweepCell c;
                c.index = out.size();
                c.elevation = el;
                c.azimuth = az;
                c.rx_index = r;
                c.rx = spec.receivers[r];
                out.push_back(c);
            }
    return out;
}

namespace
{

FieldContext field_context(const Scene &scene, const SweepCell &cell)
{
    FieldContext f;
    f.frequency = scene.config().frequency;
    f.material = scene.material();
    f.tx_pol_ref = satellite_pol_ref(cell.elevation, cell.azimuth);
    return f;
}

} // namespace

CellTrace trace_cell(const SweepContext &ctx, const SweepCell &cell)
{
    const Vec3 tx = satellite_position(cell.elevation, cell.azimuth, ctx.spec.slant_range, cell.rx.position);
    const Tracer tracer(ctx.catalog, tx);
    CellTrace out;
    out.paths = tracer.trace(cell.rx.position);
    out.contributions = fields_of(out.paths, *ctx.scene, field_context(*ctx.scene, cell));
    return out;
}

CellResult run_cell(const SweepContext &ctx, const SweepCell &cell)
{
    CellResult res;
    res.cell = cell;
    try
    {
        const Scene &scene = *ctx.scene;
        const GridConfig &grid = ctx.spec.grid;
        grid.validate();
        const Vec3 &center = cell.rx.position;
        const Vec3 tx = satellite_position(cell.elevation, cell.azimuth, ctx.spec.slant_range, center);
        const Tracer tracer(ctx.catalog, tx);
        const FieldContext fctx = field_context(scene, cell);

        EnvelopeGrid env;
        env.size = grid.size;
        env.center = center;
        env.spacing = grid.spacing_wavelengths * fctx.wavelength();
        const auto pts = grid_points(center, env.size, env.spacing);
        for (std::size_t i = 0; i < pts.size(); ++i)
            if (scene.building_containing(pts[i]) || pts[i].z() <= 0.0)
                throw std::invalid_argument("grid point " + std::to_string(i) + " lies inside a building or the ground");

        const CandidateSet set = tracer.candidates(center, grid_radius(env.size, env.spacing));
        res.los = tracer.los(center).has_value();
        const bool odd = env.size % 2 == 1;
        const std::size_t mid = pts.size() / 2;
        for (std::size_t i = 0; i < pts.size(); ++i)
        {
            const auto paths = tracer.evaluate(set, pts[i], &res.diag);
            const auto contribs = fields_of(paths, scene, fctx);
            env.envelope.push_back(std::abs(coherent_sum(contribs)));
            const bool los_here = !paths.empty() && paths.front().mechanism == Mechanism::L;
            if (los_here != res.los)
                ++res.mixed_visibility;
            if (odd && i == mid)
                res.breakdown = mechanism_breakdown(contribs);
        }
        if (!odd)
        {
            const auto paths = tracer.evaluate(set, center, &res.diag);
            res.breakdown = mechanism_breakdown(fields_of(paths, scene, fctx));
        }
        if (env.envelope.size() >= 2)
            res.k = rice_fit(env.envelope);
        else
            throw std::invalid_argument("grid.size: a Rice fit needs at least two samples");
        res.k.los = res.los;
        res.ok = true;
    }
    catch (const std::exception &e)
    {
        res.ok = false;
        res.error = e.what();
    }
    return res;
}

std::vector<AggregateRow> aggregate(const std::vector<CellResult> &rows, const std::vector<double> &elevations)
{
    std::vector<AggregateRow> out;
    for (double el : elevations)
    {
        for (const char *subset : {"los", "all"})
        {
            const bool los_only = std::string(subset) == "los";
            std::vector<double> ks;
            for (const auto &r : rows)
                if (r.ok && r.cell.elevation == el && (!los_only || r.los))
                    ks.push_back(r.k.k_db);
            AggregateRow a;
            a.elevation = el;
            a.subset = subset;
            a.n_cells = ks.size();
            if (ks.empty())
            {
                a.mean_k_db = kNaN;
                a.std_k_db = kNaN;
            }
            else
            {
                double mean = 0.0;
                for (double k : ks)
                    mean += k;
                mean /= static_cast<double>(ks.size());
                double var = 0.0;
                for (double k : ks)
                    var += (k - mean) * (k - mean);
                var /= static_cast<double>(ks.size());
                a.mean_k_db = mean;
                a.std_k_db = std::sqrt(var);
            }
            out.push_back(a);
        }
    }
    return out;
}

SweepResult run_sweep(const SweepContext &ctx, int workers, const std::vector<CellResult> &done,
                      const std::function<void(const CellResult &)> &on_done)
{
    const auto cells = sweep_cells(ctx.spec);
    std::vector<CellResult> rows(cells.size());
    std::vector<char> have(cells.size(), 0);
    for (const auto &d : done)
    {
        if (d.cell.index < cells.size())
        {
            rows[d.cell.index] = d;
            have[d.cell.index] = 1;
        }
    }
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (!have[i])
            todo.push_back(i);

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    auto work = [&]() {
        while (true)
        {
            const std::size_t k = next.fetch_add(1);
            if (k >= todo.size())
                return;
            CellResult r = run_cell(ctx, cells[todo[k]]);
            std::lock_guard<std::mutex> lock(mu);
            rows[todo[k]] = r;
            if (on_done)
                on_done(rows[todo[k]]);
        }
    };
    const int n = std::max(1, std::min<int>(workers, static_cast<int>(std::max<std::size_t>(todo.size(), 1))));
    if (n == 1)
    {
        work();
    }
    else
    {
        std::vector<std::thread> pool;
        for (int i = 0; i < n; ++i)
            pool.emplace_back(work);
        for (auto &t : pool)
            t.join();
    }

    SweepResult out;
    out.rows = std::move(rows);
    out.aggregates = aggregate(out.rows, ctx.spec.elevations);
    return out;
}

} // namespace s2g
