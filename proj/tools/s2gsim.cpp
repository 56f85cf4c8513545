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
#include "s2g/config.hpp"
#include "s2g/io.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

namespace fs = std::filesystem;
using namespace s2g;

namespace
{

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitPartial = 2;

struct Common
{
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

RunConfig load(const Common &c)
{
    RunConfig cfg = c.config_path.empty() ? config_from_text("{}", c.overrides) : load_config(c.config_path, c.overrides);
    if (!c.output_dir.empty())
        cfg.output_dir = c.output_dir;
    return cfg;
}

void add_common(CLI::App *cmd, Common &c, bool with_output = true)
{
    cmd->add_option("-c,--config", c.config_path, "JSON run configuration (defaults when omitted)");
    cmd->add_option("--set", c.overrides, "Override a field, e.g. --set limits.max_diffractions=2")
        ->take_all()
        ->allow_extra_args(false);
    if (with_output)
        cmd->add_option("-o,--output-dir", c.output_dir, "Output directory (overrides config and S2G_OUTPUT_DIR)");
}

std::string text_of(const std::function<void(std::ostream &)> &writer)
{
    std::ostringstream os;
    writer(os);
    return os.str();
}

std::string cell_tag(double el, double az, const std::string &rx)
{
    return "el" + format_double(el) + "_az" + format_double(az) + "_" + rx;
}

struct Link
{
    double elevation = 0.0;
    double azimuth = 0.0;
    std::string rx_id;
    std::vector<double> position;
};

void add_link(CLI::App *cmd, Link &l)
{
    cmd->add_option("--el,--elevation", l.elevation, "Satellite elevation in degrees")->required()->check(CLI::Range(0.0, 90.0));
    cmd->add_option("--az,--azimuth", l.azimuth, "Satellite azimuth in degrees")->required();
    auto *rx = cmd->add_option("--rx", l.rx_id, "Receiver id from the configuration");
    auto *pos = cmd->add_option("--position", l.position, "Receiver position x y [z]")->expected(2, 3);
    rx->excludes(pos);
}

SweepCell make_cell(const RunConfig &cfg, const Link &l)
{
    SweepCell cell;
    cell.elevation = l.elevation;
    cell.azimuth = l.azimuth;
    if (!l.position.empty())
    {
        cell.rx.id = "custom";
        cell.rx.position = Vec3(l.position[0], l.position[1], l.position.size() == 3 ? l.position[2] : cfg.rx_height);
        if (!(cell.rx.position.z() > 0.0))
            throw ConfigError("--position: receiver must lie above the ground");
        if (Scene::build_manhattan(cfg.scene).building_containing(cell.rx.position))
            throw ConfigError("--position: receiver lies inside a building");
        return cell;
    }
    const auto &rs = cfg.sweep.receivers;
    if (l.rx_id.empty())
    {
        cell.rx = rs.front();
        return cell;
    }
    for (std::size_t i = 0; i < rs.size(); ++i)
        if (rs[i].id == l.rx_id)
        {
            cell.rx = rs[i];
            cell.rx_index = i;
            return cell;
        }
    throw ConfigError("--rx: unknown receiver id '" + l.rx_id + "'");
}

int cmd_scene(const Common &c)
{
    const RunConfig cfg = load(c);
    const Scene scene = Scene::build_manhattan(cfg.scene);
    const fs::path out = fs::path(resolve_output_dir(cfg)) / "scene.json";
    write_file_atomic(out.string(), scene_to_json(scene).dump(2) + "\n");
    std::cout << "wrote " << out.string() << " (" << scene.buildings().size() << " buildings, " << scene.faces().size()
              << " faces, " << scene.wedges().size() << " wedges, " << scene.tiles().size() << " tiles)\n";
    return kExitOk;
}

int cmd_link(const Common &c, const Link &l, bool breakdown)
{
    const RunConfig cfg = load(c);
    const SweepCell cell = make_cell(cfg, l);
    const Scene scene = Scene::build_manhattan(cfg.scene);
    SweepContext ctx;
    ctx.scene = &scene;
    ctx.catalog = std::make_shared<const PathCatalog>(scene, cfg.limits);
    ctx.spec = cfg.sweep;

    const CellTrace t = trace_cell(ctx, cell);
    const fs::path dir = resolve_output_dir(cfg);
    const std::string tag = cell_tag(cell.elevation, cell.azimuth, cell.rx.id);
    const fs::path paths_csv = dir / ("paths_" + tag + ".csv");
    const fs::path contrib_csv = dir / ("contributions_" + tag + ".csv");
    write_file_atomic(paths_csv.string(), text_of([&](std::ostream &os) { write_paths_csv(os, t.paths); }));
    write_file_atomic(contrib_csv.string(),
                      text_of([&](std::ostream &os) { write_contributions_csv(os, t.contributions); }));

    const MechanismBreakdown b = mechanism_breakdown(t.contributions);
    std::cout << t.paths.size() << " paths at (" << format_double(cell.rx.position.x()) << ", "
              << format_double(cell.rx.position.y()) << ", " << format_double(cell.rx.position.z()) << ")\n";
    if (breakdown)
    {
        const fs::path b_csv = dir / ("breakdown_" + tag + ".csv");
        const BreakdownRow row{cell.elevation, cell.azimuth, cell.rx.id, b};
        write_file_atomic(b_csv.string(), text_of([&](std::ostream &os) { write_breakdown_csv(os, {row}); }));
        for (std::size_t i = 0; i < kMechanisms.size(); ++i)
            std::cout << "  " << to_string(kMechanisms[i]) << "\t" << format_double(100.0 * b.fraction[i]) << " %\n";
        std::cout << "wrote " << b_csv.string() << "\n";
    }
    std::cout << "wrote " << paths_csv.string() << "\nwrote " << contrib_csv.string() << "\n";
    return kExitOk;
}

// The journal's first line records the configuration it belongs to; output
// location and worker count do not affect results and are left out.
nlohmann::json journal_header(const RunConfig &cfg)
{
    nlohmann::json j = config_to_json(cfg);
    j.erase("output_dir");
    j.erase("workers");
    return {{"journal", "sweep/1"}, {"config", j}};
}

std::vector<CellResult> read_journal(const fs::path &path, const nlohmann::json &header,
                                     const std::vector<SweepCell> &cells)
{
    std::ifstream in(path);
    if (!in)
        return {};
    std::string line;
    if (!std::getline(in, line))
        return {};
    const auto head = nlohmann::json::parse(line, nullptr, false);
    if (head.is_discarded() || head != header)
    {
        std::cerr << "warning: " << path.string() << " belongs to a different configuration; starting over\n";
        return {};
    }
    std::map<std::size_t, CellResult> found;
    std::size_t lineno = 1;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.empty())
            continue;
        try
        {
            CellResult r = cell_from_json(nlohmann::json::parse(line));
            const std::size_t i = r.cell.index;
            if (i >= cells.size() || cells[i].elevation != r.cell.elevation || cells[i].azimuth != r.cell.azimuth ||
                cells[i].rx.id != r.cell.rx.id)
                throw std::invalid_argument("cell does not match the sweep");
            r.cell = cells[i];
            found[i] = std::move(r);
        }
        catch (const std::exception &e)
        {
            std::cerr << "warning: " << path.string() << ":" << lineno << ": ignoring unreadable entry (" << e.what()
                      << ")\n";
        }
    }
    std::vector<CellResult> done;
    for (auto &[i, r] : found)
        done.push_back(std::move(r));
    return done;
}

int cmd_sweep(const Common &c, int workers_flag, bool fresh)
{
    RunConfig cfg = load(c);
    if (workers_flag > 0)
        cfg.workers = workers_flag;
    const Scene scene = Scene::build_manhattan(cfg.scene);
    SweepContext ctx;
    ctx.scene = &scene;
    ctx.catalog = std::make_shared<const PathCatalog>(scene, cfg.limits);
    ctx.spec = cfg.sweep;

    const fs::path dir = resolve_output_dir(cfg);
    fs::create_directories(dir);
    const fs::path journal = dir / "sweep_journal.jsonl";
    const auto header = journal_header(cfg);
    const auto cells = sweep_cells(cfg.sweep);
    std::vector<CellResult> done = fresh ? std::vector<CellResult>{} : read_journal(journal, header, cells);

    // Rewrite the journal from what was recovered so a torn tail is dropped.
    std::ofstream jout(journal, std::ios::trunc);
    if (!jout)
        throw std::runtime_error(journal.string() + ": cannot open for writing");
    jout << header.dump() << '\n';
    for (const auto &r : done)
        jout << cell_to_json(r).dump() << '\n';
    jout.flush();

    std::cerr << cells.size() << " cells, " << done.size() << " already done, " << cfg.workers << " worker(s)\n";
    std::size_t finished = done.size();
    const SweepResult result = run_sweep(ctx, cfg.workers, done, [&](const CellResult &r) {
        jout << cell_to_json(r).dump() << '\n';
        jout.flush();
        ++finished;
        std::cerr << "[" << finished << "/" << cells.size() << "] el " << format_double(r.cell.elevation) << " az "
                  << format_double(r.cell.azimuth) << " " << r.cell.rx.id
                  << (r.ok ? " K " + format_double(r.k.k_db) + " dB" : " failed: " + r.error) << "\n";
    });

    write_file_atomic((dir / "sweep.csv").string(),
                      text_of([&](std::ostream &os) { write_sweep_csv(os, result.rows); }));
    write_file_atomic((dir / "aggregate.csv").string(),
                      text_of([&](std::ostream &os) { write_aggregate_csv(os, result.aggregates); }));
    write_file_atomic((dir / "sweep_errors.csv").string(),
                      text_of([&](std::ostream &os) { write_errors_csv(os, result.rows); }));
    std::cout << "wrote " << (dir / "sweep.csv").string() << " and " << (dir / "aggregate.csv").string() << "\n";
    if (result.any_failed())
    {
        std::cerr << "some cells failed; see " << (dir / "sweep_errors.csv").string() << "\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_validate(const Common &c)
{
    const RunConfig cfg = load(c);
    std::cout << config_to_json(cfg).dump(2) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Satellite-to-ground urban ray tracing and Rician K-factor analysis"};
    app.require_subcommand(1);

    Common common;
    Link link;
    int workers = 0;
    bool fresh = false;

    auto *scene = app.add_subcommand("scene", "Write the scene geometry as JSON");
    add_common(scene, common);
    auto *trace = app.add_subcommand("trace", "Trace one satellite-receiver link and write its paths");
    add_common(trace, common);
    add_link(trace, link);
    auto *breakdown = app.add_subcommand("breakdown", "Per-mechanism power breakdown for one link");
    add_common(breakdown, common);
    add_link(breakdown, link);
    auto *sweep = app.add_subcommand("sweep", "K-factor sweep over elevations, azimuths and receivers");
    add_common(sweep, common);
    sweep->add_option("-j,--workers", workers, "Worker threads (overrides config)")->check(CLI::PositiveNumber);
    sweep->add_flag("--fresh", fresh, "Ignore an existing journal");
    auto *validate = app.add_subcommand("validate-config", "Validate a configuration and print it with defaults");
    add_common(validate, common, false);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try
    {
        if (*scene)
            return cmd_scene(common);
        if (*trace)
            return cmd_link(common, link, false);
        if (*breakdown)
            return cmd_link(common, link, true);
        if (*sweep)
            return cmd_sweep(common, workers, fresh);
        if (*validate)
            return cmd_validate(common);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
