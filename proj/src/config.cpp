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

#include "s2g/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace s2g
{

using nlohmann::json;

namespace
{

[[noreturn]] void fail(const std::string &field, const std::string &what) { throw ConfigError(field + ": " + what); }

void check_keys(const json &obj, const std::string &where, const std::set<std::string> &allowed)
{
    if (!obj.is_object())
        fail(where.empty() ? "config" : where, "expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            fail(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
}

std::string join(const std::string &where, const std::string &key) { return where.empty() ? key : where + "." + key; }

void read(const json &obj, const std::string &where, const char *key, double &out)
{
    if (!obj.contains(key))
        return;
    const json &v = obj.at(key);
    if (!v.is_number())
        fail(join(where, key), "expected a number");
    out = v.get<double>();
}

void read(const json &obj, const std::string &where, const char *key, int &out)
{
    if (!obj.contains(key))
        return;
    const json &v = obj.at(key);
    if (v.is_number_integer())
        out = v.get<int>();
    else if (v.is_number_float() && v.get<double>() == std::floor(v.get<double>()))
        out = static_cast<int>(v.get<double>());
    else
        fail(join(where, key), "expected an integer");
}

void read(const json &obj, const std::string &where, const char *key, bool &out)
{
    if (!obj.contains(key))
        return;
    const json &v = obj.at(key);
    if (!v.is_boolean())
        fail(join(where, key), "expected true or false");
    out = v.get<bool>();
}

void read(const json &obj, const std::string &where, const char *key, std::string &out)
{
    if (!obj.contains(key))
        return;
    const json &v = obj.at(key);
    if (!v.is_string())
        fail(join(where, key), "expected a string");
    out = v.get<std::string>();
}

void read(const json &obj, const std::string &where, const char *key, std::vector<double> &out)
{
    if (!obj.contains(key))
        return;
    const json &v = obj.at(key);
    if (!v.is_array())
        fail(join(where, key), "expected an array of numbers");
    out.clear();
    for (const auto &e : v)
    {
        if (!e.is_number())
            fail(join(where, key), "expected an array of numbers");
        out.push_back(e.get<double>());
    }
}

} // namespace

std::vector<ReceiverSpec> default_receivers(const SceneConfig &s, double rx_height)
{
    const double bx = s.block_size_x, by = s.block_size_y, sw = s.street_width;
    const double col = s.blocks_x >= 3 ? (bx + sw) : 0.0; // middle block column when available
    const double mid_x = col + 0.5 * bx;
    const double street_y = by + 0.5 * sw;
    const double near = std::min(2.0, 0.25 * sw);
    return {
        {"mid_canyon", Vec3(mid_x, street_y, rx_height)},
        {"near_wall_s", Vec3(mid_x, by + near, rx_height)},
        {"near_wall_n", Vec3(mid_x, by + sw - near, rx_height)},
        {"intersection_center", Vec3(bx + 0.5 * sw, street_y, rx_height)},
        {"intersection_corner", Vec3(bx + near, by + near, rx_height)},
    };
}

RunConfig default_run_config()
{
    RunConfig cfg;
    cfg.sweep.elevations = {10, 20, 30, 40, 50, 60, 70, 80, 90};
    cfg.sweep.azimuths = {0, 45, 90};
    cfg.sweep.receivers = default_receivers(cfg.scene, cfg.rx_height);
    return cfg;
}

void RunConfig::validate() const
{
    try
    {
        scene.validate();
        limits.validate();
        sweep.grid.validate();
    }
    catch (const std::invalid_argument &e)
    {
        throw ConfigError(e.what());
    }
    if (!(rx_height > 0.0))
        fail("rx_height_m", "must be > 0");
    if (workers < 1)
        fail("workers", "must be >= 1");
    if (!(sweep.slant_range > 0.0))
        fail("satellite.slant_range_m", "must be > 0");
    if (sweep.elevations.empty())
        fail("sweep.elevations_deg", "must not be empty");
    for (double el : sweep.elevations)
        if (!(el > 0.0 && el <= 90.0))
            fail("sweep.elevations_deg", "values must lie in (0, 90]");
    if (sweep.azimuths.empty())
        fail("sweep.azimuths_deg", "must not be empty");
    for (double az : sweep.azimuths)
        if (!std::isfinite(az))
            fail("sweep.azimuths_deg", "values must be finite");
    if (sweep.receivers.empty())
        fail("sweep.receivers", "must not be empty");
    std::set<std::string> ids;
    const Scene probe = Scene::build_manhattan(scene);
    for (std::size_t i = 0; i < sweep.receivers.size(); ++i)
    {
        const auto &r = sweep.receivers[i];
        const std::string where = "sweep.receivers[" + std::to_string(i) + "]";
        if (r.id.empty())
            fail(where + ".id", "must not be empty");
        if (!ids.insert(r.id).second)
            fail(where + ".id", "duplicate id '" + r.id + "'");
        if (!(r.position.z() > 0.0))
            fail(where + ".position", "must lie above the ground");
        if (probe.building_containing(r.position))
            fail(where + ".position", "lies inside a building");
    }
}

RunConfig config_from_json(const json &doc)
{
    RunConfig cfg = default_run_config();
    check_keys(doc, "", {"scene", "limits", "sweep", "grid", "satellite", "rx_height_m", "output_dir", "workers"});
    bool receivers_given = false;

    if (doc.contains("scene"))
    {
        const json &s = doc.at("scene");
        check_keys(s, "scene",
                   {"block_size_x", "block_size_y", "street_width", "building_height", "blocks_x", "blocks_y",
                    "tile_size", "roof_tiles", "frequency_hz", "material"});
        read(s, "scene", "block_size_x", cfg.scene.block_size_x);
        read(s, "scene", "block_size_y", cfg.scene.block_size_y);
        read(s, "scene", "street_width", cfg.scene.street_width);
        read(s, "scene", "building_height", cfg.scene.building_height);
        read(s, "scene", "blocks_x", cfg.scene.blocks_x);
        read(s, "scene", "blocks_y", cfg.scene.blocks_y);
        read(s, "scene", "tile_size", cfg.scene.tile_size);
        read(s, "scene", "roof_tiles", cfg.scene.roof_tiles);
        read(s, "scene", "frequency_hz", cfg.scene.frequency);
        if (s.contains("material"))
        {
            const json &m = s.at("material");
            check_keys(m, "scene.material", {"rel_permittivity", "conductivity", "scattering_coefficient"});
            read(m, "scene.material", "rel_permittivity", cfg.scene.material.rel_permittivity);
            read(m, "scene.material", "conductivity", cfg.scene.material.conductivity);
            read(m, "scene.material", "scattering_coefficient", cfg.scene.material.scattering_coefficient);
        }
    }
    if (doc.contains("limits"))
    {
        const json &l = doc.at("limits");
        check_keys(l, "limits",
                   {"max_reflections", "max_diffractions", "max_rd_total", "max_rs_total", "max_ds_total",
                    "scattering"});
        read(l, "limits", "max_reflections", cfg.limits.max_reflections);
        read(l, "limits", "max_diffractions", cfg.limits.max_diffractions);
        read(l, "limits", "max_rd_total", cfg.limits.max_rd_total);
        read(l, "limits", "max_rs_total", cfg.limits.max_rs_total);
        read(l, "limits", "max_ds_total", cfg.limits.max_ds_total);
        read(l, "limits", "scattering", cfg.limits.scattering);
    }
    read(doc, "", "rx_height_m", cfg.rx_height);
    if (doc.contains("sweep"))
    {
        const json &s = doc.at("sweep");
        check_keys(s, "sweep", {"elevations_deg", "azimuths_deg", "receivers"});
        read(s, "sweep", "elevations_deg", cfg.sweep.elevations);
        read(s, "sweep", "azimuths_deg", cfg.sweep.azimuths);
        if (s.contains("receivers"))
        {
            const json &rs = s.at("receivers");
            if (!rs.is_array())
                fail("sweep.receivers", "expected an array");
            receivers_given = true;
            cfg.sweep.receivers.clear();
            for (std::size_t i = 0; i < rs.size(); ++i)
            {
                const std::string where = "sweep.receivers[" + std::to_string(i) + "]";
                const json &r = rs[i];
                check_keys(r, where, {"id", "position"});
                ReceiverSpec spec;
                read(r, where, "id", spec.id);
                if (!r.contains("position") || !r.at("position").is_array())
                    fail(where + ".position", "expected [x, y] or [x, y, z]");
                const json &p = r.at("position");
                if ((p.size() != 2 && p.size() != 3) ||
                    !std::all_of(p.begin(), p.end(), [](const json &e) { return e.is_number(); }))
                    fail(where + ".position", "expected [x, y] or [x, y, z]");
                spec.position = Vec3(p[0].get<double>(), p[1].get<double>(),
                                     p.size() == 3 ? p[2].get<double>() : cfg.rx_height);
                cfg.sweep.receivers.push_back(spec);
            }
        }
    }
    if (doc.contains("grid"))
    {
        const json &g = doc.at("grid");
        check_keys(g, "grid", {"size", "spacing_wavelengths"});
        read(g, "grid", "size", cfg.sweep.grid.size);
        read(g, "grid", "spacing_wavelengths", cfg.sweep.grid.spacing_wavelengths);
    }
    if (doc.contains("satellite"))
    {
        const json &s = doc.at("satellite");
        check_keys(s, "satellite", {"slant_range_m"});
        read(s, "satellite", "slant_range_m", cfg.sweep.slant_range);
    }
    read(doc, "", "output_dir", cfg.output_dir);
    read(doc, "", "workers", cfg.workers);

    if (!receivers_given)
    {
        try
        {
            cfg.scene.validate();
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError(e.what());
        }
        cfg.sweep.receivers = default_receivers(cfg.scene, cfg.rx_height);
    }
    cfg.validate();
    return cfg;
}

json config_to_json(const RunConfig &cfg)
{
    json doc;
    const auto &s = cfg.scene;
    doc["scene"] = {{"block_size_x", s.block_size_x},
                    {"block_size_y", s.block_size_y},
                    {"street_width", s.street_width},
                    {"building_height", s.building_height},
                    {"blocks_x", s.blocks_x},
                    {"blocks_y", s.blocks_y},
                    {"tile_size", s.tile_size},
                    {"roof_tiles", s.roof_tiles},
                    {"frequency_hz", s.frequency},
                    {"material",
                     {{"rel_permittivity", s.material.rel_permittivity},
                      {"conductivity", s.material.conductivity},
                      {"scattering_coefficient", s.material.scattering_coefficient}}}};
    const auto &l = cfg.limits;
    doc["limits"] = {{"max_reflections", l.max_reflections}, {"max_diffractions", l.max_diffractions},
                     {"max_rd_total", l.max_rd_total},       {"max_rs_total", l.max_rs_total},
                     {"max_ds_total", l.max_ds_total},       {"scattering", l.scattering}};
    json receivers = json::array();
    for (const auto &r : cfg.sweep.receivers)
        receivers.push_back({{"id", r.id}, {"position", {r.position.x(), r.position.y(), r.position.z()}}});
    doc["sweep"] = {{"elevations_deg", cfg.sweep.elevations},
                    {"azimuths_deg", cfg.sweep.azimuths},
                    {"receivers", receivers}};
    doc["grid"] = {{"size", cfg.sweep.grid.size}, {"spacing_wavelengths", cfg.sweep.grid.spacing_wavelengths}};
    doc["satellite"] = {{"slant_range_m", cfg.sweep.slant_range}};
    doc["rx_height_m"] = cfg.rx_height;
    doc["output_dir"] = cfg.output_dir;
    doc["workers"] = cfg.workers;
    return doc;
}

void apply_override(json &doc, const std::string &assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("override '" + assignment + "': expected key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded())
        value = text;

    json *node = &doc;
    std::size_t start = 0;
    while (true)
    {
        const auto dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty())
            throw ConfigError("override '" + assignment + "': empty key segment");
        if (!node->is_object())
            throw ConfigError(path + ": cannot override inside a non-object value");
        if (dot == std::string::npos)
        {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null())
            *node = json::object();
        start = dot + 1;
    }
}

RunConfig config_from_text(const std::string &text, const std::vector<std::string> &overrides)
{
    json doc;
    try
    {
        doc = text.find_first_not_of(" \t\r\n") == std::string::npos ? json::object() : json::parse(text);
    }
    catch (const json::parse_error &e)
    {
        // The parser reports "... at line L, column C: ...".
        std::string msg = e.what();
        const auto pos = msg.find("at line");
        throw ConfigError("config parse error " + (pos == std::string::npos ? msg : msg.substr(pos)));
    }
    for (const auto &o : overrides)
        apply_override(doc, o);
    return config_from_json(doc);
}

RunConfig load_config(const std::string &path, const std::vector<std::string> &overrides)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path + ": cannot open config file");
    std::stringstream ss;
    ss << in.rdbuf();
    try
    {
        return config_from_text(ss.str(), overrides);
    }
    catch (const ConfigError &e)
    {
        throw ConfigError(path + ": " + e.what());
    }
}

std::string resolve_output_dir(const RunConfig &cfg)
{
    if (!cfg.output_dir.empty())
        return cfg.output_dir;
    if (const char *env = std::getenv("S2G_OUTPUT_DIR"); env && *env)
        return env;
    return "s2g_out";
}

} // namespace s2g
