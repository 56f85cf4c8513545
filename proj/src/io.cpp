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

#include "s2g/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace s2g
{

using nlohmann::json;

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string csv_field(const std::string &s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
    {
        if (c == '"')
            out += '"';
        out += c;
    }
    return out + "\"";
}

namespace
{

json vec(const Vec3 &v) { return json::array({v.x(), v.y(), v.z()}); }

// NaN is not representable in JSON; null stands in for it.
json num(double v) { return std::isnan(v) ? json(nullptr) : json(v); }
double num(const json &j) { return j.is_null() ? std::nan("") : j.get<double>(); }

const char *bool_str(bool b) { return b ? "true" : "false"; }

} // namespace

json scene_to_json(const Scene &scene)
{
    const auto &c = scene.config();
    json doc;
    doc["schema"] = "scene/1";
    doc["config"] = {{"block_size_x", c.block_size_x},
                     {"block_size_y", c.block_size_y},
                     {"street_width", c.street_width},
                     {"building_height", c.building_height},
                     {"blocks_x", c.blocks_x},
                     {"blocks_y", c.blocks_y},
                     {"tile_size", c.tile_size},
                     {"roof_tiles", c.roof_tiles},
                     {"frequency_hz", c.frequency},
                     {"material",
                      {{"rel_permittivity", c.material.rel_permittivity},
                       {"conductivity", c.material.conductivity},
                       {"scattering_coefficient", c.material.scattering_coefficient}}}};

    json buildings = json::array();
    for (const auto &b : scene.buildings())
        buildings.push_back({{"id", b.id},
                             {"ix", b.ix},
                             {"iy", b.iy},
                             {"min", vec(b.box.lo)},
                             {"max", vec(b.box.hi)},
                             {"faces", b.faces}});
    doc["buildings"] = buildings;

    json faces = json::array();
    for (const auto &f : scene.faces())
    {
        json jf = {{"id", f.id},
                   {"kind", to_string(f.kind)},
                   {"building", f.building},
                   {"normal", vec(f.normal())},
                   {"bounded", f.bounded}};
        if (f.bounded)
        {
            jf["origin"] = vec(f.origin);
            jf["u_axis"] = vec(f.u_axis);
            jf["v_axis"] = vec(f.v_axis);
            jf["u_len"] = f.u_len;
            jf["v_len"] = f.v_len;
        }
        else
        {
            jf["offset"] = f.plane.offset;
        }
        faces.push_back(jf);
    }
    doc["faces"] = faces;

    json wedges = json::array();
    for (const auto &w : scene.wedges())
        wedges.push_back({{"id", w.id},
                          {"building", w.building},
                          {"a", vec(w.a)},
                          {"b", vec(w.b)},
                          {"face_0", w.face_0},
                          {"face_n", w.face_n},
                          {"n", w.n}});
    doc["wedges"] = wedges;

    json tiles = json::array();
    for (const auto &t : scene.tiles())
        tiles.push_back({{"id", t.id},
                         {"face", t.face},
                         {"center", vec(t.center)},
                         {"normal", vec(t.normal)},
                         {"u", {t.u0, t.u1}},
                         {"v", {t.v0, t.v1}},
                         {"area", t.area}});
    doc["tiles"] = tiles;
    return doc;
}

void write_paths_csv(std::ostream &os, const std::vector<PropPath> &paths)
{
    os << "path_id,class,n_interactions,interactions,total_length_m,vertices\n";
    for (std::size_t i = 0; i < paths.size(); ++i)
    {
        const auto &p = paths[i];
        std::string inter;
        for (std::size_t k = 0; k < p.interactions.size(); ++k)
            inter += (k ? ";" : "") + to_string(p.interactions[k]);
        std::string verts;
        for (std::size_t k = 0; k < p.vertices.size(); ++k)
            for (int c = 0; c < 3; ++c)
                verts += (k || c ? ";" : "") + format_double(p.vertices[k][c]);
        os << i << ',' << to_string(p.mechanism) << ',' << p.interactions.size() << ',' << inter << ','
           << format_double(p.total_length) << ',' << verts << '\n';
    }
}

void write_contributions_csv(std::ostream &os, const std::vector<RayContribution> &contributions)
{
    os << "path_id,class,power_w,delay_s,E_v_re,E_v_im,E_h_re,E_h_im\n";
    for (std::size_t i = 0; i < contributions.size(); ++i)
    {
        const auto &c = contributions[i];
        os << i << ',' << to_string(c.mechanism) << ',' << format_double(c.power) << ',' << format_double(c.delay)
           << ',' << format_double(c.e_v.real()) << ',' << format_double(c.e_v.imag()) << ','
           << format_double(c.e_h.real()) << ',' << format_double(c.e_h.imag()) << '\n';
    }
}

void write_breakdown_csv(std::ostream &os, const std::vector<BreakdownRow> &rows)
{
    os << "elevation_deg,azimuth_deg,rx_id,total_power_w";
    for (auto m : kMechanisms)
        os << ",power_" << to_string(m);
    for (auto m : kMechanisms)
        os << ",frac_" << to_string(m);
    os << '\n';
    for (const auto &r : rows)
    {
        os << format_double(r.elevation) << ',' << format_double(r.azimuth) << ',' << csv_field(r.rx_id) << ','
           << format_double(r.breakdown.total);
        for (double p : r.breakdown.power)
            os << ',' << format_double(p);
        for (double f : r.breakdown.fraction)
            os << ',' << format_double(f);
        os << '\n';
    }
}

void write_sweep_csv(std::ostream &os, const std::vector<CellResult> &rows)
{
    os << "elevation_deg,azimuth_deg,rx_id,rx_x,rx_y,rx_z,los,K_dB,nu,sigma,converged";
    for (auto m : kMechanisms)
        os << ",frac_" << to_string(m);
    os << '\n';
    const std::string nan = "nan";
    for (const auto &r : rows)
    {
        const auto &c = r.cell;
        os << format_double(c.elevation) << ',' << format_double(c.azimuth) << ',' << csv_field(c.rx.id) << ','
           << format_double(c.rx.position.x()) << ',' << format_double(c.rx.position.y()) << ','
           << format_double(c.rx.position.z()) << ',';
        if (!r.ok)
        {
            os << bool_str(r.los) << ',' << nan << ',' << nan << ',' << nan << ",error";
            for (std::size_t i = 0; i < kMechanisms.size(); ++i)
                os << ',' << nan;
            os << '\n';
            continue;
        }
        os << bool_str(r.los) << ',' << format_double(r.k.k_db) << ',' << format_double(r.k.nu) << ','
           << format_double(r.k.sigma) << ',' << bool_str(r.k.converged);
        for (double f : r.breakdown.fraction)
            os << ',' << format_double(f);
        os << '\n';
    }
}

void write_aggregate_csv(std::ostream &os, const std::vector<AggregateRow> &rows)
{
    os << "elevation_deg,subset,mean_K_dB,std_K_dB,n_cells\n";
    for (const auto &a : rows)
        os << format_double(a.elevation) << ',' << a.subset << ',' << format_double(a.mean_k_db) << ','
           << format_double(a.std_k_db) << ',' << a.n_cells << '\n';
}

void write_errors_csv(std::ostream &os, const std::vector<CellResult> &rows)
{
    os << "elevation_deg,azimuth_deg,rx_id,error\n";
    for (const auto &r : rows)
        if (!r.ok)
            os << format_double(r.cell.elevation) << ',' << format_double(r.cell.azimuth) << ','
               << csv_field(r.cell.rx.id) << ',' << csv_field(r.error) << '\n';
}

json cell_to_json(const CellResult &r)
{
    json power = json::array(), fraction = json::array();
    for (double p : r.breakdown.power)
        power.push_back(num(p));
    for (double f : r.breakdown.fraction)
        fraction.push_back(num(f));
    return {{"index", r.cell.index},
            {"elevation", r.cell.elevation},
            {"azimuth", r.cell.azimuth},
            {"rx_index", r.cell.rx_index},
            {"rx_id", r.cell.rx.id},
            {"rx", vec(r.cell.rx.position)},
            {"ok", r.ok},
            {"error", r.error},
            {"los", r.los},
            {"k",
             {{"nu", num(r.k.nu)},
              {"sigma", num(r.k.sigma)},
              {"k_linear", num(r.k.k_linear)},
              {"k_db", num(r.k.k_db)},
              {"n_samples", r.k.n_samples},
              {"converged", r.k.converged}}},
            {"power", power},
            {"fraction", fraction},
            {"total", num(r.breakdown.total)},
            {"defined", r.breakdown.defined},
            {"diag",
             {{"candidates", r.diag.candidates},
              {"fermat_nonconverged", r.diag.fermat_nonconverged},
              {"paths", r.diag.paths}}},
            {"mixed_visibility", r.mixed_visibility}};
}

CellResult cell_from_json(const json &j)
{
    CellResult r;
    r.cell.index = j.at("index").get<std::size_t>();
    r.cell.elevation = j.at("elevation").get<double>();
    r.cell.azimuth = j.at("azimuth").get<double>();
    r.cell.rx_index = j.at("rx_index").get<std::size_t>();
    r.cell.rx.id = j.at("rx_id").get<std::string>();
    const auto &p = j.at("rx");
    r.cell.rx.position = Vec3(p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>());
    r.ok = j.at("ok").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.los = j.at("los").get<bool>();
    const auto &k = j.at("k");
    r.k.nu = num(k.at("nu"));
    r.k.sigma = num(k.at("sigma"));
    r.k.k_linear = num(k.at("k_linear"));
    r.k.k_db = num(k.at("k_db"));
    r.k.n_samples = k.at("n_samples").get<int>();
    r.k.converged = k.at("converged").get<bool>();
    r.k.los = r.los;
    const auto &power = j.at("power");
    const auto &fraction = j.at("fraction");
    if (power.size() != 7 || fraction.size() != 7)
        throw std::invalid_argument("journal entry: breakdown arrays must have 7 entries");
    for (std::size_t i = 0; i < 7; ++i)
    {
        r.breakdown.power[i] = num(power[i]);
        r.breakdown.fraction[i] = num(fraction[i]);
    }
    r.breakdown.total = num(j.at("total"));
    r.breakdown.defined = j.at("defined").get<bool>();
    const auto &d = j.at("diag");
    r.diag.candidates = d.at("candidates").get<std::size_t>();
    r.diag.fermat_nonconverged = d.at("fermat_nonconverged").get<std::size_t>();
    r.diag.paths = d.at("paths").get<std::size_t>();
    r.mixed_visibility = j.at("mixed_visibility").get<int>();
    return r;
}

void write_file_atomic(const std::string &path, const std::string &text)
{
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path())
        fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error(tmp.string() + ": cannot open for writing");
        out << text;
        if (!out)
            throw std::runtime_error(tmp.string() + ": write failed");
    }
    fs::rename(tmp, target);
}

} // namespace s2g
