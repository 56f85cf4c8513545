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

#include "oracle/brute_force.hpp"
#include "s2g/io.hpp"
#include "s2g/scene.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

using namespace s2g;

namespace
{

const Vec3 kStreetCenter(80.0, 40.0, 1.5);

bool sky_visible(const Scene &scene, const Vec3 &rx, double el, double az)
{
    return !scene.occluded(rx, rx + 1000.0 * satellite_direction(el, az));
}

} // namespace

TEST_SUITE("scene")
{
    TEST_CASE("default Manhattan grid counts")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        CHECK(scene.buildings().size() == 9);
        CHECK(scene.faces().size() == 1 + 9 * 5);
        CHECK(scene.wedges().size() == 9 * 8);
        // 40 x 20 walls give 8 x 4 tiles, 30 x 20 walls 6 x 4; roofs carry none.
        CHECK(scene.tiles().size() == 9 * (2 * 32 + 2 * 24));
        REQUIRE(scene.ground_face());
        CHECK(scene.faces()[*scene.ground_face()].kind == FaceKind::Ground);
    }

    TEST_CASE("tile areas add up to their face")
    {
        for (double ts : {5.0, 7.0, 3.3})
        {
            SceneConfig cfg;
            cfg.tile_size = ts;
            cfg.roof_tiles = true;
            const Scene scene = Scene::build_manhattan(cfg);
            for (const auto &f : scene.faces())
            {
                if (!f.bounded)
                    continue;
                const auto [first, last] = scene.tiles_of_face(f.id);
                double sum = 0.0;
                for (int t = first; t < last; ++t)
                {
                    CHECK(scene.tiles()[t].face == f.id);
                    sum += scene.tiles()[t].area;
                }
                CHECK(std::abs(sum - f.area()) <= 1e-9 * f.area());
            }
        }
    }

    TEST_CASE("truncated edge tiles keep their true area")
    {
        SceneConfig cfg;
        cfg.tile_size = 7.0;
        const Scene scene = Scene::build_manhattan(cfg);
        // A 40 m wall splits into 5 x 7 m plus one 5 m column; 20 m height
        // into 7, 7 and 6 m rows.
        const Face &south = scene.faces()[scene.buildings()[0].faces[0]];
        REQUIRE(south.u_len == doctest::Approx(40.0));
        std::map<double, int> widths;
        int narrow_35 = 0;
        const auto [first, last] = scene.tiles_of_face(south.id);
        for (int t = first; t < last; ++t)
        {
            const Tile &tile = scene.tiles()[t];
            widths[std::round((tile.u1 - tile.u0) * 1e6) / 1e6]++;
            if (std::abs(tile.u1 - tile.u0 - 5.0) < 1e-9 && std::abs(tile.area - 35.0) < 1e-9)
                ++narrow_35;
        }
        CHECK(widths[7.0] == 5 * 3);
        CHECK(widths[5.0] == 3);
        CHECK(narrow_35 == 2);
    }

    TEST_CASE("invalid scene parameters name the field")
    {
        SceneConfig cfg;
        cfg.blocks_x = 0;
        try
        {
            cfg.validate();
            FAIL("expected an exception");
        }
        catch (const std::invalid_argument &e)
        {
            CHECK(std::string(e.what()).find("blocks_x") != std::string::npos);
        }
    }

    TEST_CASE("street-center visibility across the canyon")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        CHECK(sky_visible(scene, kStreetCenter, 70.0, 90.0));
        CHECK_FALSE(sky_visible(scene, kStreetCenter, 50.0, 90.0));
        CHECK(sky_visible(scene, kStreetCenter, 90.0, 0.0));
        // Vertical segment above a roof.
        CHECK_FALSE(scene.occluded(Vec3(20.0, 15.0, 20.5), Vec3(20.0, 15.0, 500.0)));
        // Straight through a building.
        CHECK(scene.occluded(Vec3(-5.0, 15.0, 5.0), Vec3(45.0, 15.0, 5.0)));
        // Below ground.
        CHECK(scene.occluded(Vec3(50.0, 40.0, 1.0), Vec3(70.0, 40.0, -1.0)));
    }

    TEST_CASE("minimum unoccluded elevation matches the canyon threshold")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        const double expected = rad2deg(std::atan((20.0 - 1.5) / 10.0));
        double lo = 10.0, hi = 90.0;
        while (hi - lo > 1e-6)
        {
            const double mid = 0.5 * (lo + hi);
            (sky_visible(scene, kStreetCenter, mid, 90.0) ? hi : lo) = mid;
        }
        CHECK(std::abs(hi - expected) < 0.1);
    }

    TEST_CASE("occlusion is symmetric in its endpoints")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> x(-20.0, 180.0), y(-20.0, 150.0), z(0.1, 40.0);
        int blocked = 0;
        for (int i = 0; i < 2000; ++i)
        {
            const Vec3 a(x(rng), y(rng), z(rng)), b(x(rng), y(rng), z(rng));
            const bool ab = scene.occluded(a, b);
            CHECK(ab == scene.occluded(b, a));
            blocked += ab;
        }
        CHECK(blocked > 100);
        CHECK(blocked < 1900);
    }

    TEST_CASE("grid index agrees with an exhaustive box test")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        std::mt19937 rng(777);
        std::uniform_real_distribution<double> x(-20.0, 180.0), y(-20.0, 150.0), z(0.1, 40.0);
        for (int i = 0; i < 2000; ++i)
        {
            const Vec3 a(x(rng), y(rng), z(rng)), b(x(rng), y(rng), z(rng));
            const bool brute = oracle::blocked(scene, a, b);
            CHECK(scene.occluded(a, b) == brute);
        }
    }

    TEST_CASE("satellite position trigonometry")
    {
        const Vec3 o = Vec3::Zero();
        const Vec3 p = satellite_position(90.0, 37.0, 1234.0, o);
        CHECK(p.x() == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::abs(p.y()) < 1e-9);
        CHECK(p.z() == doctest::Approx(1234.0));
        const Vec3 q = satellite_position(30.0, 0.0, 1000.0, o);
        CHECK(q.x() == doctest::Approx(866.0254).epsilon(1e-6));
        CHECK(std::abs(q.y()) < 1e-9);
        CHECK(q.z() == doctest::Approx(500.0));
        CHECK_THROWS_AS(satellite_position(0.0, 0.0, 1000.0, o), std::invalid_argument);
        CHECK_THROWS_AS(satellite_position(30.0, 0.0, 0.0, o), std::invalid_argument);
    }

    TEST_CASE("scene dump is deterministic and versioned")
    {
        const auto a = scene_to_json(Scene::build_manhattan(SceneConfig{})).dump(2);
        const auto b = scene_to_json(Scene::build_manhattan(SceneConfig{})).dump(2);
        CHECK(a == b);
        const auto doc = nlohmann::json::parse(a);
        CHECK(doc.at("schema") == "scene/1");
        CHECK(doc.at("buildings").size() == 9);
        CHECK(doc.at("wedges").size() == 72);
        CHECK(doc.at("tiles").size() == 1008);
    }
}
