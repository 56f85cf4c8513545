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

#include "testkit.hpp"

#include "s2g/em.hpp"

#include <doctest.h>

#include <cmath>
#include <map>

using namespace s2g;

namespace
{

const cdouble J(0.0, 1.0);

// F(x) from the complementary Fresnel integral, with the finite part by
// composite Simpson: int_sqrt(x)^inf = sqrt(pi/8)(1 - j) - int_0^sqrt(x).
cdouble transition_oracle(double x)
{
    const double b = std::sqrt(x);
    const int n = 200000;
    const double h = b / n;
    cdouble acc = 0.0;
    for (int i = 0; i <= n; ++i)
    {
        const double t = i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::exp(-J * (t * t));
    }
    const cdouble tail = std::sqrt(kPi / 8.0) * cdouble(1.0, -1.0) - acc * (h / 3.0);
    return 2.0 * J * b * std::exp(J * x) * tail;
}

double a_pm(double n, double beta, int sign)
{
    const double big_n = std::round((beta + sign * kPi) / (2.0 * kPi * n));
    const double c = std::cos((2.0 * n * kPi * big_n - beta) / 2.0);
    return 2.0 * c * c;
}

// Four-term perfectly conducting wedge coefficient written out directly.
std::pair<cdouble, cdouble> utd_pec_oracle(double n, double si, double sd, double phi, double phi0, double beta0,
                                           double k)
{
    const double l = si * sd / (si + sd) * std::sin(beta0) * std::sin(beta0);
    const cdouble pre = -std::exp(-J * (kPi / 4.0)) / (2.0 * n * std::sqrt(2.0 * kPi * k) * std::sin(beta0));
    auto term = [&](double beta, int sign) {
        const double cot = 1.0 / std::tan((kPi + sign * beta) / (2.0 * n));
        return cot * transition_oracle(k * l * a_pm(n, beta, sign));
    };
    const cdouble incident = term(phi - phi0, +1) + term(phi - phi0, -1);
    const cdouble reflected = term(phi + phi0, +1) + term(phi + phi0, -1);
    return {pre * (incident - reflected), pre * (incident + reflected)};
}

MaterialParams lossless()
{
    MaterialParams m;
    m.conductivity = 0.0;
    return m;
}

double rel(cdouble a, cdouble b) { return std::abs(a - b) / std::abs(b); }

} // namespace

TEST_SUITE("em")
{
    TEST_CASE("free-space reference wave")
    {
        const double lambda = 0.1;
        CHECK(std::abs(free_space_field(1.0, lambda)) == doctest::Approx(1.0));
        CHECK(std::abs(free_space_field(2.0, lambda)) == doctest::Approx(0.5));
        CHECK(std::abs(std::arg(free_space_field(lambda, lambda))) < 1e-12);
        CHECK_THROWS_AS(free_space_field(0.0, lambda), std::domain_error);
    }

    TEST_CASE("Fresnel coefficients")
    {
        const MaterialParams m = lossless();
        const double expected = (1.0 - std::sqrt(5.31)) / (1.0 + std::sqrt(5.31));
        const auto g0 = fresnel_coefficients(0.0, m, 3e9);
        CHECK(std::abs(g0.te - expected) < 1e-12);
        CHECK(std::abs(g0.tm - expected) < 1e-12);
        CHECK(std::abs(g0.te.real() + 0.3947) < 1e-4);

        // Closed forms; the parallel coefficient is reported in the basis
        // where it tends to -1 at grazing, i.e. with the opposite sign.
        MaterialParams lossy;
        for (double deg : {0.0, 10.0, 35.0, 60.0, 80.0, 89.0})
        {
            const double th = deg2rad(deg);
            const cdouble eps = complex_permittivity(lossy, 3e9);
            const cdouble root = std::sqrt(eps - std::sin(th) * std::sin(th));
            const cdouble te = (std::cos(th) - root) / (std::cos(th) + root);
            const cdouble tm = (eps * std::cos(th) - root) / (eps * std::cos(th) + root);
            const auto g = fresnel_coefficients(th, lossy, 3e9);
            CHECK(std::abs(g.te - te) < 1e-12);
            CHECK(std::abs(g.tm + tm) < 1e-12);
            CHECK(std::abs(g.te) <= 1.0);
            CHECK(std::abs(g.tm) <= 1.0);
        }
        CHECK(complex_permittivity(lossy, 3e9).imag() ==
              doctest::Approx(-0.079 / (2.0 * kPi * 3e9 * kVacuumPermittivity)));

        // Grazing limit and Brewster zero.
        const auto gg = fresnel_coefficients(kPi / 2 - 1e-6, m, 3e9);
        CHECK(1.0 - std::abs(gg.te) < 1e-3);
        CHECK(1.0 - std::abs(gg.tm) < 1e-3);
        CHECK(std::abs(fresnel_coefficients(std::atan(std::sqrt(5.31)), m, 3e9).tm) < 1e-12);

        MaterialParams vacuum;
        vacuum.rel_permittivity = 1.0;
        vacuum.conductivity = 0.0;
        for (double deg : {0.0, 45.0, 89.0})
        {
            const auto g = fresnel_coefficients(deg2rad(deg), vacuum, 3e9);
            CHECK(std::abs(g.te) < 1e-12);
            CHECK(std::abs(g.tm) < 1e-12);
        }
    }

    TEST_CASE("transition function against a Fresnel-integral oracle")
    {
        for (double x : {1e-3, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 25.0, 30.0, 45.0})
        {
            CAPTURE(x);
            CHECK(rel(transition_function(x), transition_oracle(x)) < 1e-7);
        }
        CHECK(std::abs(transition_function(1.0) - cdouble(0.8095, 0.2322)) < 1e-3);
        CHECK(std::abs(std::abs(transition_function(10.0)) - 1.0) < 0.05);
        const double tiny = 1e-6;
        CHECK(std::abs(transition_function(tiny)) / std::sqrt(kPi * tiny) == doctest::Approx(1.0).epsilon(1e-2));
        double prev = 0.0;
        for (int i = 0; i <= 120; ++i)
        {
            const double x = std::pow(10.0, -4.0 + 6.0 * i / 120.0);
            const double mag = std::abs(transition_function(x));
            CHECK(mag >= prev - 1e-12);
            CHECK(mag <= 1.0 + 1e-12);
            prev = mag;
        }
        // The series branch joins the quadrature branch smoothly.
        CHECK(rel(transition_function(30.0 - 1e-9), transition_function(30.0)) < 1e-8);
    }

    TEST_CASE("perfectly conducting UTD coefficient matches the four-term formula")
    {
        const double k = 2.0 * kPi / 0.1;
        struct Case
        {
            double n, phi, phi0, beta0;
        };
        for (const Case &c : {Case{1.5, 4.0, 1.0, kPi / 2}, Case{1.5, 2.2, 0.7, 1.1}, Case{2.0, 5.5, 0.4, kPi / 2},
                              Case{1.5, 3.9, 2.5, 0.8}})
        {
            WedgeAngles a;
            a.phi = c.phi;
            a.phi0 = c.phi0;
            a.beta0 = c.beta0;
            const auto d = utd_coefficient(c.n, 30.0, 12.0, a, k, nullptr, 3e9);
            const auto [soft, hard] = utd_pec_oracle(c.n, 30.0, 12.0, c.phi, c.phi0, c.beta0, k);
            CHECK(rel(d.soft, soft) < 1e-6);
            CHECK(rel(d.hard, hard) < 1e-6);
            // Swapping source and observation angles and distances.
            WedgeAngles b = a;
            std::swap(b.phi, b.phi0);
            const auto e = utd_coefficient(c.n, 12.0, 30.0, b, k, nullptr, 3e9);
            CHECK(rel(e.soft, d.soft) < 1e-12);
            CHECK(rel(e.hard, d.hard) < 1e-12);
        }
    }

    TEST_CASE("knife edge near the reflection boundary: soft and hard opposite")
    {
        const double k = 2.0 * kPi / 0.1;
        WedgeAngles a;
        a.phi0 = 0.6;
        a.phi = kPi - a.phi0 + 1e-3;
        const auto d = utd_coefficient(2.0, 40.0, 40.0, a, k, nullptr, 3e9);
        CHECK(std::abs(d.soft + d.hard) / std::abs(d.soft) < 0.05);
    }

    TEST_CASE("UTD plus direct field is continuous across the shadow boundary")
    {
        const auto s = testkit::shadow_boundary_sweep();
        CHECK(s.lit_samples > 0);
        CHECK(s.lit_samples < s.samples);
        CHECK(s.jump_db < 0.5);
        CHECK(s.max_step_db < 0.5);
        CHECK(testkit::lit_region_ratio() < 0.1);
    }

    TEST_CASE("Lambertian scattering")
    {
        Tile tile;
        tile.center = Vec3::Zero();
        tile.normal = Vec3::UnitZ();
        tile.area = 25.0;
        const double is = er_scattered_intensity(tile, Vec3(0, 0, 30), Vec3(0, 0, 100), 1.0, 0.4);
        CHECK(is == doctest::Approx(0.16 * 25.0 / (kPi * 1e4)).epsilon(1e-12));
        CHECK(er_scattered_intensity(tile, Vec3(0, 0, 30), Vec3(100, 0, 0), 1.0, 0.4) == 0.0);
        CHECK(er_scattered_intensity(tile, Vec3(0, 0, 30), Vec3(10, 0, -1), 1.0, 0.4) == 0.0);

        // End-to-end symmetry once the incident spreading is included.
        const Vec3 a(13.0, -4.0, 22.0), b(-40.0, 9.0, 7.0);
        const double ab = er_scattered_intensity(tile, a, b, 1.0 / a.squaredNorm(), 0.4);
        const double ba = er_scattered_intensity(tile, b, a, 1.0 / b.squaredNorm(), 0.4);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));

        // Hemisphere quadrature of cos(theta) / pi, then of the model itself.
        double lambert = 0.0;
        const int n = 2000;
        for (int i = 0; i < n; ++i)
        {
            const double th = (i + 0.5) * (kPi / 2) / n;
            lambert += std::cos(th) / kPi * std::sin(th) * (kPi / 2) / n * 2.0 * kPi;
        }
        CHECK(std::abs(lambert - 1.0) < 1e-3);
        for (double ti : {0.0, 40.0, 75.0})
            CHECK(std::abs(testkit::lambertian_hemisphere_ratio(0.4, ti) - 1.0) < 1e-3);
    }

    TEST_CASE("line-of-sight power follows Friis")
    {
        SceneConfig cfg;
        const Scene scene = Scene::open_field(cfg);
        FieldContext ctx;
        PropPath p;
        p.vertices = {Vec3(0, 0, 30), Vec3(100, 20, 1.5)};
        p.total_length = (p.vertices[1] - p.vertices[0]).norm();
        const auto c = path_field(p, scene, ctx);
        const double lambda = ctx.wavelength();
        const double friis = std::pow(lambda / (4.0 * kPi * p.total_length), 2);
        CHECK(c.power / reference_tx_power() == doctest::Approx(friis).epsilon(1e-12));
        CHECK(c.delay == doctest::Approx(p.total_length / kSpeedOfLight).epsilon(1e-15));
        CHECK(std::abs(c.e_h) < 1e-15);
    }

    TEST_CASE("normal-incidence ground reflection")
    {
        SceneConfig cfg;
        cfg.material = lossless();
        const Scene scene = Scene::open_field(cfg);
        FieldContext ctx;
        ctx.material = cfg.material;
        PropPath p;
        p.vertices = {Vec3(0, 0, 100), Vec3(0, 0, 0), Vec3(0, 0, 50)};
        p.interactions = {{InteractionType::Reflection, *scene.ground_face()}};
        p.mechanism = Mechanism::R;
        p.total_length = 150.0;
        const auto c = path_field(p, scene, ctx);
        const double mag = std::sqrt(std::norm(c.e_v) + std::norm(c.e_h));
        CHECK(mag * 150.0 == doctest::Approx(0.3947).epsilon(1e-4));
    }

    TEST_CASE("two-ray model over a perfectly conducting ground")
    {
        SceneConfig cfg;
        const Scene scene = Scene::open_field(cfg);
        TraceLimits l;
        l.max_reflections = 1;
        l.max_diffractions = 0;
        l.scattering = false;
        const auto catalog = std::make_shared<const PathCatalog>(scene, l);
        FieldContext ctx;
        ctx.forced_gamma = -1.0;
        ctx.tx_pol_ref = Vec3::UnitY(); // horizontal, perpendicular to the plane of incidence
        const double k = ctx.wavenumber();
        const Vec3 tx(0.0, 0.0, 25.0);
        for (double d : {30.0, 100.0, 500.0, 2000.0})
        {
            const Vec3 rx(d, 0.0, 1.5);
            const auto paths = Tracer(catalog, tx).trace(rx);
            REQUIRE(paths.size() == 2);
            cdouble ev = 0.0, eh = 0.0;
            for (const auto &p : paths)
            {
                const auto c = path_field(p, scene, ctx);
                ev += c.e_v;
                eh += c.e_h;
            }
            const double d1 = (rx - tx).norm();
            const double d2 = (rx - Vec3(tx.x(), tx.y(), -tx.z())).norm();
            const cdouble closed = std::exp(-J * (k * d1)) / d1 - std::exp(-J * (k * d2)) / d2;
            CHECK(std::abs(ev) < 1e-12 * std::abs(closed));
            CHECK(std::norm(eh) == doctest::Approx(std::norm(closed)).epsilon(1e-9));
        }
    }

    TEST_CASE("path phase scales with frequency")
    {
        SceneConfig cfg;
        const Scene scene = Scene::open_field(cfg);
        PropPath los;
        los.vertices = {Vec3(0, 0, 30), Vec3(77.7, 12.0, 1.5)};
        los.total_length = (los.vertices[1] - los.vertices[0]).norm();
        PropPath refl;
        const Vec3 tx(0, 0, 30), rx(77.7, 12.0, 1.5);
        const double t = 30.0 / (30.0 + 1.5);
        const Vec3 g = tx + t * (Vec3(rx.x(), rx.y(), -rx.z()) - tx);
        refl.vertices = {tx, g, rx};
        refl.interactions = {{InteractionType::Reflection, *scene.ground_face()}};
        refl.mechanism = Mechanism::R;
        refl.total_length = (g - tx).norm() + (rx - g).norm();
        for (const PropPath *p : {&los, &refl})
        {
            FieldContext f1, f2;
            f1.forced_gamma = f2.forced_gamma = -1.0;
            f1.tx_pol_ref = f2.tx_pol_ref = Vec3::UnitY();
            f2.frequency = 2.0 * f1.frequency;
            // Removing the propagation phase leaves a frequency-independent
            // factor made of interaction and frame signs only.
            const cdouble e1 = path_field(*p, scene, f1).e_h;
            const cdouble e2 = path_field(*p, scene, f2).e_h;
            const cdouble c1 = e1 / std::abs(e1) * std::exp(J * (f1.wavenumber() * p->total_length));
            const cdouble c2 = e2 / std::abs(e2) * std::exp(J * (f2.wavenumber() * p->total_length));
            CHECK(std::abs(c1 - c2) < 1e-6);
            CHECK(std::abs(std::abs(c1.real()) - 1.0) < 1e-6);
        }
    }

    TEST_CASE("reflections never add power")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        TraceLimits l;
        l.max_diffractions = 0;
        l.scattering = false;
        const auto catalog = std::make_shared<const PathCatalog>(scene, l);
        FieldContext ctx;
        const Vec3 rx(80.0, 40.0, 1.5);
        int n = 0;
        for (double el : {15.0, 35.0, 55.0})
        {
            const Vec3 tx = satellite_position(el, 70.0, 20000.0, rx);
            ctx.tx_pol_ref = satellite_pol_ref(el, 70.0);
            for (const auto &p : Tracer(catalog, tx).trace(rx))
            {
                const auto c = path_field(p, scene, ctx);
                CHECK(std::sqrt(std::norm(c.e_v) + std::norm(c.e_h)) * p.total_length <= 1.0 + 1e-12);
                ++n;
            }
        }
        CHECK(n > 3);
    }

    TEST_CASE("scattered field splits evenly between polarizations")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        TraceLimits l;
        l.max_reflections = 0;
        l.max_diffractions = 0;
        const auto catalog = std::make_shared<const PathCatalog>(scene, l);
        const Vec3 rx(80.0, 40.0, 1.5);
        const Vec3 tx = satellite_position(20.0, 90.0, 20000.0, rx);
        FieldContext ctx;
        int n = 0;
        for (const auto &p : Tracer(catalog, tx).trace(rx))
        {
            if (p.mechanism != Mechanism::S)
                continue;
            const auto c = path_field(p, scene, ctx);
            CHECK(std::abs(c.e_v) == doctest::Approx(std::abs(c.e_h)).epsilon(1e-12));
            const Tile &t = scene.tiles()[p.interactions[0].element];
            PropPath direct;
            direct.vertices = {tx, t.center};
            direct.total_length = (t.center - tx).norm();
            const auto inc = path_field(direct, scene, ctx);
            const double expected = er_scattered_intensity(t, tx, rx, std::norm(inc.e_v) + std::norm(inc.e_h),
                                                           scene.material().scattering_coefficient);
            CHECK(std::norm(c.e_v) + std::norm(c.e_h) == doctest::Approx(expected).epsilon(1e-9));
            ++n;
        }
        CHECK(n > 0);
    }

    TEST_CASE("vertical-to-vertical transfer is reciprocal")
    {
        const Scene scene = Scene::build_manhattan(SceneConfig{});
        TraceLimits l;
        l.max_reflections = 2;
        l.max_diffractions = 1;
        l.scattering = false;
        const auto catalog = std::make_shared<const PathCatalog>(scene, l);
        const Vec3 a(80.0, 40.0, 1.5), b(80.0, 90.0, 35.0);

        auto fields = [&](const Vec3 &from, const Vec3 &to, const FieldContext &ctx, bool reverse) {
            std::map<std::string, cdouble> m;
            for (auto p : Tracer(catalog, from).trace(to))
            {
                if (p.mechanism == Mechanism::RD)
                    continue;
                const auto c = path_field(p, scene, ctx);
                if (reverse)
                    std::reverse(p.interactions.begin(), p.interactions.end());
                std::string key;
                for (const auto &i : p.interactions)
                    key += to_string(i) + ";";
                m[key] = c.e_v;
            }
            return m;
        };
        FieldContext pec;
        pec.forced_gamma = -1.0;
        FieldContext concrete;
        for (const FieldContext *ctx : {&pec, &concrete})
        {
            const auto ab = fields(a, b, *ctx, false);
            const auto ba = fields(b, a, *ctx, true);
            REQUIRE(ab.size() == ba.size());
            int diffracted = 0;
            for (const auto &[key, e] : ab)
            {
                CAPTURE(key);
                REQUIRE(ba.count(key));
                // Dielectric wedges use Luebbers' face weighting, which is
                // not reciprocal; only the conducting case is compared there.
                const bool has_d = key.find("D:") != std::string::npos;
                diffracted += has_d;
                if (has_d && ctx == &concrete)
                    continue;
                CHECK(std::abs(ba.at(key) - e) <= 1e-9 * std::abs(e));
            }
            CHECK(diffracted > 0);
        }
    }
}
