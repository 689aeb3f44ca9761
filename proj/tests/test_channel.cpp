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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chanpred/channel.hpp"
#include "chanpred/error.hpp"

using namespace chanpred;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("doppler_frequency")
{
    CHECK(doppler_frequency(2e9, 12.0, 0.0, 3e8) == doctest::Approx(80.0).epsilon(1e-14));
    CHECK(doppler_frequency(5e9, 30.0, pi / 2, 3e8) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(doppler_frequency(2e9, 0.0, 0.0, 3e8) == 0.0);
    CHECK_THROWS(doppler_frequency(2e9, -1.0, 0.0));
}

TEST_CASE("synthesize")
{
    SUBCASE("DC path")
    {
        const std::vector<PathParams> p{{1.0, 0.0, 0.0}};
        for (const auto& c : synthesize(p, 0.0, 1000.0, 64).samples) CHECK(c == cplx{1.0, 0.0});
    }
    SUBCASE("unit tone")
    {
        const std::vector<PathParams> p{{1.0, 37.0, 0.4}};
        for (const auto& c : synthesize(p, 0.3, 5e4, 2000).samples) CHECK(std::abs(c) == doctest::Approx(1.0));
    }
    SUBCASE("conjugate pair is real")
    {
        const double f = 21.0;
        const std::vector<PathParams> p{{1.0, f, 0.0}, {1.0, -f, 0.0}};
        const auto s = synthesize(p, 0.0, 1e4, 500);
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(s.samples[i].imag() == doctest::Approx(0.0).epsilon(1e-12));
            CHECK(s.samples[i].real() == doctest::Approx(2.0 * std::cos(2 * pi * f * s.time(i))).epsilon(1e-12));
        }
    }
    SUBCASE("empty path list")
    {
        CHECK_THROWS_AS(synthesize({}, 0.0, 1.0, 4), PreconditionError);
    }
    SUBCASE("magnitude bounded by total amplitude")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (int trial = 0; trial < 20; ++trial) {
            std::vector<PathParams> p(4);
            double total = 0.0;
            for (auto& e : p) {
                e = {u(rng), 200.0 * u(rng) - 100.0, 2 * pi * u(rng)};
                total += e.amplitude;
            }
            for (const auto& c : synthesize(p, 0.0, 1e3, 1000).samples) CHECK(std::abs(c) <= total + 1e-12);
        }
    }
}

TEST_CASE("geometry_to_paths")
{
    SUBCASE("receding along the line of sight")
    {
        ScenarioGeometry g;
        g.mu_heading = 0.0;
        g.mu_initial = {50.0, 0.0};
        g.light_speed = 3e8;
        const auto p = geometry_to_paths(g, 0.7);
        REQUIRE(p.size() == 1);
        CHECK(p[0].doppler_hz == doctest::Approx(-80.0));
    }
    SUBCASE("perpendicular arrival has zero doppler")
    {
        ScenarioGeometry g;
        g.mu_heading = 0.0;
        g.mu_initial = {50.0, 0.0};
        g.scatterers = {{50.0, 30.0}};
        const auto p = geometry_to_paths(g, 0.0);
        REQUIRE(p.size() == 2);
        CHECK(p[1].doppler_hz == doctest::Approx(0.0).epsilon(1e-9));
    }
    SUBCASE("standard scenario")
    {
        const auto g = ScenarioGeometry::standard(10.0);
        const double fmax = g.max_doppler_hz();
        CHECK(fmax == doctest::Approx(2e9 / kLightSpeed * 12.0));
        for (double t : {0.0, 0.5, 3.0, 17.0}) {
            const auto p = geometry_to_paths(g, t);
            REQUIRE(p.size() == 3);
            CHECK(p[0].doppler_hz != doctest::Approx(p[1].doppler_hz));
            CHECK(p[1].doppler_hz != doctest::Approx(p[2].doppler_hz));
            CHECK(p[0].doppler_hz != doctest::Approx(p[2].doppler_hz));
            double total = 0.0;
            for (const auto& e : p) {
                CHECK(std::abs(e.doppler_hz) <= fmax + 1e-9);
                total += e.amplitude;
            }
            CHECK(total == doctest::Approx(1.0));
        }
    }
    SUBCASE("phase matches path length")
    {
        const auto g = ScenarioGeometry::standard(5.0);
        const double t = 0.83;
        const auto p = geometry_to_paths(g, t);
        const Vec2 mu = g.mu_position(t);
        const double lambda = g.light_speed / g.carrier_hz;
        const double los = std::hypot(mu.x, mu.y);
        const cplx expect = std::polar(p[0].amplitude, -2 * pi * los / lambda);
        CHECK(std::abs(p[0].value_at(t) - expect) < 1e-9);
    }
    SUBCASE("degenerate geometry")
    {
        ScenarioGeometry g;
        g.mu_initial = g.bs;
        CHECK_THROWS_AS(geometry_to_paths(g, 0.0), DegenerateGeometryError);
        ScenarioGeometry h;
        h.scatterers = {h.mu_initial};
        CHECK_THROWS_AS(geometry_to_paths(h, 0.0), DegenerateGeometryError);
    }
    SUBCASE("delta_x grid")
    {
        CHECK_THROWS_AS(ScenarioGeometry::standard(0.25), ConfigError);
        CHECK_THROWS_AS(ScenarioGeometry::standard(20.5), ConfigError);
        CHECK_THROWS_AS(ScenarioGeometry::standard(1.3), ConfigError);
        CHECK_NOTHROW(ScenarioGeometry::standard(0.5));
    }
    SUBCASE("doppler bound over a long drive")
    {
        for (double dx : {0.5, 5.0, 20.0}) {
            const auto g = ScenarioGeometry::standard(dx);
            for (double t = 0.0; t < 30.0; t += 0.37)
                for (const auto& p : geometry_to_paths(g, t)) CHECK(std::abs(p.doppler_hz) <= g.max_doppler_hz() + 1e-9);
        }
    }
}

TEST_CASE("synthesize_scenario is continuous and deterministic")
{
    const auto g = ScenarioGeometry::standard(10.0);
    const auto a = synthesize_scenario(g, 0.1, 5e5, 20000, 5.12e-3);
    const auto b = synthesize_scenario(g, 0.1, 5e5, 20000, 5.12e-3);
    CHECK(a.samples == b.samples);
    double worst = 0.0;
    for (std::size_t i = 1; i < a.size(); ++i) worst = std::max(worst, std::abs(a.samples[i] - a.samples[i - 1]));
    // within a frame the step is <= 2 pi f_max / rate ~ 1e-3; frame boundaries add
    // the quasi-static curvature error (~ pi a T^2 / lambda), of the same order
    CHECK(worst < 5e-3);
}

TEST_CASE("apply_channel")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    std::vector<cplx> s(1000);
    for (auto& e : s) e = {n(rng), n(rng)};

    SUBCASE("identity channel")
    {
        const ChannelSeries c{std::vector<cplx>(s.size(), 1.0), 100.0, 0.0};
        CHECK(apply_channel(s, 100.0, c, 0.0, 1) == s);
    }
    SUBCASE("constant channel scales and rotates")
    {
        const cplx g = std::polar(2.0, pi / 3);
        const ChannelSeries c{std::vector<cplx>(s.size(), g), 100.0, 0.0};
        const auto y = apply_channel(s, 100.0, c, 0.0, 1);
        for (std::size_t i = 0; i < s.size(); ++i) CHECK(std::abs(y[i] - g * s[i]) < 1e-12);
    }
    SUBCASE("noise power")
    {
        const std::size_t len = 200000;
        const std::vector<cplx> zero(len);
        const ChannelSeries c{std::vector<cplx>(len, 1.0), 1.0, 0.0};
        const auto y = apply_channel(zero, 1.0, c, 0.37, 99);
        double p = 0.0;
        for (const auto& e : y) p += std::norm(e);
        CHECK(p / len == doctest::Approx(0.37).epsilon(0.05));
        CHECK(apply_channel(zero, 1.0, c, 0.37, 99) == y);
        CHECK(apply_channel(zero, 1.0, c, 0.37, 100) != y);
    }
    SUBCASE("mismatches")
    {
        const ChannelSeries c{std::vector<cplx>(s.size(), 1.0), 100.0, 0.0};
        CHECK_THROWS_AS(apply_channel(s, 200.0, c, 0.0, 1), ShapeError);
        CHECK_THROWS_AS(apply_channel(std::span(s).first(10), 100.0, c, 0.0, 1), ShapeError);
    }
}

TEST_CASE("block averaging")
{
    ChannelSeries s{{1.0, 3.0, cplx{0, 2}, cplx{0, 4}, 9.0}, 60.0, 1.0};
    const auto d = downsample_block_average(s, 2);
    CHECK(d.size() == 2);
    CHECK(d.sample_rate_hz == 30.0);
    CHECK(d.samples[0] == cplx{2.0, 0.0});
    CHECK(d.samples[1] == cplx{0.0, 3.0});
    CHECK(d.t0 == doctest::Approx(1.0 + 0.5 / 60.0));
}
