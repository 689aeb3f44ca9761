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

#include "chanpred/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "chanpred/error.hpp"

namespace chanpred {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double kMinSeparation = 1e-3;

double distance(Vec2 a, Vec2 b) { return std::hypot(a.x - b.x, a.y - b.y); }

}  // namespace

cplx PathParams::value_at(double t) const noexcept
{
    return std::polar(amplitude, two_pi * doppler_hz * t + phase);
}

void PathParams::validate() const
{
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude) || !std::isfinite(doppler_hz) || !std::isfinite(phase))
        throw ConfigError("path parameters must be finite with amplitude >= 0");
}

void ChannelSeries::validate() const
{
    if (!(sample_rate_hz > 0.0) || !std::isfinite(sample_rate_hz)) throw ConfigError("sample rate must be > 0");
    for (const auto& s : samples)
        if (!std::isfinite(s.real()) || !std::isfinite(s.imag())) throw ConfigError("channel series has non-finite samples");
}

ScenarioGeometry ScenarioGeometry::standard(double delta_x)
{
    ScenarioGeometry g;
    g.place_scatterers(delta_x);
    return g;
}

void ScenarioGeometry::place_scatterers(double dx)
{
    const double steps = dx / 0.5;
    if (!(dx >= 0.5 && dx <= 20.0) || std::abs(steps - std::round(steps)) > 1e-9)
        throw ConfigError("delta_x must lie in [0.5, 20] m on a 0.5 m grid");
    delta_x = dx;
    // 50 m ahead, 45 degrees right of the heading: the LOS Doppler stays well apart
    // from the scattered pair, whose own separation grows with delta_x
    const double bearing = mu_heading - std::numbers::pi / 4.0;
    const Vec2 first{mu_initial.x + 50.0 * std::cos(bearing), mu_initial.y + 50.0 * std::sin(bearing)};
    scatterers = {first, {first.x + dx, first.y}};
}

Vec2 ScenarioGeometry::mu_position(double t) const noexcept
{
    return {mu_initial.x + mu_speed * t * std::cos(mu_heading), mu_initial.y + mu_speed * t * std::sin(mu_heading)};
}

void ScenarioGeometry::validate() const
{
    if (!(mu_speed >= 0.0) || !std::isfinite(mu_speed)) throw ConfigError("mu_speed must be >= 0");
    if (!(carrier_hz > 0.0)) throw ConfigError("carrier_hz must be > 0");
    if (!(light_speed > 0.0)) throw ConfigError("light_speed must be > 0");
}

double doppler_frequency(double carrier_hz, double speed, double psi, double light_speed)
{
    if (speed < 0.0) throw std::invalid_argument("doppler_frequency: speed must be >= 0");
    if (!(light_speed > 0.0)) throw std::invalid_argument("doppler_frequency: light speed must be > 0");
    return carrier_hz / light_speed * speed * std::cos(psi);
}

std::vector<cplx> synthesize_at(std::span<const PathParams> paths, std::span<const double> times)
{
    if (paths.empty()) throw PreconditionError("synthesize: at least one path is required");
    std::vector<cplx> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        cplx c{0.0, 0.0};
        for (const auto& p : paths) c += p.value_at(times[i]);
        out[i] = c;
    }
    return out;
}

ChannelSeries synthesize(std::span<const PathParams> paths, double t0, double sample_rate_hz, std::size_t n)
{
    ChannelSeries s{{}, sample_rate_hz, t0};
    std::vector<double> times(n);
    for (std::size_t i = 0; i < n; ++i) times[i] = s.time(i);
    s.samples = synthesize_at(paths, times);
    return s;
}

std::vector<PathParams> geometry_to_paths(const ScenarioGeometry& scenario, double t)
{
    scenario.validate();
    const Vec2 mu = scenario.mu_position(t);
    const double d_los = distance(scenario.bs, mu);
    if (d_los < kMinSeparation) throw DegenerateGeometryError("mobile user coincides with the base station");

    const double lambda = scenario.light_speed / scenario.carrier_hz;
    const Vec2 heading{std::cos(scenario.mu_heading), std::sin(scenario.mu_heading)};

    auto make_path = [&](Vec2 source, double length, double raw_amplitude) {
        const double d = distance(source, mu);
        const double cos_psi = (heading.x * (source.x - mu.x) + heading.y * (source.y - mu.y)) / d;
        PathParams p;
        p.amplitude = raw_amplitude;
        p.doppler_hz = doppler_frequency(scenario.carrier_hz, scenario.mu_speed, std::acos(std::clamp(cos_psi, -1.0, 1.0)),
                                         scenario.light_speed);
        const double cycles = std::fmod(length / lambda + p.doppler_hz * t, 1.0);
        p.phase = wrap_phase(-two_pi * cycles);
        return p;
    };

    std::vector<PathParams> paths;
    paths.push_back(make_path(scenario.bs, d_los, 1.0));
    for (const auto& s : scenario.scatterers) {
        const double leg = distance(s, mu);
        if (leg < kMinSeparation) throw DegenerateGeometryError("mobile user coincides with a scatterer");
        const double length = distance(scenario.bs, s) + leg;
        paths.push_back(make_path(s, length, 1.0 / std::max(1.0, length / d_los)));
    }

    double total = 0.0;
    for (const auto& p : paths) total += p.amplitude;
    for (auto& p : paths) p.amplitude /= total;
    return paths;
}

ChannelSeries synthesize_scenario(const ScenarioGeometry& scenario, double t0, double sample_rate_hz, std::size_t n,
                                  double frame_len_s)
{
    if (!(frame_len_s > 0.0)) throw ConfigError("frame length must be > 0");
    ChannelSeries s{std::vector<cplx>(n), sample_rate_hz, t0};
    long current_frame = std::numeric_limits<long>::min();
    std::vector<PathParams> paths;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = s.time(i);
        const long frame = static_cast<long>(std::floor(t / frame_len_s));
        if (frame != current_frame) {
            current_frame = frame;
            paths = geometry_to_paths(scenario, static_cast<double>(frame) * frame_len_s);
        }
        cplx c{0.0, 0.0};
        for (const auto& p : paths) c += p.value_at(t);
        s.samples[i] = c;
    }
    return s;
}

std::vector<cplx> apply_channel(std::span<const cplx> signal, double signal_rate_hz, const ChannelSeries& channel,
                                double noise_power, std::uint64_t seed)
{
    if (std::abs(signal_rate_hz - channel.sample_rate_hz) > 1e-9 * channel.sample_rate_hz)
        throw ShapeError("apply_channel: signal and channel sample rates differ");
    if (signal.size() != channel.size()) throw ShapeError("apply_channel: signal and channel lengths differ");
    if (!(noise_power >= 0.0)) throw std::invalid_argument("apply_channel: noise power must be >= 0");

    std::vector<cplx> y(signal.size());
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, std::sqrt(noise_power / 2.0));
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = channel.samples[i] * signal[i];
        if (noise_power > 0.0) {
            const double re = gauss(rng);
            const double im = gauss(rng);
            y[i] += cplx{re, im};
        }
    }
    return y;
}

ChannelSeries downsample_block_average(const ChannelSeries& in, std::size_t factor)
{
    if (factor == 0) throw std::invalid_argument("downsample: factor must be >= 1");
    ChannelSeries out;
    out.sample_rate_hz = in.sample_rate_hz / static_cast<double>(factor);
    // block centre
    out.t0 = in.t0 + 0.5 * static_cast<double>(factor - 1) / in.sample_rate_hz;
    const std::size_t blocks = in.size() / factor;
    out.samples.resize(blocks);
    for (std::size_t b = 0; b < blocks; ++b) {
        cplx acc{0.0, 0.0};
        for (std::size_t i = 0; i < factor; ++i) acc += in.samples[b * factor + i];
        out.samples[b] = acc / static_cast<double>(factor);
    }
    return out;
}

}  // namespace chanpred
