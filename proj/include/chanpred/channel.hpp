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

#pragma once

#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "chanpred/polar.hpp"

namespace chanpred {

inline constexpr double kLightSpeed = 2.99792458e8;

/// One multipath component a * exp(j(2 pi f t + phi)).
struct PathParams {
    double amplitude{0.0};
    double doppler_hz{0.0};
    double phase{0.0};

    cplx value_at(double t) const noexcept;
    void validate() const;
    friend bool operator==(const PathParams&, const PathParams&) = default;
};

/// Uniformly sampled complex channel states; sample i is at t0 + i / rate.
struct ChannelSeries {
    std::vector<cplx> samples;
    double sample_rate_hz{1.0};
    double t0{0.0};

    std::size_t size() const noexcept { return samples.size(); }
    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) / sample_rate_hz; }
    void validate() const;
};

struct Vec2 {
    double x{0.0};
    double y{0.0};
};

/// Planar base station / mobile user / scatterer layout. The mobile user
/// moves in a straight line from `mu_initial` at `mu_speed` along
/// `mu_heading` (radians from the x axis).
struct ScenarioGeometry {
    Vec2 bs{0.0, 0.0};
    Vec2 mu_initial{100.0, 0.0};
    double mu_speed{12.0};
    double mu_heading{-std::numbers::pi / 6.0};
    std::vector<Vec2> scatterers;
    double carrier_hz{2e9};
    double delta_x{10.0};
    double light_speed{kLightSpeed};

    /// Default layout with two scatterers `delta_x` metres apart along x,
    /// the first 50 m from the user's start, 45 degrees right of its heading.
    static ScenarioGeometry standard(double delta_x);

    /// Re-places the two scatterers as in `standard`, keeping the rest of
    /// this geometry.
    void place_scatterers(double delta_x);

    Vec2 mu_position(double t) const noexcept;
    double max_doppler_hz() const noexcept { return carrier_hz / light_speed * mu_speed; }
    void validate() const;
};

/// f = (f_c / c) v cos(psi).
double doppler_frequency(double carrier_hz, double speed, double psi, double light_speed = kLightSpeed);

std::vector<cplx> synthesize_at(std::span<const PathParams> paths, std::span<const double> times);
ChannelSeries synthesize(std::span<const PathParams> paths, double t0, double sample_rate_hz, std::size_t n);

/// Line-of-sight path first, then one path per scatterer, evaluated for the
/// user position at time t. Phases are referenced to absolute time so that
/// PathParams::value_at(t) reproduces -2 pi L / lambda at t.
std::vector<PathParams> geometry_to_paths(const ScenarioGeometry& scenario, double t);

/// Channel over [t0, t0 + n / rate) with path parameters refreshed at every
/// frame boundary (frames counted from t = 0).
ChannelSeries synthesize_scenario(const ScenarioGeometry& scenario, double t0, double sample_rate_hz, std::size_t n,
                                  double frame_len_s);

/// y = c s + n with complex Gaussian noise of total power `noise_power`.
std::vector<cplx> apply_channel(std::span<const cplx> signal, double signal_rate_hz, const ChannelSeries& channel,
                                double noise_power, std::uint64_t seed);

/// Averages consecutive blocks of `factor` samples.
ChannelSeries downsample_block_average(const ChannelSeries& in, std::size_t factor);

}  // namespace chanpred
