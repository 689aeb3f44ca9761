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
#include <span>
#include <vector>

#include "chanpred/channel.hpp"
#include "chanpred/polar.hpp"

namespace chanpred {

/// Zoomed spectral analysis settings. The zoom band [freq_start, freq_end]
/// is sampled at n_bins points, both ends included.
struct CztConfig {
    std::size_t window_frames{8};
    double analysis_rate_hz{500e3};
    double freq_start{-160.0};
    double freq_end{160.0};
    std::size_t n_bins{65};

    double bin_spacing() const noexcept { return (freq_end - freq_start) / static_cast<double>(n_bins - 1); }
    void validate() const;
    /// Throws ConfigError unless the band covers +-max_doppler_hz.
    void require_coverage(double max_doppler_hz) const;
};

struct Spectrum {
    std::vector<cplx> values;
    std::vector<double> freqs_hz;
};

struct SpectralPeak {
    std::size_t bin{0};
    double freq_hz{0.0};
    double magnitude{0.0};
    double phase_at_peak{0.0};
};

/// Symmetric Hann window, w[i] = (1 - cos(2 pi i / (n - 1))) / 2.
std::vector<double> hann(std::size_t n);

/// X(f) = sum_n x_n exp(-2 pi j f n / rate) on the configured zoom grid,
/// time origin at the first sample. Bluestein evaluation.
Spectrum czt(std::span<const cplx> x, double sample_rate_hz, const CztConfig& cfg);

/// Local maxima over 3-bin neighbourhoods above max/20, strongest first.
std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, std::size_t max_paths);

/// Hann-windowed path estimates with their time origin at the window centre
/// (sample index N/2): value_at(0) is the path's complex value there.
std::vector<PathParams> estimate_paths(std::span<const cplx> x, double sample_rate_hz, const CztConfig& cfg,
                                       std::size_t max_paths = 5);

struct TrackPoint {
    std::size_t frame{0};        ///< index of the newest frame in the window
    double center_time{0.0};     ///< absolute time of the window centre
    PathParams params;           ///< phase referenced to absolute time
    cplx value{0.0, 0.0};        ///< composed path value at center_time
    bool held{false};            ///< no matching peak this frame; last params carried
};

struct PathTrack {
    int id{0};
    std::vector<TrackPoint> points;

    std::size_t last_frame() const { return points.back().frame; }
};

enum class TrackEventKind { Birth, Death };

struct TrackEvent {
    std::size_t frame{0};
    int track_id{0};
    TrackEventKind kind{TrackEventKind::Birth};
};

struct SlidingEstimate {
    std::vector<PathTrack> tracks;
    std::vector<TrackEvent> events;
    std::size_t n_frames{0};
    double frame_len_s{0.0};
    double t0{0.0};  ///< start of frame 0
};

/// Slides a window of cfg.window_frames frames one frame at a time, estimates
/// paths in each window and links them into tracks by nearest frequency
/// (gate: 3 bins). A track with no match is held for one frame, then closed.
/// Channels sampled faster than the analysis rate are block-averaged first.
SlidingEstimate sliding_estimate(const ChannelSeries& channel, double frame_len_s, const CztConfig& cfg,
                                 std::size_t max_paths = 5);

}  // namespace chanpred
