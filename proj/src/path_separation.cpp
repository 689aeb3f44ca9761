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

#include "chanpred/path_separation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "chanpred/error.hpp"
#include "chanpred/fft.hpp"

namespace chanpred {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double kPeakFloorRatio = 20.0;
constexpr double kGateBins = 3.0;

/// exp(-2 pi j * cycles) with the integer part of `cycles` removed first.
/// Chirp arguments reach ~1e4 cycles, so the reduction runs in long double.
cplx unit_phasor_cycles(long double cycles)
{
    cycles -= std::floor(cycles);
    return std::polar(1.0, -two_pi * static_cast<double>(cycles));
}

}  // namespace

void CztConfig::validate() const
{
    if (window_frames < 1) throw ConfigError("czt.window_frames must be >= 1");
    if (!(analysis_rate_hz > 0.0)) throw ConfigError("czt.analysis_rate_hz must be > 0");
    if (!(freq_start < freq_end)) throw ConfigError("czt.freq_start must be < czt.freq_end");
    if (n_bins < 8) throw ConfigError("czt.n_bins must be >= 8");
}

void CztConfig::require_coverage(double max_doppler_hz) const
{
    if (freq_start > -max_doppler_hz || freq_end < max_doppler_hz)
        throw ConfigError("czt zoom band does not cover the maximum Doppler frequency");
}

std::vector<double> hann(std::size_t n)
{
    if (n == 0) throw std::invalid_argument("hann: n must be >= 1");
    if (n == 1) return {1.0};
    std::vector<double> w(n);
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(i) / denom));
    // exact symmetry
    for (std::size_t i = 0; i < n / 2; ++i) w[n - 1 - i] = w[i];
    return w;
}

Spectrum czt(std::span<const cplx> x, double sample_rate_hz, const CztConfig& cfg)
{
    cfg.validate();
    if (x.empty()) throw PreconditionError("czt: empty input");

    const std::size_t n = x.size();
    const std::size_t m = cfg.n_bins;
    const long double f0 = static_cast<long double>(cfg.freq_start) / sample_rate_hz;  // cycles per sample
    const long double df = (static_cast<long double>(cfg.freq_end) - cfg.freq_start) / (m - 1) / sample_rate_hz;
    const std::size_t len = next_pow2(n + m - 1);
    const Fft& fft = fft_for(len);

    // chirp(k) = exp(-j pi df k^2), k may be negative through symmetry
    auto chirp = [df](std::size_t k) {
        const auto kk = static_cast<long double>(k);
        return unit_phasor_cycles(0.5L * df * kk * kk);
    };

    std::vector<cplx> a(len, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i) {
        a[i] = x[i] * unit_phasor_cycles(f0 * static_cast<long double>(i)) * chirp(i);
    }
    std::vector<cplx> b(len, cplx{0.0, 0.0});
    for (std::size_t k = 0; k < m; ++k) b[k] = std::conj(chirp(k));
    for (std::size_t i = 1; i < n; ++i) b[len - i] = std::conj(chirp(i));

    fft.forward(a);
    fft.forward(b);
    for (std::size_t i = 0; i < len; ++i) a[i] *= b[i];
    fft.inverse(a);

    Spectrum s;
    s.values.resize(m);
    s.freqs_hz.resize(m);
    const double scale = 1.0 / static_cast<double>(len);
    for (std::size_t k = 0; k < m; ++k) {
        s.values[k] = a[k] * chirp(k) * scale;
        s.freqs_hz[k] = cfg.freq_start + static_cast<double>(k) * cfg.bin_spacing();
    }
    return s;
}

std::vector<SpectralPeak> find_peaks(const Spectrum& spectrum, std::size_t max_paths)
{
    const auto& v = spectrum.values;
    std::vector<double> mag(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) mag[k] = std::abs(v[k]);
    const double top = mag.empty() ? 0.0 : *std::max_element(mag.begin(), mag.end());
    if (!(top > 0.0)) return {};
    const double floor = top / kPeakFloorRatio;

    std::vector<SpectralPeak> peaks;
    for (std::size_t k = 1; k + 1 < v.size(); ++k) {
        if (mag[k] > mag[k - 1] && mag[k] >= mag[k + 1] && mag[k] >= floor)
            peaks.push_back({k, spectrum.freqs_hz[k], mag[k], std::arg(v[k])});
    }
    std::stable_sort(peaks.begin(), peaks.end(),
                     [](const SpectralPeak& a, const SpectralPeak& b) { return a.magnitude > b.magnitude; });
    if (peaks.size() > max_paths) peaks.resize(max_paths);
    return peaks;
}

std::vector<PathParams> estimate_paths(std::span<const cplx> x, double sample_rate_hz, const CztConfig& cfg,
                                       std::size_t max_paths)
{
    if (x.size() < 2) throw PreconditionError("estimate_paths: need at least two samples");
    const auto w = hann(x.size());
    std::vector<cplx> windowed(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) windowed[i] = x[i] * w[i];
    const double coherent_sum = std::accumulate(w.begin(), w.end(), 0.0);

    const Spectrum s = czt(windowed, sample_rate_hz, cfg);
    const double center = static_cast<double>(x.size() / 2) / sample_rate_hz;

    std::vector<PathParams> paths;
    for (const auto& p : find_peaks(s, max_paths)) {
        PathParams e;
        e.amplitude = p.magnitude / coherent_sum;
        e.doppler_hz = p.freq_hz;
        e.phase = wrap_phase(p.phase_at_peak + two_pi * std::fmod(p.freq_hz * center, 1.0));
        paths.push_back(e);
    }
    return paths;
}

SlidingEstimate sliding_estimate(const ChannelSeries& channel, double frame_len_s, const CztConfig& cfg,
                                 std::size_t max_paths)
{
    cfg.validate();
    if (!(frame_len_s > 0.0)) throw ConfigError("frame length must be > 0");

    ChannelSeries series = channel;
    const double ratio = channel.sample_rate_hz / cfg.analysis_rate_hz;
    if (std::abs(ratio - 1.0) > 1e-9) {
        const double factor = std::round(ratio);
        if (factor < 1.0 || std::abs(ratio - factor) > 1e-9)
            throw ConfigError("channel rate must be an integer multiple of the analysis rate");
        series = downsample_block_average(channel, static_cast<std::size_t>(factor));
    }

    const double rate = series.sample_rate_hz;
    const double frame_samples_f = frame_len_s * rate;
    const auto frame_samples = static_cast<std::size_t>(std::llround(frame_samples_f));
    if (frame_samples == 0 || std::abs(frame_samples_f - static_cast<double>(frame_samples)) > 1e-6)
        throw ConfigError("frame length must span a whole number of analysis samples");

    SlidingEstimate out;
    out.frame_len_s = frame_len_s;
    out.t0 = series.t0;
    out.n_frames = series.size() / frame_samples;
    if (out.n_frames < cfg.window_frames)
        throw PreconditionError("sliding_estimate: channel is shorter than one analysis window");

    const std::size_t window = cfg.window_frames * frame_samples;
    const double gate = kGateBins * cfg.bin_spacing();
    const double half_window = static_cast<double>(window / 2) / rate;

    struct Active {
        std::size_t track;  // index into out.tracks
        double freq;
        int missed{0};
    };
    std::vector<Active> active;
    int next_id = 0;

    for (std::size_t frame = cfg.window_frames - 1; frame < out.n_frames; ++frame) {
        const std::size_t start = (frame + 1 - cfg.window_frames) * frame_samples;
        const double tc = series.time(start) + half_window;
        const auto local = estimate_paths(std::span(series.samples).subspan(start, window), rate, cfg, max_paths);

        // candidate pairs within the gate, nearest first
        struct Pair {
            double dist;
            std::size_t a, p;
        };
        std::vector<Pair> pairs;
        for (std::size_t a = 0; a < active.size(); ++a)
            for (std::size_t p = 0; p < local.size(); ++p) {
                const double d = std::abs(active[a].freq - local[p].doppler_hz);
                if (d <= gate) pairs.push_back({d, a, p});
            }
        std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& x, const Pair& y) { return x.dist < y.dist; });

        std::vector<bool> track_used(active.size(), false), peak_used(local.size(), false);
        auto add_point = [&](std::size_t track, const PathParams& centred, bool held) {
            TrackPoint pt;
            pt.frame = frame;
            pt.center_time = tc;
            pt.params = centred;
            pt.params.phase = wrap_phase(centred.phase - two_pi * std::fmod(centred.doppler_hz * tc, 1.0));
            pt.value = centred.value_at(0.0);
            pt.held = held;
            out.tracks[track].points.push_back(pt);
        };

        for (const auto& pr : pairs) {
            if (track_used[pr.a] || peak_used[pr.p]) continue;
            track_used[pr.a] = peak_used[pr.p] = true;
            add_point(active[pr.a].track, local[pr.p], false);
            active[pr.a].freq = local[pr.p].doppler_hz;
            active[pr.a].missed = 0;
        }

        std::vector<Active> survivors;
        for (std::size_t a = 0; a < active.size(); ++a) {
            if (track_used[a]) {
                survivors.push_back(active[a]);
                continue;
            }
            if (active[a].missed == 0) {
                const TrackPoint& last = out.tracks[active[a].track].points.back();
                PathParams centred = last.params;
                centred.phase = wrap_phase(last.params.phase + two_pi * std::fmod(last.params.doppler_hz * tc, 1.0));
                add_point(active[a].track, centred, true);
                active[a].missed = 1;
                survivors.push_back(active[a]);
            } else {
                out.events.push_back({frame, out.tracks[active[a].track].id, TrackEventKind::Death});
            }
        }
        for (std::size_t p = 0; p < local.size(); ++p) {
            if (peak_used[p]) continue;
            out.tracks.push_back({next_id, {}});
            out.events.push_back({frame, next_id, TrackEventKind::Birth});
            ++next_id;
            add_point(out.tracks.size() - 1, local[p], false);
            survivors.push_back({out.tracks.size() - 1, local[p].doppler_hz, 0});
        }
        active = std::move(survivors);
    }
    return out;
}

}  // namespace chanpred
