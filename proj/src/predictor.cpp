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

#include "chanpred/predictor.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>

#include "chanpred/error.hpp"

namespace chanpred {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept
{
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

void PredictorConfig::validate() const
{
    shape.validate();
    learn.validate();
    init.validate();
    if (!(amplitude_scale >= 0.0) || !std::isfinite(amplitude_scale)) throw ConfigError("amplitude_scale must be >= 0");
}

TrackPredictor::TrackPredictor(const PredictorConfig& cfg, std::uint64_t seed) : cfg_(cfg), scale_(cfg.amplitude_scale)
{
    cfg_.validate();
    std::mt19937_64 rng(seed);
    w1_ = random_layer(cfg_.shape.hidden_neurons, cfg_.shape.input_terminals, cfg_.init, rng);
    w2_ = random_layer(1, cfg_.shape.hidden_neurons, cfg_.init, rng);
}

std::vector<PolarComplex> TrackPredictor::network_inputs(const std::deque<cplx>& window) const
{
    // newest value feeds terminal 0
    const std::size_t n = cfg_.shape.input_terminals;
    std::vector<PolarComplex> z(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = PolarComplex::from_rect(window[window.size() - 1 - j] / scale_);
    return z;
}

UpdateResult TrackPredictor::online_update(cplx estimate)
{
    const std::size_t n = cfg_.shape.input_terminals;
    UpdateResult result;
    if (history_.size() >= n) {
        if (scale_ == 0.0) {
            double peak = std::abs(estimate);
            for (const auto& h : history_) peak = std::max(peak, std::abs(h));
            scale_ = peak > 0.0 ? 2.0 * peak : 1.0;
        }
        const auto inputs = network_inputs(history_);
        const std::vector<PolarComplex> teacher{PolarComplex::from_rect(estimate / scale_)};
        for (int r = 0; r < cfg_.learn.iterations; ++r) {
            const ForwardTrace tr = forward(cfg_.shape, w1_, w2_, inputs);
            const double e = loss(tr.output.outputs, teacher);
            if (r == 0) result.first_loss = e;
            result.last_loss = e;
            const auto hidden_teacher = bpts_teacher(w2_, teacher.front());
            w2_ = update_weights(w2_, tr.output, teacher, cfg_.learn);
            w1_ = update_weights(w1_, tr.hidden, hidden_teacher, cfg_.learn);
        }
        result.updated = true;
        trained_ = true;
    }
    history_.push_back(estimate);
    while (history_.size() > n) history_.pop_front();
    return result;
}

std::vector<cplx> TrackPredictor::predict(std::size_t steps) const
{
    if (!trained_) throw PreconditionError("predict: track has not been trained yet");
    std::deque<cplx> window = history_;
    std::vector<cplx> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        const ForwardTrace tr = forward(cfg_.shape, w1_, w2_, network_inputs(window));
        const cplx next = tr.prediction().rect() * scale_;
        out.push_back(next);
        window.push_back(next);
        window.pop_front();
    }
    return out;
}

void TrackPredictor::restore(LayerWeights w1, LayerWeights w2, std::deque<cplx> history, double scale, bool trained)
{
    if (w1.rows() != cfg_.shape.hidden_neurons || w1.cols() != cfg_.shape.input_terminals || w2.rows() != 1 ||
        w2.cols() != cfg_.shape.hidden_neurons)
        throw ShapeError("restore: weight shapes do not match the configuration");
    if (history.size() > cfg_.shape.input_terminals) throw ShapeError("restore: history longer than input_terminals");
    w1_ = std::move(w1);
    w2_ = std::move(w2);
    history_ = std::move(history);
    scale_ = scale;
    trained_ = trained;
}

SparsityReport nonzero_ratio(const LayerWeights& w1, const LayerWeights& w2)
{
    if (w2.rows() != 1 || w2.cols() != w1.rows()) throw ShapeError("nonzero_ratio: output layer must be 1 x hidden");
    auto live = [](const LayerWeights& w) {
        const double floor = std::max(w.max_amplitude() / 100.0, kNumericalZero);
        std::vector<bool> alive(w.size(), false);
        for (std::size_t i = 0; i < w.size(); ++i) alive[i] = w.entries()[i].amplitude >= floor;
        return alive;
    };
    const auto a1 = live(w1);
    const auto a2 = live(w2);

    SparsityReport r;
    r.total = w1.size() + w2.size();
    for (std::size_t k = 0; k < w1.rows(); ++k) {
        if (!a2[k]) continue;
        ++r.nonzero_output;
        for (std::size_t j = 0; j < w1.cols(); ++j) r.nonzero_hidden += a1[k * w1.cols() + j] ? 1 : 0;
    }
    r.ratio = r.total == 0 ? 0.0 : static_cast<double>(r.nonzero_hidden + r.nonzero_output) / static_cast<double>(r.total);
    return r;
}

SparsityReport pooled_ratio(std::span<const SparsityReport> parts)
{
    SparsityReport r;
    for (const auto& p : parts) {
        r.nonzero_hidden += p.nonzero_hidden;
        r.nonzero_output += p.nonzero_output;
        r.total += p.total;
    }
    r.ratio = r.total == 0 ? 0.0 : static_cast<double>(r.nonzero_hidden + r.nonzero_output) / static_cast<double>(r.total);
    return r;
}

cplx PathForecast::at(double t) const
{
    if (values.empty()) throw PreconditionError("PathForecast: no anchor values");
    const double s = (t - t_first) / step;
    if (s <= 0.0) return values.front();
    if (s >= static_cast<double>(values.size() - 1)) return values.back();
    const auto i = static_cast<std::size_t>(std::floor(s));
    const double frac = s - static_cast<double>(i);
    const PolarComplex a = PolarComplex::from_rect(values[i]);
    const PolarComplex b = PolarComplex::from_rect(values[i + 1]);
    const double amp = a.amplitude + frac * (b.amplitude - a.amplitude);
    const double pha = a.phase + frac * wrap_phase(b.phase - a.phase);
    return std::polar(amp, pha);
}

ChannelSeries recompose(std::span<const TrackPrediction> tracks)
{
    if (tracks.empty()) throw PreconditionError("recompose: no tracks");
    ChannelSeries out = tracks.front().series;
    for (std::size_t m = 1; m < tracks.size(); ++m) {
        const ChannelSeries& s = tracks[m].series;
        if (s.size() != out.size() || s.sample_rate_hz != out.sample_rate_hz || s.t0 != out.t0)
            throw ShapeError("recompose: track time axes are not aligned");
        for (std::size_t i = 0; i < s.size(); ++i) out.samples[i] += s.samples[i];
    }
    return out;
}

ChannelPredictor::ChannelPredictor(PredictorConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), seed_(seed)
{
    cfg_.validate();
}

TrackPredictor& ChannelPredictor::track(int track_id)
{
    auto it = tracks_.find(track_id);
    if (it == tracks_.end())
        it = tracks_.emplace(track_id, TrackPredictor(cfg_, mix_seed(seed_, static_cast<std::uint64_t>(track_id)))).first;
    return it->second;
}

UpdateResult ChannelPredictor::update(int track_id, cplx estimate) { return track(track_id).online_update(estimate); }

SparsityReport ChannelPredictor::sparsity() const
{
    std::vector<SparsityReport> parts;
    for (const auto& [id, t] : tracks_) parts.push_back(nonzero_ratio(t.hidden_weights(), t.output_weights()));
    return pooled_ratio(parts);
}

double complexity_probe(const NetworkShape& shape, const LearnConfig& cfg, std::size_t paths, std::size_t rounds,
                        std::uint64_t seed)
{
    PredictorConfig pc;
    pc.shape = shape;
    pc.learn = cfg;
    std::vector<TrackPredictor> preds;
    for (std::size_t m = 0; m < paths; ++m) {
        preds.emplace_back(pc, mix_seed(seed, m));
        for (std::size_t i = 0; i < shape.input_terminals; ++i)
            preds.back().online_update(std::polar(0.4, 0.3 * static_cast<double>(i + m)));
    }
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    for (std::size_t r = 0; r < rounds; ++r)
        for (std::size_t m = 0; m < paths; ++m)
            preds[m].online_update(std::polar(0.4, 0.3 * static_cast<double>(shape.input_terminals + r + m)));
    const std::chrono::duration<double> elapsed = clock::now() - start;
    return elapsed.count() / static_cast<double>(std::max<std::size_t>(rounds, 1));
}

}  // namespace chanpred
