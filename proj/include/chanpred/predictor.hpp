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
#include <deque>
#include <map>
#include <span>
#include <vector>

#include "chanpred/channel.hpp"
#include "chanpred/cvnn.hpp"

namespace chanpred {

struct PredictorConfig {
    NetworkShape shape;
    LearnConfig learn;
    WeightInit init;
    /// Path values are divided by this before entering the network. Zero
    /// selects twice the largest magnitude seen when training starts.
    double amplitude_scale{0.0};

    void validate() const;
};

struct UpdateResult {
    bool updated{false};      ///< false while the history is still filling
    double first_loss{0.0};   ///< loss before the first iteration
    double last_loss{0.0};    ///< loss before the final iteration
};

/// Online CVNN for one separated path. Weights are warm-started across
/// updates; the input history holds the last I_ML path estimates.
class TrackPredictor {
public:
    TrackPredictor(const PredictorConfig& cfg, std::uint64_t seed);

    /// Trains on `estimate` as the teacher for the current history, then
    /// appends it to the history.
    UpdateResult online_update(cplx estimate);

    /// Iterated one-step-ahead prediction with self-feedback.
    std::vector<cplx> predict(std::size_t steps) const;

    bool trained() const noexcept { return trained_; }
    double scale() const noexcept { return scale_; }
    const PredictorConfig& config() const noexcept { return cfg_; }
    const LayerWeights& hidden_weights() const noexcept { return w1_; }
    const LayerWeights& output_weights() const noexcept { return w2_; }
    const std::deque<cplx>& history() const noexcept { return history_; }

    /// Restores a snapshot; shapes must match the configuration.
    void restore(LayerWeights w1, LayerWeights w2, std::deque<cplx> history, double scale, bool trained);

private:
    std::vector<PolarComplex> network_inputs(const std::deque<cplx>& window) const;

    PredictorConfig cfg_;
    LayerWeights w1_;
    LayerWeights w2_;
    std::deque<cplx> history_;
    double scale_{0.0};
    bool trained_{false};
};

/// Non-zero connection count: |w| >= max|W_l| / 100 per layer, and a zero
/// output weight zeroes every hidden weight feeding that neuron.
struct SparsityReport {
    std::size_t frame{0};
    double ratio{0.0};
    std::size_t nonzero_hidden{0};
    std::size_t nonzero_output{0};
    std::size_t total{0};
    double delta{0.0};  ///< ratio minus the previous frame's ratio
};

/// Amplitudes below this count as zero regardless of the layer maximum, so a
/// network collapsed to round-off level is not reported as dense.
inline constexpr double kNumericalZero = 1e-9;

/// A weight is live when its amplitude is at least max(layer max / 100,
/// kNumericalZero). A dead output weight k also kills hidden row k.
SparsityReport nonzero_ratio(const LayerWeights& w1, const LayerWeights& w2);

/// Pools the counts of several networks into one report.
SparsityReport pooled_ratio(std::span<const SparsityReport> parts);

/// Values at t_first + i * step, interpolated in polar form between anchors
/// (amplitude linear, phase along the shorter arc) and clamped at the ends.
struct PathForecast {
    double t_first{0.0};
    double step{1.0};
    std::vector<cplx> values;

    cplx at(double t) const;
};

struct TrackPrediction {
    int track_id{0};
    ChannelSeries series;
};

/// Sum of the per-track predictions; all series must share one time axis.
ChannelSeries recompose(std::span<const TrackPrediction> tracks);

/// A set of TrackPredictors keyed by track id, created on first use.
class ChannelPredictor {
public:
    ChannelPredictor(PredictorConfig cfg, std::uint64_t seed);

    UpdateResult update(int track_id, cplx estimate);
    TrackPredictor& track(int track_id);
    const std::map<int, TrackPredictor>& tracks() const noexcept { return tracks_; }
    void drop(int track_id) { tracks_.erase(track_id); }

    /// Pooled sparsity over every track network, trained or not.
    SparsityReport sparsity() const;

private:
    PredictorConfig cfg_;
    std::uint64_t seed_;
    std::map<int, TrackPredictor> tracks_;
};

/// Mean wall time (seconds) of one online_update round over `paths`
/// independent tracks.
double complexity_probe(const NetworkShape& shape, const LearnConfig& cfg, std::size_t paths, std::size_t rounds = 20,
                        std::uint64_t seed = 1);

/// splitmix64 mixing for deriving independent stream seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace chanpred
