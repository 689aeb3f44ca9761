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
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chanpred/baselines.hpp"
#include "chanpred/channel.hpp"
#include "chanpred/comms.hpp"
#include "chanpred/path_separation.hpp"
#include "chanpred/predictor.hpp"

namespace chanpred {

enum class MethodKind { Perfect, NoPrediction, Linear, Ar, Gru, Cvnn };

/// A channel-compensation method. CVNN methods carry a penalty and alpha.
struct Method {
    MethodKind kind{MethodKind::Cvnn};
    PenaltyMode penalty{PenaltyMode::None};
    double alpha{0.0};

    /// perfect, no_prediction, linear, ar, gru, cvnn_none, cvnn_l1:<alpha>, cvnn_l21:<alpha>
    std::string label() const;
    static Method parse(const std::string& label);
    bool needs_estimates() const noexcept { return kind == MethodKind::Ar || kind == MethodKind::Gru || kind == MethodKind::Cvnn; }
    friend bool operator==(const Method&, const Method&) = default;
};

/// One trial observes `burn_in_frames` sliding-window estimates and then
/// predicts the next TDD frame.
inline PredictorConfig default_trial_predictor()
{
    PredictorConfig pc;
    pc.learn.kappa1 = 0.1;
    pc.learn.kappa2 = 0.1;
    return pc;
}

struct TrialConfig {
    ScenarioGeometry scenario{ScenarioGeometry::standard(10.0)};
    /// Non-empty: stationary synthetic paths replace the geometry.
    std::vector<PathParams> explicit_paths;
    double trial_spacing_s{0.1};
    std::size_t burn_in_frames{120};
    CztConfig czt;
    std::size_t max_paths{5};
    /// Finite values add complex white noise to the observed channel.
    double estimation_snr_db{std::numeric_limits<double>::infinity()};
    /// Learning steps raised from the library default so tracks converge
    /// within the burn-in.
    PredictorConfig predictor{default_trial_predictor()};
    GruConfig gru;
    std::size_t ar_order{4};
    std::size_t ar_history{30};
    OfdmConfig ofdm;

    double frame_s() const noexcept { return ofdm.frame_duration_s(); }
    std::size_t observed_frames() const noexcept { return burn_in_frames + czt.window_frames - 1; }
    void validate() const;
};

/// Exact channel used as ground truth (paths refreshed per frame for geometry).
ChannelSeries true_channel(const TrialConfig& cfg, double t0, double sample_rate_hz, std::size_t n);

struct Observation {
    std::size_t trial{0};
    double t_begin{0.0};       ///< start of observed frame 0
    double target_start{0.0};  ///< start of the predicted frame
    ChannelSeries observed;    ///< analysis-rate channel seen by the estimator
    SlidingEstimate estimate;
};

Observation observe(const TrialConfig& cfg, std::size_t trial, std::uint64_t trial_seed, bool run_estimator = true);

/// Predicted channel: per-path forecasts, paths extrapolated from their last
/// estimated parameters, and a rectangular linear term
/// offset + slope * (t - t_ref).
struct ChannelForecast {
    std::vector<PathForecast> paths;
    std::vector<PathParams> extrapolated;
    cplx offset{0.0, 0.0};
    cplx slope_per_s{0.0, 0.0};
    double t_ref{0.0};

    cplx at(double t) const;
};

struct MethodRun {
    ChannelForecast forecast;
    SparsityReport sparsity;             ///< CVNN only: pooled over live tracks after the last update
    std::vector<SparsityReport> trace;   ///< CVNN only, when requested: one report per observed frame
    double phase_error{0.0};             ///< sum of |wrapped phase error| over the target frame
    std::map<int, TrackPredictor> networks;  ///< CVNN only, when requested: live networks at the end
};

/// Trains the method on the observation and forecasts the target frame.
/// Not valid for Method::Perfect.
MethodRun run_method(const TrialConfig& cfg, const Observation& obs, const Method& method, std::uint64_t trial_seed,
                     bool keep_trace = false);

/// Accumulated phase error over the target frame at the analysis rate.
double accumulated_phase_error(const TrialConfig& cfg, const Observation& obs, const ChannelForecast& fc);

struct LinkCounts {
    std::uint64_t errors{0};
    std::uint64_t bits{0};
    double matched_bound{0.0};  ///< sum over symbols of Q(sqrt(2 |c|^2 Eb/N0)), per bit pair
    std::uint64_t symbols{0};
};

/// BER of the target frame. `forecast == nullptr` compensates with the true
/// channel. Bits and noise depend only on `link_seed`, so methods sharing a
/// seed see identical transmissions.
std::vector<LinkCounts> frame_link(const TrialConfig& cfg, const Observation& obs, const ChannelForecast* forecast,
                                   std::span<const double> ebn0_db, std::uint64_t link_seed);

/// Monte-Carlo BER over `trials` trials for every method.
std::vector<BerResult> ber_curve(const TrialConfig& cfg, std::span<const Method> methods, std::span<const double> ebn0_db,
                                 std::size_t trials, std::uint64_t seed, std::size_t workers = 1,
                                 std::vector<double>* matched_bound = nullptr);

struct SweepRow {
    double delta_x{0.0};
    PenaltyMode penalty{PenaltyMode::None};
    double alpha{0.0};
    std::size_t trial{0};
    double ratio{0.0};
    double phase_error{0.0};
};

struct SweepSummary {
    PenaltyMode penalty{PenaltyMode::None};
    double alpha{0.0};
    double mean_ratio{0.0};
    double max_phase_error{0.0};
};

/// Sparsity / phase-error sweep over delta_x, penalty modes and alphas.
/// alpha = 0 is trained once per trial and reported under every mode.
std::vector<SweepRow> sparsity_sweep(const TrialConfig& base, std::span<const double> delta_x,
                                     std::span<const PenaltyMode> modes, std::span<const double> alphas,
                                     std::size_t trials, std::uint64_t seed, std::size_t workers = 1);

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows);

/// Runs f(i) for i in [0, n) on up to `workers` threads.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& f);

}  // namespace chanpred
