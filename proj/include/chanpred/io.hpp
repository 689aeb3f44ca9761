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

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "chanpred/channel.hpp"
#include "chanpred/comms.hpp"
#include "chanpred/path_separation.hpp"
#include "chanpred/predictor.hpp"

namespace chanpred {

/// Shortest-safe text form of a double ("%.17g"), so values round-trip exactly.
std::string format_real(double v);

void write_file(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

/// Lower-case hex SHA-256 of a byte string.
std::string sha256_hex(std::string_view bytes);

/// CSV with header `t,re,im`, one row per sample.
std::string channel_to_csv(const ChannelSeries& ch);
/// Little-endian f64 triples (t, re, im), no header.
std::string channel_to_binary(const ChannelSeries& ch);
/// Both readers infer the rate from the time column, which must be uniform.
ChannelSeries channel_from_csv(std::string_view text);
ChannelSeries channel_from_binary(std::string_view bytes);
/// Dispatches on the extension: `.bin` is binary, anything else CSV.
ChannelSeries read_channel(const std::filesystem::path& path);

/// `frame,track_id,a,f,phi,re,im`, ordered by frame then track id.
std::string tracks_to_csv(const SlidingEstimate& est);

/// `frame,ratio,delta`.
std::string sparsity_to_csv(std::span<const SparsityReport> trace);

struct PredictionRow {
    double t{0.0};
    cplx value{0.0, 0.0};
    int track_id{-1};  ///< -1 marks the recomposed channel
};

/// `t,re,im,track_id`.
std::string prediction_to_csv(std::span<const PredictionRow> rows);

/// `method,ebn0_db,errors,bits,ber`.
std::string ber_to_csv(std::span<const BerResult> rows);

/// Weight JSON: {"layers": [{"layer", "rows", "cols", "amplitude", "phase"}]},
/// amplitudes and phases row-major.
std::string weights_to_json(const LayerWeights& w1, const LayerWeights& w2);
std::pair<LayerWeights, LayerWeights> weights_from_json(std::string_view text);

/// Per-track predictor state (weights, input history, scale, trained flag).
std::string snapshot_to_json(const std::map<int, TrackPredictor>& tracks);
/// Rebuilds predictors with `cfg`; shapes must agree with the snapshot.
std::map<int, TrackPredictor> snapshot_from_json(std::string_view text, const PredictorConfig& cfg);

}  // namespace chanpred
