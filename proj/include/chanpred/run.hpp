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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "chanpred/experiment.hpp"

namespace chanpred {

enum class Command { Synth, Separate, Predict, Ber, Sweep };

const char* to_string(Command c) noexcept;

struct SynthSettings {
    double t0{0.0};
    double duration_s{0.1};
    double sample_rate_hz{500e3};
    bool binary{false};
};

struct SweepSettings {
    std::vector<double> delta_x;
    std::vector<double> alpha{0.0, 1e-5, 1e-4, 5e-4, 1e-3, 2e-2};
    std::vector<PenaltyMode> modes{PenaltyMode::L1, PenaltyMode::GroupL21};
    std::vector<double> ebn0_db{0.0, 4.0, 8.0, 12.0, 16.0, 20.0, 24.0, 28.0};
    std::vector<Method> methods;
};

/// Everything a command needs. Defaults reproduce the reference setup; the
/// JSON form is documented in the README.
struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    std::uint64_t seed{1};
    std::optional<std::size_t> trials;  ///< unset: 101 for ber, 100 for sweep
    std::size_t workers{1};
    std::size_t trial_index{0};         ///< trial used by separate and predict
    std::string input;                  ///< separate: optional channel file
    Method method{MethodKind::Cvnn, PenaltyMode::L1, 5e-4};
    TrialConfig trial;
    SynthSettings synth;
    SweepSettings sweep;

    RunConfig();
    std::size_t trials_for(Command c) const;
    void validate() const;
};

/// Parses a config document or a run manifest (whose "config" member is
/// used). Errors are ConfigError with a "line N" anchor where possible.
RunConfig parse_run_config(std::string_view text);

/// Full resolved config as JSON text (round-trips through parse_run_config).
std::string run_config_to_json(const RunConfig& cfg);

/// Desk-scale preset: four delta_x values, 20 trials, five alphas.
void apply_quick(RunConfig& cfg);

struct CommandOutput {
    std::vector<std::filesystem::path> files;  ///< written files, manifest last
    std::string summary;                       ///< one human-readable line per result
};

/// Runs one command into `out_dir` (created if needed) and writes
/// manifest.json listing every output with its SHA-256.
CommandOutput run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace chanpred
