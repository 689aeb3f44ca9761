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

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "chanpred/error.hpp"
#include "chanpred/io.hpp"
#include "chanpred/run.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

int fail(int code, const std::string& msg)
{
    std::fprintf(stderr, "chanpred: %s: %s\n", code == kConfigError ? "config error" : "error", msg.c_str());
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Online sparse complex-valued network channel prediction experiments"};
    app.fallthrough();
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> trials;
    std::optional<std::size_t> workers;
    std::string input;
    std::string out_dir = "out";
    bool quick = false;

    app.add_option("--config", config_path, "JSON run config or a previous manifest.json");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
    app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    app.add_option("--out", out_dir, "output directory");
    app.add_flag("--quick", quick, "desk-scale preset (4 delta_x values, 20 trials, 5 alphas)");

    const std::pair<const char*, chanpred::Command> commands[] = {
        {"synth", chanpred::Command::Synth},     {"separate", chanpred::Command::Separate},
        {"predict", chanpred::Command::Predict}, {"ber", chanpred::Command::Ber},
        {"sweep", chanpred::Command::Sweep}};
    const char* help[] = {"synthesize the channel (channel.csv or channel.bin)", "CZT path separation (tracks.csv)",
                          "online prediction of one trial (prediction.csv, sparsity.csv, state.json)",
                          "Monte-Carlo BER curves (ber.csv, ber_bound.csv)",
                          "delta_x x alpha sparsity and phase-error sweep plus BER tables"};
    std::optional<chanpred::Command> chosen;
    for (std::size_t i = 0; i < 5; ++i) {
        auto* sub = app.add_subcommand(commands[i].first, help[i]);
        const auto cmd = commands[i].second;
        sub->callback([&chosen, cmd] { chosen = cmd; });
        if (cmd == chanpred::Command::Separate) sub->add_option("--input", input, "channel file (.csv or .bin) to separate");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    chanpred::RunConfig cfg;
    try {
        if (!config_path.empty()) {
            std::string text;
            try {
                text = chanpred::read_file(config_path);
            } catch (const chanpred::IoError& e) {
                return fail(kConfigError, e.what());
            }
            cfg = chanpred::parse_run_config(text);
        }
        if (quick) chanpred::apply_quick(cfg);
        if (seed) cfg.seed = *seed;
        if (trials) cfg.trials = *trials;
        if (workers) cfg.workers = *workers;
        if (!input.empty()) cfg.input = input;
        cfg.validate();
    } catch (const chanpred::ConfigError& e) {
        return fail(kConfigError, e.what());
    }

    try {
        const auto result = chanpred::run_command(*chosen, cfg, out_dir);
        std::fputs(result.summary.c_str(), stdout);
        for (const auto& f : result.files) std::printf("wrote %s\n", f.string().c_str());
    } catch (const chanpred::ConfigError& e) {
        return fail(kConfigError, e.what());
    } catch (const std::exception& e) {
        return fail(kRuntimeError, e.what());
    }
    return kOk;
}
