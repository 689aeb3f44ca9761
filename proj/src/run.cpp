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

#include "chanpred/run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>

#include <json.hpp>

#include "chanpred/error.hpp"
#include "chanpred/io.hpp"

namespace chanpred {

using nlohmann::json;
using ordered = nlohmann::ordered_json;

const char* to_string(Command c) noexcept
{
    switch (c) {
    case Command::Synth: return "synth";
    case Command::Separate: return "separate";
    case Command::Predict: return "predict";
    case Command::Ber: return "ber";
    case Command::Sweep: return "sweep";
    }
    return "?";
}

RunConfig::RunConfig()
{
    for (int i = 1; i <= 40; ++i) sweep.delta_x.push_back(0.5 * i);
    for (const char* m : {"perfect", "no_prediction", "linear", "ar", "gru", "cvnn_l1:0.0005", "cvnn_l21:0.0005"})
        sweep.methods.push_back(Method::parse(m));
}

std::size_t RunConfig::trials_for(Command c) const
{
    if (trials) return *trials;
    return c == Command::Ber ? 101 : c == Command::Sweep ? 100 : 1;
}

void RunConfig::validate() const
{
    if (trials && *trials == 0) throw ConfigError("trials must be >= 1");
    if (workers == 0) throw ConfigError("workers must be >= 1");
    trial.validate();
    if (trial.explicit_paths.empty()) trial.czt.require_coverage(trial.scenario.max_doppler_hz());
    if (!(synth.duration_s > 0.0) || !(synth.sample_rate_hz > 0.0)) throw ConfigError("synth duration and rate must be > 0");
    if (sweep.delta_x.empty() || sweep.alpha.empty() || sweep.modes.empty())
        throw ConfigError("sweep lists delta_x, alpha and modes must not be empty");
    for (const double d : sweep.delta_x) ScenarioGeometry{}.place_scatterers(d);
    for (const double a : sweep.alpha)
        if (!(a >= 0.0)) throw ConfigError("sweep alphas must be >= 0");
    for (const double e : sweep.ebn0_db)
        if (!std::isfinite(e)) throw ConfigError("sweep ebn0_db values must be finite");
    for (const auto m : sweep.modes)
        if (m == PenaltyMode::None) throw ConfigError("sweep modes must be l1 or l21");
}

namespace {

std::size_t line_of(std::string_view text, const std::vector<std::string>& path)
{
    std::size_t pos = 0;
    for (const auto& key : path) {
        const std::string quoted = "\"" + key + "\"";
        const auto hit = text.find(quoted, pos);
        if (hit == std::string_view::npos) return 0;
        pos = hit + quoted.size();
    }
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) + 1;
}

/// Reads one JSON object, rejecting unknown members and anchoring errors to
/// the line of the offending key.
class Section {
public:
    Section(const json& j, std::vector<std::string> path, std::string_view text) : j_(j), path_(std::move(path)), text_(text)
    {
        if (!j_.is_object()) fail({}, "must be an object");
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const
    {
        auto p = path_;
        if (!key.empty()) p.push_back(key);
        std::string name;
        for (const auto& s : p) name += (name.empty() ? "" : ".") + s;
        const std::size_t line = line_of(text_, p);
        throw ConfigError((line ? "line " + std::to_string(line) + ": " : std::string()) + (name.empty() ? "config" : name) +
                          ": " + msg);
    }

    bool has(const char* key)
    {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void get(const char* key, T& out)
    {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            fail(key, "has the wrong type");
        }
    }

    Section sub(const char* key)
    {
        seen_.insert(key);
        auto p = path_;
        p.push_back(key);
        return Section(j_.at(key), p, text_);
    }

    const json& raw(const char* key)
    {
        seen_.insert(key);
        return j_.at(key);
    }

    /// Runs a validator, re-throwing its ConfigError at this section's line.
    void check(const std::function<void()>& f) const
    {
        try {
            f();
        } catch (const ConfigError& e) {
            fail({}, e.what());
        }
    }

    void finish() const
    {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(k, "unknown key");
    }

private:
    const json& j_;
    std::vector<std::string> path_;
    std::string_view text_;
    std::set<std::string> seen_;
};

Vec2 read_vec(Section& s, const char* key, Vec2 v)
{
    std::vector<double> xy{v.x, v.y};
    s.get(key, xy);
    if (xy.size() != 2) s.fail(key, "must be [x, y]");
    return {xy[0], xy[1]};
}

void read_scenario(Section s, TrialConfig& t)
{
    std::string kind = "geometry";
    s.get("kind", kind);
    if (kind == "geometry") {
        ScenarioGeometry& g = t.scenario;
        double dx = g.delta_x;
        s.get("delta_x", dx);
        g.bs = read_vec(s, "bs", g.bs);
        g.mu_initial = read_vec(s, "mu_initial", g.mu_initial);
        s.get("mu_speed", g.mu_speed);
        s.get("mu_heading", g.mu_heading);
        s.get("carrier_hz", g.carrier_hz);
        s.check([&] {
            g.place_scatterers(dx);
            g.validate();
        });
        t.explicit_paths.clear();
    } else if (kind == "paths") {
        if (!s.has("paths")) s.fail("paths", "required for kind 'paths'");
        const json& arr = s.raw("paths");
        if (!arr.is_array() || arr.empty()) s.fail("paths", "must be a non-empty array");
        t.explicit_paths.clear();
        for (const auto& p : arr) {
            Section ps(p, {"scenario", "paths"}, {});
            PathParams pp;
            ps.get("amplitude", pp.amplitude);
            ps.get("doppler_hz", pp.doppler_hz);
            ps.get("phase", pp.phase);
            ps.finish();
            t.explicit_paths.push_back(pp);
        }
        s.check([&] {
            for (const auto& p : t.explicit_paths) p.validate();
        });
    } else {
        s.fail("kind", "must be 'geometry' or 'paths'");
    }
    s.finish();
}

template <class T, class F>
std::vector<T> read_list(Section& s, const char* key, std::vector<T> current, F convert)
{
    if (!s.has(key)) return current;
    std::vector<std::string> names;
    s.get(key, names);
    std::vector<T> out;
    try {
        for (const auto& n : names) out.push_back(convert(n));
    } catch (const ConfigError& e) {
        s.fail(key, e.what());
    }
    return out;
}

RunConfig parse_document(const json& root, std::string_view text)
{
    RunConfig cfg;
    Section s(root, {}, text);
    int version = 0;
    if (!s.has("schema_version")) s.fail("schema_version", "is required");
    s.get("schema_version", version);
    if (version != RunConfig::kSchemaVersion) s.fail("schema_version", "must be " + std::to_string(RunConfig::kSchemaVersion));

    s.get("seed", cfg.seed);
    if (s.has("trials") && !root.at("trials").is_null()) {
        std::size_t n = 0;
        s.get("trials", n);
        cfg.trials = n;
    }
    s.get("workers", cfg.workers);
    s.get("trial_index", cfg.trial_index);
    s.get("input", cfg.input);
    if (s.has("method")) {
        std::string m;
        s.get("method", m);
        s.check([&] { cfg.method = Method::parse(m); });
    }
    if (s.has("scenario")) read_scenario(s.sub("scenario"), cfg.trial);

    if (s.has("trial")) {
        Section t = s.sub("trial");
        TrialConfig& tc = cfg.trial;
        t.get("trial_spacing_s", tc.trial_spacing_s);
        t.get("burn_in_frames", tc.burn_in_frames);
        if (t.has("estimation_snr_db")) {
            const json& v = t.raw("estimation_snr_db");
            if (v.is_null())
                tc.estimation_snr_db = std::numeric_limits<double>::infinity();
            else
                t.get("estimation_snr_db", tc.estimation_snr_db);
        }
        t.get("max_paths", tc.max_paths);
        t.get("ar_order", tc.ar_order);
        t.get("ar_history", tc.ar_history);
        t.finish();
    }
    if (s.has("czt")) {
        Section c = s.sub("czt");
        CztConfig& z = cfg.trial.czt;
        c.get("window_frames", z.window_frames);
        c.get("analysis_rate_hz", z.analysis_rate_hz);
        c.get("freq_start", z.freq_start);
        c.get("freq_end", z.freq_end);
        c.get("n_bins", z.n_bins);
        c.check([&] { z.validate(); });
        c.finish();
    }
    if (s.has("network")) {
        Section n = s.sub("network");
        PredictorConfig& p = cfg.trial.predictor;
        n.get("input_terminals", p.shape.input_terminals);
        n.get("hidden_neurons", p.shape.hidden_neurons);
        n.get("kappa1", p.learn.kappa1);
        n.get("kappa2", p.learn.kappa2);
        n.get("iterations", p.learn.iterations);
        n.get("amplitude_scale", p.amplitude_scale);
        n.get("init_amplitude_min", p.init.amplitude_min);
        n.get("init_amplitude_max", p.init.amplitude_max);
        n.get("init_fan_in_scaled", p.init.fan_in_scaled);
        n.check([&] { p.validate(); });
        n.finish();
    }
    if (s.has("gru")) {
        Section g = s.sub("gru");
        GruConfig& gc = cfg.trial.gru;
        g.get("hidden", gc.hidden);
        g.get("history", gc.history);
        g.get("learning_rate", gc.learning_rate);
        g.get("epochs", gc.epochs);
        g.get("amplitude_scale", gc.amplitude_scale);
        g.check([&] { gc.validate(); });
        g.finish();
    }
    if (s.has("synth")) {
        Section y = s.sub("synth");
        y.get("t0", cfg.synth.t0);
        y.get("duration_s", cfg.synth.duration_s);
        y.get("sample_rate_hz", cfg.synth.sample_rate_hz);
        std::string format = cfg.synth.binary ? "binary" : "csv";
        y.get("format", format);
        if (format != "csv" && format != "binary") y.fail("format", "must be 'csv' or 'binary'");
        cfg.synth.binary = format == "binary";
        y.finish();
    }
    if (s.has("sweep")) {
        Section w = s.sub("sweep");
        w.get("delta_x", cfg.sweep.delta_x);
        w.get("alpha", cfg.sweep.alpha);
        w.get("ebn0_db", cfg.sweep.ebn0_db);
        cfg.sweep.modes = read_list(w, "modes", cfg.sweep.modes, [](const std::string& n) { return penalty_mode_from_string(n); });
        cfg.sweep.methods = read_list(w, "methods", cfg.sweep.methods, [](const std::string& n) { return Method::parse(n); });
        w.check([&] {
            if (cfg.sweep.delta_x.empty() || cfg.sweep.alpha.empty() || cfg.sweep.modes.empty())
                throw ConfigError("delta_x, alpha and modes must not be empty");
        });
        w.finish();
    }
    s.finish();
    s.check([&] { cfg.validate(); });
    return cfg;
}

}  // namespace

RunConfig parse_run_config(std::string_view text)
{
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
        const auto upto = text.substr(0, std::min(byte, text.size()));
        const auto line = static_cast<std::size_t>(std::count(upto.begin(), upto.end(), '\n')) + 1;
        throw ConfigError("line " + std::to_string(line) + ": JSON syntax error");
    }
    if (root.is_object() && root.contains("config") && root.contains("outputs")) {
        // a run manifest: replay its resolved config
        return parse_document(root.at("config"), text);
    }
    return parse_document(root, text);
}

namespace {

ordered config_json(const RunConfig& c)
{
    ordered j;
    j["schema_version"] = RunConfig::kSchemaVersion;
    j["seed"] = c.seed;
    j["trials"] = c.trials ? ordered(*c.trials) : ordered(nullptr);
    j["workers"] = c.workers;
    j["trial_index"] = c.trial_index;
    j["input"] = c.input;
    j["method"] = c.method.label();
    const TrialConfig& t = c.trial;
    if (t.explicit_paths.empty()) {
        const ScenarioGeometry& g = t.scenario;
        j["scenario"] = ordered{{"kind", "geometry"},           {"delta_x", g.delta_x},
                                {"bs", {g.bs.x, g.bs.y}},       {"mu_initial", {g.mu_initial.x, g.mu_initial.y}},
                                {"mu_speed", g.mu_speed},       {"mu_heading", g.mu_heading},
                                {"carrier_hz", g.carrier_hz}};
    } else {
        ordered paths = ordered::array();
        for (const auto& p : t.explicit_paths)
            paths.push_back(ordered{{"amplitude", p.amplitude}, {"doppler_hz", p.doppler_hz}, {"phase", p.phase}});
        j["scenario"] = ordered{{"kind", "paths"}, {"paths", paths}};
    }
    j["trial"] = ordered{{"trial_spacing_s", t.trial_spacing_s},
                         {"burn_in_frames", t.burn_in_frames},
                         {"estimation_snr_db", std::isfinite(t.estimation_snr_db) ? ordered(t.estimation_snr_db) : ordered(nullptr)},
                         {"max_paths", t.max_paths},
                         {"ar_order", t.ar_order},
                         {"ar_history", t.ar_history}};
    j["czt"] = ordered{{"window_frames", t.czt.window_frames},
                       {"analysis_rate_hz", t.czt.analysis_rate_hz},
                       {"freq_start", t.czt.freq_start},
                       {"freq_end", t.czt.freq_end},
                       {"n_bins", t.czt.n_bins}};
    const PredictorConfig& p = t.predictor;
    j["network"] = ordered{{"input_terminals", p.shape.input_terminals},
                           {"hidden_neurons", p.shape.hidden_neurons},
                           {"kappa1", p.learn.kappa1},
                           {"kappa2", p.learn.kappa2},
                           {"iterations", p.learn.iterations},
                           {"amplitude_scale", p.amplitude_scale},
                           {"init_amplitude_min", p.init.amplitude_min},
                           {"init_amplitude_max", p.init.amplitude_max},
                           {"init_fan_in_scaled", p.init.fan_in_scaled}};
    j["gru"] = ordered{{"hidden", t.gru.hidden},
                       {"history", t.gru.history},
                       {"learning_rate", t.gru.learning_rate},
                       {"epochs", t.gru.epochs},
                       {"amplitude_scale", t.gru.amplitude_scale}};
    j["synth"] = ordered{{"t0", c.synth.t0},
                         {"duration_s", c.synth.duration_s},
                         {"sample_rate_hz", c.synth.sample_rate_hz},
                         {"format", c.synth.binary ? "binary" : "csv"}};
    ordered modes = ordered::array(), methods = ordered::array();
    for (const auto m : c.sweep.modes) modes.push_back(to_string(m));
    for (const auto& m : c.sweep.methods) methods.push_back(m.label());
    j["sweep"] = ordered{{"delta_x", c.sweep.delta_x},
                         {"alpha", c.sweep.alpha},
                         {"modes", modes},
                         {"ebn0_db", c.sweep.ebn0_db},
                         {"methods", methods}};
    return j;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) { return config_json(cfg).dump(2) + "\n"; }

void apply_quick(RunConfig& cfg)
{
    cfg.sweep.delta_x = {0.5, 5.0, 10.0, 20.0};
    cfg.sweep.alpha = {0.0, 1e-4, 5e-4, 1e-3, 2e-2};
    cfg.sweep.ebn0_db = {0.0, 10.0, 20.0};
    cfg.trials = 20;
}

namespace {

class OutputDir {
public:
    explicit OutputDir(std::filesystem::path dir) : dir_(std::move(dir))
    {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    void write(const std::string& name, const std::string& content)
    {
        const auto path = dir_ / name;
        write_file(path, content);
        files_.push_back(path);
        ordered entry{{"file", name}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}};
        outputs_.push_back(entry);
    }

    void finish(Command cmd, const RunConfig& cfg, CommandOutput& out)
    {
        ordered m;
        m["tool"] = "chanpred";
        m["command"] = to_string(cmd);
        m["seed"] = cfg.seed;
        m["trials"] = cfg.trials_for(cmd);
        m["config"] = config_json(cfg);
        m["outputs"] = outputs_;
        const auto path = dir_ / "manifest.json";
        write_file(path, m.dump(2) + "\n");
        files_.push_back(path);
        out.files = files_;
    }

private:
    std::filesystem::path dir_;
    std::vector<std::filesystem::path> files_;
    ordered outputs_ = ordered::array();
};

std::string line(const char* fmt, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return std::string(buf) + "\n";
}

/// Tables with one row per delta_x and one column per alpha.
std::string axis_table(const std::vector<SweepRow>& rows, const SweepSettings& sw, PenaltyMode mode, bool ratio)
{
    std::string out = "delta_x";
    for (const double a : sw.alpha) out += ",alpha=" + format_real(a);
    out += "\n";
    for (const double dx : sw.delta_x) {
        out += format_real(dx);
        for (const double a : sw.alpha) {
            double acc = 0.0;
            std::size_t n = 0;
            for (const auto& r : rows) {
                if (r.delta_x != dx || r.penalty != mode || r.alpha != a) continue;
                acc = ratio ? acc + r.ratio : std::max(acc, r.phase_error);
                ++n;
            }
            out += "," + format_real(ratio && n ? acc / static_cast<double>(n) : acc);
        }
        out += "\n";
    }
    return out;
}

void run_ber(const RunConfig& cfg, const std::vector<Method>& methods, const std::vector<double>& ebn0, std::size_t trials,
             OutputDir& dir, CommandOutput& out)
{
    std::vector<Method> ms = methods;
    if (ms.empty() || ms.front().kind != MethodKind::Perfect) ms.insert(ms.begin(), Method{MethodKind::Perfect});
    std::vector<double> bound;
    const auto rows = ber_curve(cfg.trial, ms, ebn0, trials, cfg.seed, cfg.workers, &bound);
    std::vector<BerResult> kept;
    for (const auto& r : rows)
        if (std::find(methods.begin(), methods.end(), Method::parse(r.method)) != methods.end()) kept.push_back(r);
    dir.write("ber.csv", ber_to_csv(kept));
    std::string b = "ebn0_db,awgn_theory,matched_bound\n";
    for (std::size_t e = 0; e < ebn0.size(); ++e)
        b += format_real(ebn0[e]) + "," + format_real(qpsk_ber_theory(ebn0[e])) + "," + format_real(bound[e]) + "\n";
    dir.write("ber_bound.csv", b);
    for (const auto& r : kept) out.summary += line("ber %-16s %6.2f dB  %.4e", r.method.c_str(), r.ebn0_db, r.ber);
}

}  // namespace

CommandOutput run_command(Command cmd, const RunConfig& cfg, const std::filesystem::path& out_dir)
{
    cfg.validate();
    CommandOutput out;
    OutputDir dir(out_dir);
    const TrialConfig& tc = cfg.trial;

    switch (cmd) {
    case Command::Synth: {
        const auto n = static_cast<std::size_t>(std::llround(cfg.synth.duration_s * cfg.synth.sample_rate_hz));
        const ChannelSeries ch = true_channel(tc, cfg.synth.t0, cfg.synth.sample_rate_hz, n);
        if (cfg.synth.binary)
            dir.write("channel.bin", channel_to_binary(ch));
        else
            dir.write("channel.csv", channel_to_csv(ch));
        out.summary += line("synth %zu samples at %g Hz", n, cfg.synth.sample_rate_hz);
        break;
    }
    case Command::Separate: {
        SlidingEstimate est;
        if (!cfg.input.empty()) {
            est = sliding_estimate(read_channel(cfg.input), tc.frame_s(), tc.czt, tc.max_paths);
        } else {
            est = observe(tc, cfg.trial_index, mix_seed(cfg.seed, cfg.trial_index)).estimate;
        }
        dir.write("tracks.csv", tracks_to_csv(est));
        out.summary += line("separate %zu frames, %zu tracks", est.n_frames, est.tracks.size());
        break;
    }
    case Command::Predict: {
        if (cfg.method.kind == MethodKind::Perfect) throw ConfigError("predict: method 'perfect' has no forecast");
        const std::uint64_t ts = mix_seed(cfg.seed, cfg.trial_index);
        const Observation obs = observe(tc, cfg.trial_index, ts);
        const MethodRun run = run_method(tc, obs, cfg.method, ts, true);
        std::vector<PredictionRow> rows;
        for (std::size_t i = 0; i < run.forecast.paths.size(); ++i) {
            const PathForecast& pf = run.forecast.paths[i];
            for (std::size_t k = 0; k < pf.values.size(); ++k)
                rows.push_back({pf.t_first + static_cast<double>(k) * pf.step, pf.values[k], static_cast<int>(i)});
        }
        const auto n = static_cast<std::size_t>(std::llround(tc.frame_s() * tc.czt.analysis_rate_hz));
        const ChannelSeries truth = true_channel(tc, obs.target_start, tc.czt.analysis_rate_hz, n);
        for (std::size_t i = 0; i < n; ++i) rows.push_back({truth.time(i), run.forecast.at(truth.time(i)), -1});
        for (std::size_t i = 0; i < n; ++i) rows.push_back({truth.time(i), truth.samples[i], -2});
        dir.write("prediction.csv", prediction_to_csv(rows));
        if (cfg.method.kind == MethodKind::Cvnn) {
            dir.write("sparsity.csv", sparsity_to_csv(run.trace));
            dir.write("state.json", snapshot_to_json(run.networks));
        }
        out.summary += line("predict %s: accumulated phase error %.6g", cfg.method.label().c_str(), run.phase_error);
        if (cfg.method.kind == MethodKind::Cvnn) out.summary += line("predict nonzero ratio %.4f", run.sparsity.ratio);
        break;
    }
    case Command::Ber:
        run_ber(cfg, cfg.sweep.methods, cfg.sweep.ebn0_db, cfg.trials_for(cmd), dir, out);
        break;
    case Command::Sweep: {
        if (!tc.explicit_paths.empty()) throw ConfigError("sweep: the delta_x axis needs a geometry scenario");
        const std::size_t trials = cfg.trials_for(cmd);
        const auto rows = sparsity_sweep(tc, cfg.sweep.delta_x, cfg.sweep.modes, cfg.sweep.alpha, trials, cfg.seed, cfg.workers);
        std::string raw = "delta_x,mode,alpha,trial,ratio,phase_error\n";
        for (const auto& r : rows)
            raw += format_real(r.delta_x) + "," + to_string(r.penalty) + "," + format_real(r.alpha) + "," +
                   std::to_string(r.trial) + "," + format_real(r.ratio) + "," + format_real(r.phase_error) + "\n";
        dir.write("sweep_rows.csv", raw);
        std::string sum = "mode,alpha,mean_ratio,max_phase_error\n";
        for (const auto& s : summarize(rows)) {
            sum += std::string(to_string(s.penalty)) + "," + format_real(s.alpha) + "," + format_real(s.mean_ratio) + "," +
                   format_real(s.max_phase_error) + "\n";
            out.summary += line("sweep %-4s alpha=%-8g mean ratio %.4f  max phase error %.6g", to_string(s.penalty), s.alpha,
                                s.mean_ratio, s.max_phase_error);
        }
        dir.write("sweep_summary.csv", sum);
        for (const auto mode : cfg.sweep.modes) {
            const std::string m = to_string(mode);
            dir.write("ratio_" + m + ".csv", axis_table(rows, cfg.sweep, mode, true));
            dir.write("phase_" + m + ".csv", axis_table(rows, cfg.sweep, mode, false));
        }
        if (!cfg.sweep.ebn0_db.empty()) run_ber(cfg, cfg.sweep.methods, cfg.sweep.ebn0_db, trials, dir, out);
        break;
    }
    }
    dir.finish(cmd, cfg, out);
    return out;
}

}  // namespace chanpred
