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

#include "chanpred/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

#include "chanpred/error.hpp"

namespace chanpred {

namespace {

enum SeedStream : std::uint64_t { kObserveNoise = 1, kPredictor = 2, kGru = 3, kLink = 4 };

std::string format_alpha(double a)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", a);
    return buf;
}

}  // namespace

std::string Method::label() const
{
    switch (kind) {
    case MethodKind::Perfect: return "perfect";
    case MethodKind::NoPrediction: return "no_prediction";
    case MethodKind::Linear: return "linear";
    case MethodKind::Ar: return "ar";
    case MethodKind::Gru: return "gru";
    case MethodKind::Cvnn:
        if (penalty == PenaltyMode::None) return "cvnn_none";
        return std::string("cvnn_") + to_string(penalty) + ":" + format_alpha(alpha);
    }
    return "unknown";
}

Method Method::parse(const std::string& label)
{
    if (label == "perfect") return {MethodKind::Perfect};
    if (label == "no_prediction") return {MethodKind::NoPrediction};
    if (label == "linear") return {MethodKind::Linear};
    if (label == "ar") return {MethodKind::Ar};
    if (label == "gru") return {MethodKind::Gru};
    if (label == "cvnn_none") return {MethodKind::Cvnn, PenaltyMode::None, 0.0};
    const auto colon = label.find(':');
    if (label.rfind("cvnn_", 0) == 0 && colon != std::string::npos) {
        const PenaltyMode mode = penalty_mode_from_string(label.substr(5, colon - 5));
        std::size_t used = 0;
        double alpha = 0.0;
        try {
            alpha = std::stod(label.substr(colon + 1), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != label.size() - colon - 1 || !(alpha >= 0.0))
            throw ConfigError("method '" + label + "': alpha must be a non-negative number");
        return {MethodKind::Cvnn, mode, alpha};
    }
    throw ConfigError("unknown method '" + label + "'");
}

void TrialConfig::validate() const
{
    if (explicit_paths.empty()) {
        scenario.validate();
    } else {
        for (const auto& p : explicit_paths) p.validate();
    }
    if (!(trial_spacing_s >= 0.0)) throw ConfigError("trial_spacing_s must be >= 0");
    if (burn_in_frames < 2) throw ConfigError("burn_in_frames must be >= 2");
    czt.validate();
    if (max_paths == 0) throw ConfigError("max_paths must be >= 1");
    if (std::isnan(estimation_snr_db)) throw ConfigError("estimation_snr_db must be a number");
    predictor.validate();
    gru.validate();
    if (ar_order == 0 || ar_history < 2 * ar_order) throw ConfigError("ar_history must be >= 2 * ar_order >= 2");
    ofdm.validate();
    const double spf = frame_s() * czt.analysis_rate_hz;
    if (std::abs(spf - std::round(spf)) > 1e-6) throw ConfigError("frame length must be a whole number of analysis samples");
}

ChannelSeries true_channel(const TrialConfig& cfg, double t0, double sample_rate_hz, std::size_t n)
{
    if (!cfg.explicit_paths.empty()) return synthesize(cfg.explicit_paths, t0, sample_rate_hz, n);
    return synthesize_scenario(cfg.scenario, t0, sample_rate_hz, n, cfg.frame_s());
}

Observation observe(const TrialConfig& cfg, std::size_t trial, std::uint64_t trial_seed, bool run_estimator)
{
    cfg.validate();
    const double T = cfg.frame_s();
    const auto spf = static_cast<std::size_t>(std::llround(T * cfg.czt.analysis_rate_hz));
    const std::size_t frames = cfg.observed_frames();

    Observation obs;
    obs.trial = trial;
    obs.t_begin = std::round(static_cast<double>(trial) * cfg.trial_spacing_s / T) * T;
    obs.target_start = obs.t_begin + static_cast<double>(frames) * T;
    obs.observed = true_channel(cfg, obs.t_begin, cfg.czt.analysis_rate_hz, frames * spf);
    if (std::isfinite(cfg.estimation_snr_db)) {
        double power = 0.0;
        for (const cplx v : obs.observed.samples) power += std::norm(v);
        power /= static_cast<double>(obs.observed.size());
        const double noise = power / std::pow(10.0, cfg.estimation_snr_db / 10.0);
        const std::vector<cplx> ones(obs.observed.size(), cplx(1.0, 0.0));
        obs.observed.samples = apply_channel(ones, obs.observed.sample_rate_hz, obs.observed, noise,
                                             mix_seed(trial_seed, kObserveNoise));
    }
    if (run_estimator) obs.estimate = sliding_estimate(obs.observed, T, cfg.czt, cfg.max_paths);
    return obs;
}

cplx ChannelForecast::at(double t) const
{
    cplx v = offset + slope_per_s * (t - t_ref);
    for (const auto& p : paths) v += p.at(t);
    for (const auto& p : extrapolated) v += p.value_at(t);
    return v;
}

namespace {

using FramePoints = std::map<std::size_t, std::vector<std::pair<int, TrackPoint>>>;

FramePoints points_by_frame(const SlidingEstimate& est)
{
    FramePoints by_frame;
    for (const auto& tr : est.tracks)
        for (const auto& pt : tr.points) by_frame[pt.frame].push_back({tr.id, pt});
    for (auto& [frame, pts] : by_frame)
        std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return by_frame;
}

constexpr std::size_t kForecastSteps = 5;

}  // namespace

MethodRun run_method(const TrialConfig& cfg, const Observation& obs, const Method& method, std::uint64_t trial_seed,
                     bool keep_trace)
{
    const double T = cfg.frame_s();
    MethodRun run;
    ChannelForecast& fc = run.forecast;
    const ChannelSeries& seen = obs.observed;
    if (seen.size() == 0) throw PreconditionError("run_method: empty observation");

    switch (method.kind) {
    case MethodKind::Perfect: throw PreconditionError("run_method: perfect CSI has no forecast");
    case MethodKind::NoPrediction:
        fc.offset = seen.samples.back();
        fc.t_ref = seen.time(seen.size() - 1);
        break;
    case MethodKind::Linear: {
        const auto spf = static_cast<std::size_t>(std::llround(T * seen.sample_rate_hz));
        if (seen.size() <= spf) throw PreconditionError("run_method: linear needs two frames of observation");
        fc.offset = seen.samples.back();
        fc.slope_per_s = (seen.samples.back() - seen.samples[seen.size() - 1 - spf]) / T;
        fc.t_ref = seen.time(seen.size() - 1);
        break;
    }
    case MethodKind::Ar:
    case MethodKind::Gru:
    case MethodKind::Cvnn: {
        const FramePoints by_frame = points_by_frame(obs.estimate);
        if (by_frame.empty()) break;  // nothing detected: predict zero

        PredictorConfig pc = cfg.predictor;
        pc.learn.penalty = method.penalty;
        pc.learn.alpha = method.penalty == PenaltyMode::None ? 0.0 : method.alpha;
        ChannelPredictor cvnn(pc, mix_seed(trial_seed, kPredictor));
        std::map<int, GruPredictor> grus;
        std::map<int, std::vector<cplx>> hist;
        double prev_ratio = 0.0;

        for (const auto& [frame, pts] : by_frame) {
            std::vector<int> live;
            for (const auto& [id, pt] : pts) {
                const cplx v = pt.value;
                live.push_back(id);
                auto& h = hist[id];
                h.push_back(v);
                if (method.kind == MethodKind::Cvnn) {
                    cvnn.update(id, v);
                } else if (method.kind == MethodKind::Gru) {
                    auto it = grus.find(id);
                    if (it == grus.end())
                        it = grus.emplace(id, GruPredictor(cfg.gru, mix_seed(mix_seed(trial_seed, kGru),
                                                                              static_cast<std::uint64_t>(id))))
                                 .first;
                    it->second.online_update(v);
                }
            }
            if (method.kind == MethodKind::Cvnn) {
                std::vector<int> dead;
                for (const auto& [id, tp] : cvnn.tracks())
                    if (std::find(live.begin(), live.end(), id) == live.end()) dead.push_back(id);
                for (const int id : dead) cvnn.drop(id);
                if (keep_trace) {
                    SparsityReport r = cvnn.sparsity();
                    r.frame = frame;
                    r.delta = r.ratio - prev_ratio;
                    prev_ratio = r.ratio;
                    run.trace.push_back(r);
                }
            }
        }

        const auto& last = *by_frame.rbegin();
        const double t_last = obs.target_start - static_cast<double>(cfg.czt.window_frames / 2) * T;
        for (const auto& [id, pt] : last.second) {
            PathForecast pf{t_last, T, {pt.value}};
            std::vector<cplx> ahead;
            if (method.kind == MethodKind::Cvnn) {
                const TrackPredictor& tp = cvnn.track(id);
                if (tp.trained()) ahead = tp.predict(kForecastSteps);
            } else if (method.kind == MethodKind::Gru) {
                const GruPredictor& g = grus.at(id);
                if (g.trained()) ahead = g.predict(kForecastSteps);
            } else {
                const auto& h = hist[id];
                const std::size_t n = std::min(h.size(), cfg.ar_history);
                if (n >= 2 * cfg.ar_order)
                    ahead = ar_predict(std::span<const cplx>(h).last(n), cfg.ar_order, kForecastSteps);
            }
            if (ahead.empty()) {
                // too young to predict: hold the amplitude and keep the last phase step
                const auto& h = hist[id];
                if (h.size() < 2 || std::abs(h[h.size() - 2]) == 0.0 || std::abs(pt.value) == 0.0) {
                    fc.extrapolated.push_back(pt.params);
                    continue;
                }
                const cplx turn = h.back() / h[h.size() - 2];
                const cplx step = turn / std::abs(turn);
                cplx v = pt.value;
                for (std::size_t s = 0; s < kForecastSteps; ++s) ahead.push_back(v *= step);
            }
            pf.values.insert(pf.values.end(), ahead.begin(), ahead.end());
            fc.paths.push_back(std::move(pf));
        }
        if (method.kind == MethodKind::Cvnn) {
            run.sparsity = cvnn.sparsity();
            if (keep_trace) run.networks = cvnn.tracks();
        }
        break;
    }
    }
    run.phase_error = accumulated_phase_error(cfg, obs, fc);
    return run;
}

double accumulated_phase_error(const TrialConfig& cfg, const Observation& obs, const ChannelForecast& fc)
{
    const auto n = static_cast<std::size_t>(std::llround(cfg.frame_s() * cfg.czt.analysis_rate_hz));
    const ChannelSeries truth = true_channel(cfg, obs.target_start, cfg.czt.analysis_rate_hz, n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::abs(wrap_phase(std::arg(fc.at(truth.time(i))) - std::arg(truth.samples[i])));
    return acc;
}

std::vector<LinkCounts> frame_link(const TrialConfig& cfg, const Observation& obs, const ChannelForecast* forecast,
                                   std::span<const double> ebn0_db, std::uint64_t link_seed)
{
    const OfdmConfig& of = cfg.ofdm;
    of.validate();
    std::vector<LinkCounts> out(ebn0_db.size());
    std::mt19937_64 rng(link_seed);
    std::vector<cplx> chan(of.qpsk_symbols);
    std::vector<double> gain2(of.ofdm_symbols);
    std::vector<cplx> comp(of.ofdm_symbols);

    for (std::size_t sf = 0; sf < of.subframes_per_frame; ++sf) {
        const double t_sub = obs.target_start + static_cast<double>(sf) * of.tdd_subframe_s;
        const ChannelSeries truth = true_channel(cfg, t_sub, of.sample_rate_hz, of.samples_per_subframe);
        const auto bits = random_bits(2 * of.qpsk_symbols, rng);
        const auto tx = ofdm_mod(qpsk_mod(bits), of);

        // one compensation value per OFDM symbol, taken at the centre of its useful part
        for (std::size_t s = 0; s < of.ofdm_symbols; ++s) {
            const std::size_t mid = of.useful_start(s) + of.subcarriers / 2;
            gain2[s] = std::norm(truth.samples[mid]);
            comp[s] = forecast ? forecast->at(truth.time(mid)) : truth.samples[mid];
        }
        for (std::size_t c = 0; c < of.qpsk_symbols; ++c) chan[c] = comp[symbol_of_cell(c, of)];

        for (std::size_t e = 0; e < ebn0_db.size(); ++e) {
            const double n0 = noise_power_for_ebn0(ebn0_db[e]);
            const auto rx = apply_channel(tx, of.sample_rate_hz, truth, n0, mix_seed(link_seed, sf * 1024 + e + 1));
            const auto eq = compensate(ofdm_demod(rx, of), chan);
            LinkCounts& lc = out[e];
            lc.errors += count_bit_errors(bits, eq);
            lc.bits += bits.size();
            lc.symbols += of.qpsk_symbols;
            const double ebn0 = std::pow(10.0, ebn0_db[e] / 10.0);
            for (std::size_t c = 0; c < of.qpsk_symbols; ++c)
                lc.matched_bound += 2.0 * q_function(std::sqrt(2.0 * gain2[symbol_of_cell(c, of)] * ebn0));
        }
    }
    return out;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& f)
{
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

std::vector<BerResult> ber_curve(const TrialConfig& cfg, std::span<const Method> methods, std::span<const double> ebn0_db,
                                 std::size_t trials, std::uint64_t seed, std::size_t workers,
                                 std::vector<double>* matched_bound)
{
    cfg.validate();
    if (trials == 0) throw ConfigError("ber_curve: trials must be >= 1");
    const bool estimate = std::any_of(methods.begin(), methods.end(), [](const Method& m) { return m.needs_estimates(); });

    // [trial][method][ebn0]
    std::vector<std::vector<std::vector<LinkCounts>>> counts(trials);
    parallel_for(trials, workers, [&](std::size_t i) {
        const std::uint64_t ts = mix_seed(seed, i);
        const Observation obs = observe(cfg, i, ts, estimate);
        const std::uint64_t link_seed = mix_seed(ts, kLink);
        auto& per_method = counts[i];
        for (const Method& m : methods) {
            if (m.kind == MethodKind::Perfect) {
                per_method.push_back(frame_link(cfg, obs, nullptr, ebn0_db, link_seed));
            } else {
                const MethodRun run = run_method(cfg, obs, m, ts);
                per_method.push_back(frame_link(cfg, obs, &run.forecast, ebn0_db, link_seed));
            }
        }
        if (methods.empty()) per_method.push_back(frame_link(cfg, obs, nullptr, ebn0_db, link_seed));
    });

    std::vector<BerResult> out;
    for (std::size_t m = 0; m < methods.size(); ++m) {
        for (std::size_t e = 0; e < ebn0_db.size(); ++e) {
            BerResult r;
            r.method = methods[m].label();
            r.ebn0_db = ebn0_db[e];
            for (std::size_t i = 0; i < trials; ++i) {
                r.bit_errors += counts[i][m][e].errors;
                r.total_bits += counts[i][m][e].bits;
            }
            r.ber = static_cast<double>(r.bit_errors) / static_cast<double>(r.total_bits);
            out.push_back(r);
        }
    }
    if (matched_bound) {
        matched_bound->assign(ebn0_db.size(), 0.0);
        for (std::size_t e = 0; e < ebn0_db.size(); ++e) {
            double expected = 0.0, bits = 0.0;
            for (std::size_t i = 0; i < trials; ++i) {
                expected += counts[i][0][e].matched_bound;
                bits += static_cast<double>(counts[i][0][e].bits);
            }
            (*matched_bound)[e] = expected / bits;
        }
    }
    return out;
}

std::vector<SweepRow> sparsity_sweep(const TrialConfig& base, std::span<const double> delta_x,
                                     std::span<const PenaltyMode> modes, std::span<const double> alphas,
                                     std::size_t trials, std::uint64_t seed, std::size_t workers)
{
    if (trials == 0) throw ConfigError("sparsity_sweep: trials must be >= 1");
    std::vector<std::vector<SweepRow>> per_task(delta_x.size() * trials);
    parallel_for(per_task.size(), workers, [&](std::size_t task) {
        const double dx = delta_x[task / trials];
        const std::size_t trial = task % trials;
        TrialConfig cfg = base;
        cfg.explicit_paths.clear();
        cfg.scenario.place_scatterers(dx);
        cfg.scenario.mu_speed = base.scenario.mu_speed;
        cfg.scenario.carrier_hz = base.scenario.carrier_hz;
        const std::uint64_t ts = mix_seed(seed, trial);
        const Observation obs = observe(cfg, trial, ts);
        auto& rows = per_task[task];

        std::optional<MethodRun> unregularized;
        for (const PenaltyMode mode : modes) {
            for (const double a : alphas) {
                SweepRow row{dx, mode, a, trial, 0.0, 0.0};
                if (a == 0.0 || mode == PenaltyMode::None) {
                    if (!unregularized) unregularized = run_method(cfg, obs, Method{MethodKind::Cvnn, PenaltyMode::None, 0.0}, ts);
                    row.ratio = unregularized->sparsity.ratio;
                    row.phase_error = unregularized->phase_error;
                } else {
                    const MethodRun run = run_method(cfg, obs, Method{MethodKind::Cvnn, mode, a}, ts);
                    row.ratio = run.sparsity.ratio;
                    row.phase_error = run.phase_error;
                }
                rows.push_back(row);
            }
        }
    });
    std::vector<SweepRow> out;
    for (auto& rows : per_task) out.insert(out.end(), rows.begin(), rows.end());
    return out;
}

std::vector<SweepSummary> summarize(std::span<const SweepRow> rows)
{
    std::vector<SweepSummary> out;
    std::vector<std::size_t> counts;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const SweepSummary& s) { return s.penalty == r.penalty && s.alpha == r.alpha; });
        if (it == out.end()) {
            out.push_back({r.penalty, r.alpha, 0.0, 0.0});
            counts.push_back(0);
            it = out.end() - 1;
        }
        const auto idx = static_cast<std::size_t>(it - out.begin());
        it->mean_ratio += r.ratio;
        it->max_phase_error = std::max(it->max_phase_error, r.phase_error);
        ++counts[idx];
    }
    for (std::size_t i = 0; i < out.size(); ++i) out[i].mean_ratio /= static_cast<double>(counts[i]);
    return out;
}

}  // namespace chanpred
