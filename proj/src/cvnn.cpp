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

#include "chanpred/cvnn.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chanpred/error.hpp"

namespace chanpred {

LayerWeights::LayerWeights(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), entries_(rows * cols) {}

LayerWeights::LayerWeights(std::size_t rows, std::size_t cols, std::vector<PolarComplex> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries))
{
    if (entries_.size() != rows_ * cols_) throw ShapeError("LayerWeights: entry count does not match rows*cols");
    if (!all_finite()) throw std::invalid_argument("LayerWeights: non-finite entry");
}

double LayerWeights::column_norm(std::size_t j) const
{
    double s = 0.0;
    for (std::size_t k = 0; k < rows_; ++k) {
        const double a = at(k, j).amplitude;
        s += a * a;
    }
    return std::sqrt(s);
}

double LayerWeights::max_amplitude() const noexcept
{
    double m = 0.0;
    for (const auto& w : entries_) m = std::max(m, w.amplitude);
    return m;
}

double LayerWeights::l1_norm() const noexcept
{
    double s = 0.0;
    for (const auto& w : entries_) s += w.amplitude;
    return s;
}

bool LayerWeights::all_finite() const noexcept
{
    return std::all_of(entries_.begin(), entries_.end(), [](const PolarComplex& w) { return w.finite(); });
}

void NetworkShape::validate() const
{
    if (input_terminals < 1) throw ConfigError("input_terminals must be >= 1");
    if (hidden_neurons < 1) throw ConfigError("hidden_neurons must be >= 1");
}

const char* to_string(PenaltyMode mode) noexcept
{
    switch (mode) {
    case PenaltyMode::None: return "none";
    case PenaltyMode::L1: return "l1";
    case PenaltyMode::GroupL21: return "l21";
    }
    return "?";
}

PenaltyMode penalty_mode_from_string(const std::string& name)
{
    if (name == "none") return PenaltyMode::None;
    if (name == "l1") return PenaltyMode::L1;
    if (name == "l21") return PenaltyMode::GroupL21;
    throw ConfigError("unknown penalty mode '" + name + "' (expected none, l1 or l21)");
}

void LearnConfig::validate() const
{
    if (!(std::isfinite(kappa1) && kappa1 > 0.0)) throw ConfigError("kappa1 must be finite and > 0");
    if (!(std::isfinite(kappa2) && kappa2 > 0.0)) throw ConfigError("kappa2 must be finite and > 0");
    if (!(std::isfinite(alpha) && alpha >= 0.0)) throw ConfigError("alpha must be finite and >= 0");
    if (iterations < 1) throw ConfigError("iterations must be >= 1");
}

void WeightInit::validate() const
{
    if (!(amplitude_min >= 0.0 && amplitude_max >= amplitude_min && std::isfinite(amplitude_max)))
        throw ConfigError("weight init requires 0 <= amplitude_min <= amplitude_max");
}

LayerWeights random_layer(std::size_t rows, std::size_t cols, const WeightInit& init, std::mt19937_64& rng)
{
    init.validate();
    const double div = init.fan_in_scaled && cols > 0 ? static_cast<double>(cols) : 1.0;
    std::uniform_real_distribution<double> amp(init.amplitude_min / div, init.amplitude_max / div);
    std::uniform_real_distribution<double> pha(-std::numbers::pi, std::numbers::pi);
    LayerWeights w(rows, cols);
    for (auto& e : w.entries()) {
        e.amplitude = amp(rng);
        e.phase = wrap_phase(pha(rng));
    }
    return w;
}

PolarComplex activation_ap(PolarComplex u) noexcept
{
    // tanh rounds to exactly 1 beyond |u| ~ 19; stay strictly inside the unit disk.
    constexpr double max_amplitude = 1.0 - 0x1p-53;
    if (u.amplitude == 0.0) return {0.0, 0.0};
    return {std::min(std::tanh(u.amplitude), max_amplitude), u.phase};
}

LayerTrace layer_forward(const LayerWeights& w, std::span<const PolarComplex> inputs)
{
    if (inputs.size() != w.cols()) throw ShapeError("layer_forward: input count does not match weight columns");
    LayerTrace t;
    t.inputs.assign(inputs.begin(), inputs.end());
    t.states.resize(w.rows());
    t.outputs.resize(w.rows());

    std::vector<cplx> z(inputs.size());
    for (std::size_t j = 0; j < inputs.size(); ++j) z[j] = inputs[j].rect();

    for (std::size_t k = 0; k < w.rows(); ++k) {
        cplx u{0.0, 0.0};
        for (std::size_t j = 0; j < w.cols(); ++j) u += w.at(k, j).rect() * z[j];
        t.states[k] = PolarComplex::from_rect(u);
        t.outputs[k] = activation_ap(t.states[k]);
    }
    return t;
}

ForwardTrace forward(const NetworkShape& shape, const LayerWeights& w1, const LayerWeights& w2,
                     std::span<const PolarComplex> inputs)
{
    if (w1.rows() != shape.hidden_neurons || w1.cols() != shape.input_terminals)
        throw ShapeError("forward: hidden weights must be hidden_neurons x input_terminals");
    if (w2.rows() != 1 || w2.cols() != shape.hidden_neurons)
        throw ShapeError("forward: output weights must be 1 x hidden_neurons");
    if (inputs.size() != shape.input_terminals) throw ShapeError("forward: expected input_terminals inputs");

    ForwardTrace tr;
    tr.hidden = layer_forward(w1, inputs);
    tr.output = layer_forward(w2, tr.hidden.outputs);
    return tr;
}

double loss(std::span<const PolarComplex> outputs, std::span<const PolarComplex> teacher)
{
    if (outputs.size() != teacher.size()) throw ShapeError("loss: output and teacher lengths differ");
    double e = 0.0;
    for (std::size_t k = 0; k < outputs.size(); ++k) e += std::norm(outputs[k].rect() - teacher[k].rect());
    return 0.5 * e;
}

std::vector<PolarComplex> bpts_teacher(const LayerWeights& w2, PolarComplex teacher_out)
{
    if (w2.rows() != 1) throw ShapeError("bpts_teacher: output layer must have a single neuron");
    const cplx t_conj = std::conj(teacher_out.rect());
    std::vector<PolarComplex> hidden(w2.cols());
    for (std::size_t k = 0; k < w2.cols(); ++k) {
        const PolarComplex back = activation_ap(PolarComplex::from_rect(t_conj * w2.at(0, k).rect()));
        hidden[k] = back.conj();
    }
    return hidden;
}

double GradientTerms::amplitude_gradient() const noexcept
{
    return d_amp_fraction * std::cos(theta_rot) - d_phase_fraction * std::sin(theta_rot);
}

double GradientTerms::phase_gradient() const noexcept
{
    return d_amp_fraction * std::sin(theta_rot) + d_phase_fraction * std::cos(theta_rot);
}

std::vector<GradientTerms> grad_components(const LayerWeights& w, const LayerTrace& trace,
                                           std::span<const PolarComplex> teacher)
{
    if (trace.inputs.size() != w.cols() || trace.states.size() != w.rows() || trace.outputs.size() != w.rows())
        throw ShapeError("grad_components: trace does not match layer shape");
    if (teacher.size() != w.rows()) throw ShapeError("grad_components: teacher length does not match layer rows");

    std::vector<GradientTerms> g(w.size());
    for (std::size_t k = 0; k < w.rows(); ++k) {
        const PolarComplex& z = trace.outputs[k];
        const PolarComplex& zt = teacher[k];
        const double theta_u = trace.states[k].phase;
        const double dtheta = z.phase - zt.phase;
        const double u_abs = std::max(trace.states[k].amplitude, kStateEpsilon);

        const double amp_common = (1.0 - z.amplitude * z.amplitude) * (z.amplitude - zt.amplitude * std::cos(dtheta));
        const double pha_common = z.amplitude * zt.amplitude * std::sin(dtheta) / u_abs;

        for (std::size_t j = 0; j < w.cols(); ++j) {
            const PolarComplex& zin = trace.inputs[j];
            GradientTerms& t = g[k * w.cols() + j];
            t.d_amp_fraction = amp_common * zin.amplitude;
            t.d_phase_fraction = pha_common * zin.amplitude;
            t.theta_rot = theta_u - zin.phase - w.at(k, j).phase;
        }
    }
    return g;
}

double penalty_gradient(const LayerWeights& w, std::size_t k, std::size_t j, const LearnConfig& cfg,
                        std::span<const double> column_norms)
{
    switch (cfg.penalty) {
    case PenaltyMode::None: return 0.0;
    case PenaltyMode::L1: return cfg.alpha;
    case PenaltyMode::GroupL21: {
        const double norm = column_norms[j];
        if (norm < kGroupEpsilon) return 0.0;
        const double group_dim = static_cast<double>(w.rows());
        return cfg.alpha * std::sqrt(group_dim) * w.at(k, j).amplitude / norm;
    }
    }
    return 0.0;
}

LayerWeights update_weights(const LayerWeights& w, const LayerTrace& trace, std::span<const PolarComplex> teacher,
                            const LearnConfig& cfg)
{
    const auto g = grad_components(w, trace, teacher);

    std::vector<double> norms;
    if (cfg.penalty == PenaltyMode::GroupL21) {
        norms.resize(w.cols());
        for (std::size_t j = 0; j < w.cols(); ++j) norms[j] = w.column_norm(j);
    }

    LayerWeights next = w;
    for (std::size_t k = 0; k < w.rows(); ++k) {
        for (std::size_t j = 0; j < w.cols(); ++j) {
            const GradientTerms& t = g[k * w.cols() + j];
            const double c = std::cos(t.theta_rot);
            const double s = std::sin(t.theta_rot);
            const double amp_step = t.d_amp_fraction * c - t.d_phase_fraction * s + penalty_gradient(w, k, j, cfg, norms);
            const double pha_step = t.d_amp_fraction * s + t.d_phase_fraction * c;

            PolarComplex& out = next.at(k, j);
            out.amplitude = std::max(0.0, w.at(k, j).amplitude - cfg.kappa1 * amp_step);
            out.phase = wrap_phase(w.at(k, j).phase - cfg.kappa2 * pha_step);
        }
    }
    return next;
}

}  // namespace chanpred
