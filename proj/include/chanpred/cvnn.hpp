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
#include <random>
#include <span>
#include <string>
#include <vector>

#include "chanpred/polar.hpp"

namespace chanpred {

/// Connection weights of one fully connected layer: `rows` neurons fed by
/// `cols` sources. Entry (k, j) connects source j to neuron k.
class LayerWeights {
public:
    LayerWeights() = default;
    LayerWeights(std::size_t rows, std::size_t cols);
    LayerWeights(std::size_t rows, std::size_t cols, std::vector<PolarComplex> entries);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return entries_.size(); }

    const PolarComplex& at(std::size_t k, std::size_t j) const { return entries_[k * cols_ + j]; }
    PolarComplex& at(std::size_t k, std::size_t j) { return entries_[k * cols_ + j]; }

    std::span<const PolarComplex> entries() const noexcept { return entries_; }
    std::span<PolarComplex> entries() noexcept { return entries_; }

    /// L2 norm of the outgoing weights of source j (column j).
    double column_norm(std::size_t j) const;
    double max_amplitude() const noexcept;
    double l1_norm() const noexcept;
    bool all_finite() const noexcept;

    friend bool operator==(const LayerWeights&, const LayerWeights&) = default;

private:
    std::size_t rows_{0};
    std::size_t cols_{0};
    std::vector<PolarComplex> entries_;
};

struct NetworkShape {
    std::size_t input_terminals{30};
    std::size_t hidden_neurons{30};

    void validate() const;
    friend bool operator==(const NetworkShape&, const NetworkShape&) = default;
};

enum class PenaltyMode { None, L1, GroupL21 };

const char* to_string(PenaltyMode mode) noexcept;
PenaltyMode penalty_mode_from_string(const std::string& name);

struct LearnConfig {
    double kappa1{0.01};  ///< amplitude step
    double kappa2{0.01};  ///< phase step
    double alpha{0.0};    ///< penalty coefficient
    int iterations{10};   ///< weight updates per new teacher
    PenaltyMode penalty{PenaltyMode::None};

    void validate() const;
};

/// Initial weight distribution. Amplitudes are uniform in
/// [amplitude_min, amplitude_max], divided by the layer fan-in when
/// `fan_in_scaled` is set; phases uniform in (-pi, pi].
///
/// Fan-in scaling keeps a 30-input neuron out of tanh saturation once its
/// phases align, where the amplitude gradient would otherwise vanish.
struct WeightInit {
    double amplitude_min{0.5};
    double amplitude_max{1.0};
    bool fan_in_scaled{true};

    void validate() const;
};

LayerWeights random_layer(std::size_t rows, std::size_t cols, const WeightInit& init, std::mt19937_64& rng);

/// Intermediates of one layer: inputs z_l, internal states u_(l+1), outputs z_(l+1).
struct LayerTrace {
    std::vector<PolarComplex> inputs;
    std::vector<PolarComplex> states;
    std::vector<PolarComplex> outputs;
};

struct ForwardTrace {
    LayerTrace hidden;  ///< input terminals -> hidden neurons
    LayerTrace output;  ///< hidden neurons -> output neuron

    const PolarComplex& prediction() const { return output.outputs.front(); }
};

/// Amplitude-phase activation: tanh on the amplitude, phase passes through.
PolarComplex activation_ap(PolarComplex u) noexcept;

/// Weighted complex sum per neuron followed by the activation.
LayerTrace layer_forward(const LayerWeights& w, std::span<const PolarComplex> inputs);

ForwardTrace forward(const NetworkShape& shape, const LayerWeights& w1, const LayerWeights& w2,
                     std::span<const PolarComplex> inputs);

/// Half the squared rectangular distance, summed over neurons.
double loss(std::span<const PolarComplex> outputs, std::span<const PolarComplex> teacher);

/// Hidden-layer teacher obtained by sending the output teacher back through
/// the conjugated output weights: conj(f_ap(conj(t) * w_k)) per hidden neuron.
std::vector<PolarComplex> bpts_teacher(const LayerWeights& w2, PolarComplex teacher_out);

/// Per-weight partial derivatives of the layer loss with respect to the
/// amplitude- and phase-direction change fractions, and the rotation angle
/// theta_rot = theta_u(k) - theta_z(j) - theta_w(k, j) relating those
/// fractions to (|w|, theta_w).
struct GradientTerms {
    double d_amp_fraction{0.0};
    double d_phase_fraction{0.0};
    double theta_rot{0.0};

    /// dE/d|w|.
    double amplitude_gradient() const noexcept;
    /// (1/|w|) dE/d(theta_w).
    double phase_gradient() const noexcept;
};

/// Guard applied to |u| before dividing by it.
inline constexpr double kStateEpsilon = 1e-12;
/// Group norms below this carry a zero penalty subgradient.
inline constexpr double kGroupEpsilon = 1e-12;

/// Gradient terms for every weight of a layer, row-major like the weights.
std::vector<GradientTerms> grad_components(const LayerWeights& w, const LayerTrace& trace,
                                           std::span<const PolarComplex> teacher);

/// One steepest-descent step on a layer. Amplitudes are floored at zero and
/// phases rewrapped.
LayerWeights update_weights(const LayerWeights& w, const LayerTrace& trace,
                            std::span<const PolarComplex> teacher, const LearnConfig& cfg);

/// The penalty's contribution to dE/d|w| for weight (k, j).
double penalty_gradient(const LayerWeights& w, std::size_t k, std::size_t j, const LearnConfig& cfg,
                        std::span<const double> column_norms);

}  // namespace chanpred
