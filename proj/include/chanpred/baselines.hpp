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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "chanpred/polar.hpp"

namespace chanpred {

/// First-order extrapolation: continues the last difference.
std::vector<cplx> linear_predict(std::span<const cplx> history, std::size_t horizon);

struct ArModel {
    std::vector<cplx> coefficients;  ///< a_1..a_p, x[t] = sum_i a_i x[t-i]
    bool ridge{false};               ///< the ridge fallback was used
};

inline constexpr double kArRidge = 1e-8;

/// Least-squares complex AR(p) fit over every full lag window.
ArModel ar_fit(std::span<const cplx> history, std::size_t order);

/// Iterated AR(p) prediction.
std::vector<cplx> ar_predict(std::span<const cplx> history, std::size_t order, std::size_t horizon);

/// Gated recurrent unit with update gate y and reset gate r:
///   y = sig(Wy x + Uy h), r = sig(Wr x + Ur h),
///   c = tanh(W x + U (r o h)), h' = y o h + (1 - y) o c.
/// The complex value is read out from h'[0] + j h'[1].
struct GruWeights {
    Eigen::MatrixXd wy, uy, wr, ur, w, u;

    GruWeights() = default;
    GruWeights(std::size_t hidden, std::size_t input);

    std::size_t hidden() const noexcept { return static_cast<std::size_t>(uy.rows()); }
    std::size_t input() const noexcept { return static_cast<std::size_t>(wy.cols()); }
};

GruWeights random_gru(std::size_t hidden, std::size_t input, std::uint64_t seed);

struct GruStep {
    Eigen::VectorXd y, r, c, h;
};

GruStep gru_step(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev);

/// 0.5 * |h'[0:2] - target|^2 for one step.
double gru_loss(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::Vector2d& target);

/// Gradient of gru_loss with respect to all six matrices, holding h_prev fixed.
GruWeights gru_gradient(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                        const Eigen::Vector2d& target);

struct GruConfig {
    std::size_t hidden{16};
    std::size_t history{30};
    double learning_rate{0.01};
    int epochs{10};
    double amplitude_scale{0.0};  ///< 0 selects twice the peak of the first full history

    void validate() const;
};

/// Online GRU track predictor. Input is the real/imag split of the last
/// `history` values plus a constant 1 that carries the gate biases.
class GruPredictor {
public:
    GruPredictor(const GruConfig& cfg, std::uint64_t seed);

    /// Trains `epochs` steps toward `estimate`, then advances the state.
    bool online_update(cplx estimate);
    std::vector<cplx> predict(std::size_t steps) const;

    bool trained() const noexcept { return trained_; }
    const GruWeights& weights() const noexcept { return g_; }
    const Eigen::VectorXd& state() const noexcept { return h_; }

private:
    Eigen::VectorXd input(const std::deque<cplx>& window) const;

    GruConfig cfg_;
    GruWeights g_;
    Eigen::VectorXd h_;
    std::deque<cplx> history_;
    double scale_{0.0};
    bool trained_{false};
};

}  // namespace chanpred
