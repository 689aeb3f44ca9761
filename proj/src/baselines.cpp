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

#include "chanpred/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "chanpred/error.hpp"

namespace chanpred {

std::vector<cplx> linear_predict(std::span<const cplx> history, std::size_t horizon)
{
    if (history.size() < 2) throw PreconditionError("linear_predict: needs at least 2 history points");
    const cplx last = history.back();
    const cplx slope = last - history[history.size() - 2];
    std::vector<cplx> out(horizon);
    for (std::size_t h = 0; h < horizon; ++h) out[h] = last + static_cast<double>(h + 1) * slope;
    return out;
}

ArModel ar_fit(std::span<const cplx> history, std::size_t order)
{
    if (order == 0) throw ConfigError("ar_fit: order must be >= 1");
    if (history.size() < 2 * order) throw PreconditionError("ar_fit: history must hold at least 2p values");
    const auto p = static_cast<Eigen::Index>(order);
    const auto rows = static_cast<Eigen::Index>(history.size() - order);
    Eigen::MatrixXcd a(rows, p);
    Eigen::VectorXcd b(rows);
    for (Eigen::Index t = 0; t < rows; ++t) {
        const auto n = static_cast<std::size_t>(t) + order;
        b(t) = history[n];
        for (Eigen::Index i = 0; i < p; ++i) a(t, i) = history[n - 1 - static_cast<std::size_t>(i)];
    }

    ArModel m;
    Eigen::VectorXcd coef;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() == p) {
        coef = qr.solve(b);
    } else {
        const Eigen::MatrixXcd n = a.adjoint() * a + kArRidge * Eigen::MatrixXcd::Identity(p, p);
        coef = n.ldlt().solve(a.adjoint() * b);
        m.ridge = true;
    }
    m.coefficients.assign(coef.data(), coef.data() + p);
    return m;
}

std::vector<cplx> ar_predict(std::span<const cplx> history, std::size_t order, std::size_t horizon)
{
    const ArModel m = ar_fit(history, order);
    std::vector<cplx> buf(history.begin(), history.end());
    std::vector<cplx> out;
    out.reserve(horizon);
    for (std::size_t h = 0; h < horizon; ++h) {
        cplx next = 0.0;
        for (std::size_t i = 0; i < order; ++i) next += m.coefficients[i] * buf[buf.size() - 1 - i];
        buf.push_back(next);
        out.push_back(next);
    }
    return out;
}

GruWeights::GruWeights(std::size_t hidden, std::size_t input)
{
    const auto h = static_cast<Eigen::Index>(hidden);
    const auto d = static_cast<Eigen::Index>(input);
    wy = wr = w = Eigen::MatrixXd::Zero(h, d);
    uy = ur = u = Eigen::MatrixXd::Zero(h, h);
}

GruWeights random_gru(std::size_t hidden, std::size_t input, std::uint64_t seed)
{
    GruWeights g(hidden, input);
    std::mt19937_64 rng(seed);
    const double sx = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(input, 1)));
    const double sh = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden, 1)));
    auto fill = [&rng](Eigen::MatrixXd& m, double s) {
        std::uniform_real_distribution<double> d(-s, s);
        for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = d(rng);
    };
    fill(g.wy, sx);
    fill(g.uy, sh);
    fill(g.wr, sx);
    fill(g.ur, sh);
    fill(g.w, sx);
    fill(g.u, sh);
    return g;
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& a) { return (1.0 + (-a.array()).exp()).inverse().matrix(); }

void check_dims(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev)
{
    if (static_cast<std::size_t>(x.size()) != g.input() || static_cast<std::size_t>(h_prev.size()) != g.hidden())
        throw ShapeError("gru: input or state dimension mismatch");
}

}  // namespace

GruStep gru_step(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev)
{
    check_dims(g, x, h_prev);
    GruStep s;
    s.y = sigmoid(g.wy * x + g.uy * h_prev);
    s.r = sigmoid(g.wr * x + g.ur * h_prev);
    s.c = (g.w * x + g.u * s.r.cwiseProduct(h_prev)).array().tanh().matrix();
    s.h = s.y.cwiseProduct(h_prev) + (1.0 - s.y.array()).matrix().cwiseProduct(s.c);
    return s;
}

double gru_loss(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev, const Eigen::Vector2d& target)
{
    if (g.hidden() < 2) throw ShapeError("gru: hidden dimension must be >= 2 for the complex readout");
    const GruStep s = gru_step(g, x, h_prev);
    return 0.5 * (s.h.head<2>() - target).squaredNorm();
}

GruWeights gru_gradient(const GruWeights& g, const Eigen::VectorXd& x, const Eigen::VectorXd& h_prev,
                        const Eigen::Vector2d& target)
{
    if (g.hidden() < 2) throw ShapeError("gru: hidden dimension must be >= 2 for the complex readout");
    const GruStep s = gru_step(g, x, h_prev);
    Eigen::VectorXd dh = Eigen::VectorXd::Zero(s.h.size());
    dh.head<2>() = s.h.head<2>() - target;

    const Eigen::ArrayXd y = s.y.array(), r = s.r.array(), c = s.c.array();
    const Eigen::VectorXd rh = s.r.cwiseProduct(h_prev);
    const Eigen::VectorXd d_ay = (dh.array() * (h_prev.array() - c) * y * (1.0 - y)).matrix();
    const Eigen::VectorXd d_ac = (dh.array() * (1.0 - y) * (1.0 - c * c)).matrix();
    const Eigen::VectorXd d_rh = g.u.transpose() * d_ac;
    const Eigen::VectorXd d_ar = (d_rh.array() * h_prev.array() * r * (1.0 - r)).matrix();

    GruWeights d;
    d.wy = d_ay * x.transpose();
    d.uy = d_ay * h_prev.transpose();
    d.wr = d_ar * x.transpose();
    d.ur = d_ar * h_prev.transpose();
    d.w = d_ac * x.transpose();
    d.u = d_ac * rh.transpose();
    return d;
}

void GruConfig::validate() const
{
    if (hidden < 2) throw ConfigError("gru hidden dimension must be >= 2");
    if (history == 0) throw ConfigError("gru history must be >= 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("gru learning rate must be > 0");
    if (epochs < 1) throw ConfigError("gru epochs must be >= 1");
    if (!(amplitude_scale >= 0.0)) throw ConfigError("gru amplitude_scale must be >= 0");
}

GruPredictor::GruPredictor(const GruConfig& cfg, std::uint64_t seed) : cfg_(cfg), scale_(cfg.amplitude_scale)
{
    cfg_.validate();
    g_ = random_gru(cfg_.hidden, 2 * cfg_.history + 1, seed);
    h_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cfg_.hidden));
}

Eigen::VectorXd GruPredictor::input(const std::deque<cplx>& window) const
{
    const std::size_t n = cfg_.history;
    Eigen::VectorXd x(static_cast<Eigen::Index>(2 * n + 1));
    for (std::size_t j = 0; j < n; ++j) {
        const cplx v = window[window.size() - 1 - j] / scale_;
        x(static_cast<Eigen::Index>(2 * j)) = v.real();
        x(static_cast<Eigen::Index>(2 * j + 1)) = v.imag();
    }
    x(static_cast<Eigen::Index>(2 * n)) = 1.0;
    return x;
}

bool GruPredictor::online_update(cplx estimate)
{
    bool updated = false;
    if (history_.size() >= cfg_.history) {
        if (scale_ == 0.0) {
            double peak = std::abs(estimate);
            for (const auto& v : history_) peak = std::max(peak, std::abs(v));
            scale_ = peak > 0.0 ? 2.0 * peak : 1.0;
        }
        const Eigen::VectorXd x = input(history_);
        const Eigen::Vector2d target((estimate / scale_).real(), (estimate / scale_).imag());
        for (int e = 0; e < cfg_.epochs; ++e) {
            const GruWeights d = gru_gradient(g_, x, h_, target);
            g_.wy -= cfg_.learning_rate * d.wy;
            g_.uy -= cfg_.learning_rate * d.uy;
            g_.wr -= cfg_.learning_rate * d.wr;
            g_.ur -= cfg_.learning_rate * d.ur;
            g_.w -= cfg_.learning_rate * d.w;
            g_.u -= cfg_.learning_rate * d.u;
        }
        h_ = gru_step(g_, x, h_).h;
        updated = trained_ = true;
    }
    history_.push_back(estimate);
    while (history_.size() > cfg_.history) history_.pop_front();
    return updated;
}

std::vector<cplx> GruPredictor::predict(std::size_t steps) const
{
    if (!trained_) throw PreconditionError("gru predict: not trained yet");
    std::deque<cplx> window = history_;
    Eigen::VectorXd h = h_;
    std::vector<cplx> out;
    out.reserve(steps);
    for (std::size_t s = 0; s < steps; ++s) {
        h = gru_step(g_, input(window), h).h;
        const cplx next = cplx(h(0), h(1)) * scale_;
        out.push_back(next);
        window.push_back(next);
        window.pop_front();
    }
    return out;
}

}  // namespace chanpred
