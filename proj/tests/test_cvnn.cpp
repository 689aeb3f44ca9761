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

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chanpred/cvnn.hpp"
#include "chanpred/error.hpp"
#include "test_util.hpp"

using namespace chanpred;
using chanpred::testing::random_polar;
using chanpred::testing::random_vector;
using chanpred::testing::random_weights;
using chanpred::testing::reference_layer_loss;

namespace {

constexpr double pi = std::numbers::pi;

std::vector<PolarComplex> conj_all(std::vector<PolarComplex> v)
{
    for (auto& e : v) e.phase = -e.phase;
    return v;
}

LayerWeights conj_weights(const LayerWeights& w)
{
    std::vector<PolarComplex> e(w.entries().begin(), w.entries().end());
    return LayerWeights(w.rows(), w.cols(), conj_all(std::move(e)));
}

}  // namespace

TEST_CASE("polar canonicalization")
{
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> a(-3.0, 3.0);
    std::uniform_real_distribution<double> p(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
        const PolarComplex x{a(rng), p(rng)};
        const PolarComplex c = x.canonical();
        CHECK(c.amplitude >= 0.0);
        CHECK(c.phase > -pi);
        CHECK(c.phase <= pi);
        CHECK(c.canonical() == c);
        const cplx r = x.rect();
        CHECK(std::abs(c.rect() - r) <= 1e-12 * std::max(1.0, std::abs(r)));
        const PolarComplex back = PolarComplex::from_rect(r);
        CHECK(std::abs(back.rect() - r) <= 1e-12 * std::abs(r) + 1e-300);
    }
    CHECK(PolarComplex{0.0, 2.0}.canonical() == PolarComplex{0.0, 0.0});
    CHECK(wrap_phase(-pi) == doctest::Approx(pi));
}

TEST_CASE("activation_ap")
{
    CHECK(activation_ap({0.0, 1.3}) == PolarComplex{0.0, 0.0});
    const auto one = activation_ap({1.0, 0.0});
    CHECK(one.amplitude == doctest::Approx(0.7615941559557649).epsilon(1e-15));
    CHECK(one.phase == 0.0);
    const auto three = activation_ap({3.0, pi / 4});
    CHECK(three.amplitude == doctest::Approx(0.9950547536867305).epsilon(1e-15));
    CHECK(three.phase == pi / 4);
    CHECK(activation_ap({50.0, 0.2}).amplitude <= 1.0);
}

TEST_CASE("forward")
{
    const NetworkShape shape{1, 1};
    const LayerWeights w1(1, 1, {{1.0, 0.0}});
    const LayerWeights w2(1, 1, {{1.0, 0.0}});
    const std::vector<PolarComplex> in{{1.0, 0.0}};

    SUBCASE("single path composition")
    {
        const auto tr = forward(shape, w1, w2, in);
        CHECK(tr.hidden.outputs[0].amplitude == doctest::Approx(0.7615941559557649).epsilon(1e-14));
        CHECK(tr.prediction().amplitude == doctest::Approx(0.6420149920119997).epsilon(1e-14));
        CHECK(tr.prediction().phase == doctest::Approx(0.0));
    }
    SUBCASE("zero inputs propagate to zero")
    {
        std::mt19937_64 rng(3);
        const NetworkShape s{4, 3};
        const auto tr = forward(s, random_weights(rng, 3, 4), random_weights(rng, 1, 3),
                                std::vector<PolarComplex>(4));
        for (const auto& z : tr.hidden.outputs) CHECK(z.amplitude == 0.0);
        CHECK(tr.prediction().amplitude == 0.0);
    }
    SUBCASE("input rotation rotates internal states")
    {
        std::mt19937_64 rng(4);
        const NetworkShape s{5, 4};
        LayerWeights unit1(4, 5, std::vector<PolarComplex>(20, PolarComplex{1.0, 0.0}));
        LayerWeights unit2(1, 4, std::vector<PolarComplex>(4, PolarComplex{1.0, 0.0}));
        auto x = random_vector(rng, 5);
        const double delta = 0.7;
        auto xr = x;
        for (auto& e : xr) e.phase += delta;
        const auto a = forward(s, unit1, unit2, x);
        const auto b = forward(s, unit1, unit2, xr);
        for (std::size_t k = 0; k < 4; ++k) {
            CHECK(b.hidden.states[k].amplitude == doctest::Approx(a.hidden.states[k].amplitude));
            CHECK(wrap_phase(b.hidden.states[k].phase - a.hidden.states[k].phase) == doctest::Approx(delta));
        }
        CHECK(wrap_phase(b.prediction().phase - a.prediction().phase) == doctest::Approx(delta));
    }
    SUBCASE("shape errors")
    {
        CHECK_THROWS_AS(forward({2, 1}, w1, w2, in), ShapeError);
        CHECK_THROWS_AS(forward(shape, w1, w2, std::vector<PolarComplex>(2)), ShapeError);
    }
    SUBCASE("outputs saturate below one")
    {
        std::mt19937_64 rng(5);
        for (int i = 0; i < 50; ++i) {
            const auto tr = forward({5, 5}, random_weights(rng, 5, 5), random_weights(rng, 1, 5), random_vector(rng, 5, 0.0, 10.0));
            for (const auto& z : tr.hidden.outputs) CHECK(z.amplitude < 1.0);
            CHECK(tr.prediction().amplitude < 1.0);
        }
    }
}

TEST_CASE("loss")
{
    const std::vector<PolarComplex> z{{0.3, 0.4}, {0.9, -2.0}};
    CHECK(loss(z, z) == 0.0);
    CHECK(loss(std::vector<PolarComplex>{{1.0, 0.0}}, std::vector<PolarComplex>{{1.0, pi}}) == doctest::Approx(2.0));
    CHECK(loss(std::vector<PolarComplex>{{0.0, 0.0}}, std::vector<PolarComplex>{{0.6, 1.1}}) == doctest::Approx(0.18));
    CHECK_THROWS_AS(loss(z, std::vector<PolarComplex>{{1.0, 0.0}}), ShapeError);
}

TEST_CASE("bpts_teacher")
{
    const LayerWeights w2(1, 1, {{1.0, 0.0}});
    const auto h = bpts_teacher(w2, {0.8, 0.0});
    CHECK(h[0].amplitude == doctest::Approx(std::tanh(0.8)));
    CHECK(h[0].phase == doctest::Approx(0.0));

    std::mt19937_64 rng(7);
    const auto w = random_weights(rng, 1, 6);
    for (const auto& e : bpts_teacher(w, {0.0, 0.0})) CHECK(e.amplitude == 0.0);

    const PolarComplex t{0.7, 1.2};
    const auto a = bpts_teacher(w, t);
    const auto b = bpts_teacher(conj_weights(w), t.conj());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].amplitude < 1.0);
        CHECK(b[k].amplitude == doctest::Approx(a[k].amplitude));
        CHECK(wrap_phase(b[k].phase + a[k].phase) == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("grad_components")
{
    std::mt19937_64 rng(11);

    SUBCASE("zero at a perfectly trained point")
    {
        const auto w = random_weights(rng, 3, 4);
        const auto tr = layer_forward(w, random_vector(rng, 4));
        for (const auto& g : grad_components(w, tr, tr.outputs)) {
            CHECK(g.amplitude_gradient() == 0.0);
            CHECK(g.phase_gradient() == 0.0);
        }
    }
    SUBCASE("zero input terminal gives zero fractions")
    {
        const auto w = random_weights(rng, 3, 4);
        auto x = random_vector(rng, 4);
        x[2] = {0.0, 0.0};
        const auto tr = layer_forward(w, x);
        const auto g = grad_components(w, tr, random_vector(rng, 3));
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(g[k * 4 + 2].d_amp_fraction == 0.0);
            CHECK(g[k * 4 + 2].d_phase_fraction == 0.0);
        }
    }
    SUBCASE("matches central finite differences")
    {
        constexpr double h = 1e-6;
        double worst = 0.0;
        for (int net = 0; net < 100; ++net) {
            std::uniform_int_distribution<std::size_t> dim(1, 5);
            const std::size_t rows = dim(rng), cols = dim(rng);
            const auto w = random_weights(rng, rows, cols);
            const auto x = random_vector(rng, cols);
            const auto teacher = random_vector(rng, rows, 0.0, 0.95);
            const auto g = grad_components(w, layer_forward(w, x), teacher);

            std::vector<PolarComplex> e(w.entries().begin(), w.entries().end());
            for (std::size_t i = 0; i < e.size(); ++i) {
                auto plus = e, minus = e;
                plus[i].amplitude += h;
                minus[i].amplitude -= h;
                const double num_amp = (reference_layer_loss(plus, rows, cols, x, teacher) -
                                        reference_layer_loss(minus, rows, cols, x, teacher)) / (2 * h);
                plus = e;
                minus = e;
                plus[i].phase += h;
                minus[i].phase -= h;
                const double num_pha = (reference_layer_loss(plus, rows, cols, x, teacher) -
                                        reference_layer_loss(minus, rows, cols, x, teacher)) / (2 * h) / e[i].amplitude;

                const double ra = std::abs(g[i].amplitude_gradient() - num_amp) / std::max({std::abs(num_amp), 1e-3});
                const double rp = std::abs(g[i].phase_gradient() - num_pha) / std::max({std::abs(num_pha), 1e-3});
                worst = std::max({worst, ra, rp});
            }
        }
        CHECK(worst < 1e-6);
    }
    SUBCASE("conjugation negates phase gradients")
    {
        const auto w = random_weights(rng, 3, 3);
        const auto x = random_vector(rng, 3);
        const auto t = random_vector(rng, 3, 0.0, 0.9);
        const auto wc = conj_weights(w);
        const auto tr = layer_forward(w, x);
        const auto trc = layer_forward(wc, conj_all(x));
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(trc.outputs[k].amplitude == doctest::Approx(tr.outputs[k].amplitude));
            CHECK(wrap_phase(trc.outputs[k].phase + tr.outputs[k].phase) == doctest::Approx(0.0).epsilon(1e-12));
        }
        const auto g = grad_components(w, tr, t);
        const auto gc = grad_components(wc, trc, conj_all(t));
        for (std::size_t i = 0; i < g.size(); ++i) {
            CHECK(gc[i].amplitude_gradient() == doctest::Approx(g[i].amplitude_gradient()).epsilon(1e-9));
            CHECK(gc[i].phase_gradient() == doctest::Approx(-g[i].phase_gradient()).epsilon(1e-9));
        }
    }
}

TEST_CASE("update_weights penalty algebra")
{
    std::mt19937_64 rng(13);
    const auto w = random_weights(rng, 4, 5);
    const auto tr = layer_forward(w, random_vector(rng, 5));
    const auto teacher = random_vector(rng, 4, 0.0, 0.9);

    LearnConfig none;
    LearnConfig l1 = none;
    l1.penalty = PenaltyMode::L1;
    LearnConfig l21 = none;
    l21.penalty = PenaltyMode::GroupL21;

    SUBCASE("alpha zero is bit-identical across modes")
    {
        const auto a = update_weights(w, tr, teacher, none);
        CHECK(update_weights(w, tr, teacher, l1) == a);
        CHECK(update_weights(w, tr, teacher, l21) == a);
    }
    SUBCASE("phase update is independent of the penalty")
    {
        for (double alpha : {1e-5, 5e-4, 2e-2, 0.7}) {
            l1.alpha = l21.alpha = alpha;
            const auto a = update_weights(w, tr, teacher, none);
            const auto b = update_weights(w, tr, teacher, l1);
            const auto c = update_weights(w, tr, teacher, l21);
            for (std::size_t i = 0; i < a.size(); ++i) {
                CHECK(b.entries()[i].phase == a.entries()[i].phase);
                CHECK(c.entries()[i].phase == a.entries()[i].phase);
            }
        }
    }
    SUBCASE("single-element group equals the L1 term")
    {
        const auto w1 = random_weights(rng, 1, 6);
        const auto tr1 = layer_forward(w1, random_vector(rng, 6));
        const std::vector<PolarComplex> t1{{0.4, 0.3}};
        l1.alpha = l21.alpha = 3e-3;
        CHECK(update_weights(w1, tr1, t1, l21) == update_weights(w1, tr1, t1, l1));
        std::vector<double> norms(6);
        for (std::size_t j = 0; j < 6; ++j) norms[j] = w1.column_norm(j);
        for (std::size_t j = 0; j < 6; ++j) CHECK(penalty_gradient(w1, 0, j, l21, norms) == l1.alpha);
    }
    SUBCASE("zero error: L1 shrinks each amplitude by kappa1*alpha")
    {
        l1.alpha = 0.05;
        l1.kappa1 = 0.3;
        const auto next = update_weights(w, tr, tr.outputs, l1);
        for (std::size_t i = 0; i < w.size(); ++i) {
            CHECK(next.entries()[i].amplitude == std::max(0.0, w.entries()[i].amplitude - l1.kappa1 * l1.alpha));
            CHECK(next.entries()[i].phase == w.entries()[i].phase);
        }
    }
    SUBCASE("zero-norm group carries no penalty")
    {
        LayerWeights z(3, 2, {{0.0, 0.0}, {0.5, 0.1}, {0.0, 0.0}, {0.5, 0.2}, {0.0, 0.0}, {0.5, 0.3}});
        l21.alpha = 0.1;
        std::vector<double> norms{z.column_norm(0), z.column_norm(1)};
        CHECK(penalty_gradient(z, 1, 0, l21, norms) == 0.0);
        CHECK(penalty_gradient(z, 1, 1, l21, norms) > 0.0);
        const auto trz = layer_forward(z, random_vector(rng, 2));
        CHECK(update_weights(z, trz, trz.outputs, l21).all_finite());
    }
}

TEST_CASE("penalty monotonicity with zero error gradient")
{
    std::mt19937_64 rng(17);
    for (auto mode : {PenaltyMode::L1, PenaltyMode::GroupL21}) {
        LearnConfig cfg;
        cfg.penalty = mode;
        cfg.alpha = 0.02;
        cfg.kappa1 = 0.5;
        auto w = random_weights(rng, 5, 4);
        auto group_sum = [](const LayerWeights& m) {
            double s = 0.0;
            for (std::size_t j = 0; j < m.cols(); ++j) s += m.column_norm(j);
            return s;
        };
        double prev = mode == PenaltyMode::L1 ? w.l1_norm() : group_sum(w);
        const auto x = random_vector(rng, 4);
        for (int step = 0; step < 200; ++step) {
            const auto tr = layer_forward(w, x);
            w = update_weights(w, tr, tr.outputs, cfg);
            const double now = mode == PenaltyMode::L1 ? w.l1_norm() : group_sum(w);
            CHECK(now <= prev);
            prev = now;
        }
        CHECK(w.all_finite());
    }
}

TEST_CASE("small steps do not increase the loss")
{
    std::mt19937_64 rng(19);
    LearnConfig cfg;
    cfg.kappa1 = cfg.kappa2 = 1e-4;
    int increases = 0;
    constexpr int trials = 500;
    for (int i = 0; i < trials; ++i) {
        const auto w = random_weights(rng, 4, 5);
        const auto x = random_vector(rng, 5);
        const auto t = random_vector(rng, 4, 0.0, 0.9);
        const auto tr = layer_forward(w, x);
        const auto next = update_weights(w, tr, t, cfg);
        if (loss(layer_forward(next, x).outputs, t) > loss(tr.outputs, t)) ++increases;
    }
    CHECK(increases == 0);
}

TEST_CASE("config validation")
{
    LearnConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.iterations = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.kappa1 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = {};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS((NetworkShape{0, 3}.validate()), ConfigError);
    CHECK(penalty_mode_from_string("l21") == PenaltyMode::GroupL21);
    CHECK_THROWS_AS(penalty_mode_from_string("l2"), ConfigError);
}

TEST_CASE("random initialization is seeded and within range")
{
    std::mt19937_64 a(42), b(42);
    const WeightInit init;
    const auto wa = random_layer(30, 30, init, a);
    CHECK(wa == random_layer(30, 30, init, b));
    for (const auto& e : wa.entries()) {
        CHECK(e.amplitude >= 0.5 / 30.0);
        CHECK(e.amplitude <= 1.0 / 30.0);
        CHECK(e.phase > -pi);
        CHECK(e.phase <= pi);
    }

    WeightInit raw;
    raw.amplitude_min = 0.1;
    raw.fan_in_scaled = false;
    std::mt19937_64 c(3);
    for (const auto& e : random_layer(4, 30, raw, c).entries()) {
        CHECK(e.amplitude >= 0.1);
        CHECK(e.amplitude <= 1.0);
    }
}
