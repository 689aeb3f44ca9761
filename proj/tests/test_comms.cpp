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

#include "chanpred/channel.hpp"
#include "chanpred/comms.hpp"
#include "chanpred/error.hpp"
#include "chanpred/fft.hpp"

using namespace chanpred;

namespace {

// Gaussian tail by composite Simpson integration of the density
double tail_oracle(double x)
{
    const int n = 20000;
    const double b = x + 12.0;
    const double h = (b - x) / n;
    auto pdf = [](double u) { return std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi); };
    double s = pdf(x) + pdf(b);
    for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * pdf(x + i * h);
    return s * h / 3.0;
}

std::vector<cplx> add_noise(std::vector<cplx> s, double power, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(power / 2.0));
    for (auto& v : s) v += cplx(g(rng), g(rng));
    return s;
}

Compensated unity(std::span<const cplx> rx)
{
    const std::vector<cplx> ones(rx.size(), cplx(1.0, 0.0));
    return compensate(rx, ones);
}

}  // namespace

TEST_CASE("qpsk Gray mapping")
{
    const double s = 1.0 / std::sqrt(2.0);
    const std::vector<std::uint8_t> bits{0, 0, 0, 1, 1, 1, 1, 0};
    const auto sym = qpsk_mod(bits);
    REQUIRE(sym.size() == 4);
    CHECK(std::abs(sym[0] - cplx(s, s)) < 1e-15);
    CHECK(std::abs(sym[1] - cplx(s, -s)) < 1e-15);
    CHECK(std::abs(sym[2] - cplx(-s, -s)) < 1e-15);
    CHECK(std::abs(sym[3] - cplx(-s, s)) < 1e-15);
    for (const auto v : sym) CHECK(std::norm(v) == doctest::Approx(1.0));
    CHECK(qpsk_demod(sym) == bits);
    CHECK_THROWS_AS(qpsk_mod(std::vector<std::uint8_t>{1, 0, 1}), PreconditionError);
}

TEST_CASE("qpsk under rotation and noise")
{
    std::mt19937_64 rng(11);
    const auto bits = random_bits(400000, rng);
    const auto sym = qpsk_mod(bits);

    SUBCASE("small rotation keeps every bit")
    {
        std::vector<cplx> r(sym);
        for (auto& v : r) v *= std::polar(1.0, 0.1);
        CHECK(count_bit_errors(bits, unity(r)) == 0);
    }
    SUBCASE("rotation by pi flips every bit")
    {
        std::vector<cplx> r(sym);
        for (auto& v : r) v = -v;
        CHECK(count_bit_errors(bits, unity(r)) == bits.size());
    }
    SUBCASE("AWGN matches theory")
    {
        for (const double db : {4.0, 8.0}) {
            const auto bits2 = random_bits(db < 6.0 ? 400000 : 4000000, rng);
            const auto tx = qpsk_mod(bits2);
            const auto rx = add_noise(tx, noise_power_for_ebn0(db), 77 + static_cast<std::uint64_t>(db));
            const double ber = static_cast<double>(count_bit_errors(bits2, unity(rx))) / static_cast<double>(bits2.size());
            const double theory = tail_oracle(std::sqrt(2.0 * std::pow(10.0, db / 10.0)));
            CHECK(std::abs(ber / theory - 1.0) < 0.2);
        }
    }
}

TEST_CASE("Eb/N0 helpers")
{
    CHECK(noise_power_for_ebn0(0.0) == doctest::Approx(0.5));
    CHECK(noise_power_for_ebn0(10.0) == doctest::Approx(0.05));
    for (const double x : {0.0, 1.0, 2.5, 4.0}) CHECK(q_function(x) == doctest::Approx(tail_oracle(x)).epsilon(1e-9));
    CHECK(qpsk_ber_theory(8.0) == doctest::Approx(tail_oracle(std::sqrt(2.0 * std::pow(10.0, 0.8)))).epsilon(1e-9));
    CHECK(qpsk_ber_theory(4.0) > qpsk_ber_theory(8.0));
}

TEST_CASE("ofdm configuration")
{
    const OfdmConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    CHECK(cfg.occupied() == 1836);
    CHECK(cfg.occupied() * cfg.ofdm_symbols == cfg.qpsk_symbols);
    CHECK(cfg.useful_start(0) == 160);
    CHECK(cfg.useful_start(1) == 160 + 2048 + 144);
    CHECK(cfg.frame_duration_s() == doctest::Approx(5.12e-3));
    // occupied bins are symmetric about DC and skip it on neither side
    CHECK(cfg.bin_of(0) == 2048 - 918);
    CHECK(cfg.bin_of(1835) == 917);

    OfdmConfig bad = cfg;
    bad.cp_lengths.pop_back();
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.guard_left = 1024;
    bad.guard_right = 1024;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.samples_per_subframe += 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("ofdm modulation")
{
    const OfdmConfig cfg;
    std::mt19937_64 rng(3);
    const auto bits = random_bits(2 * cfg.qpsk_symbols, rng);
    const auto sym = qpsk_mod(bits);
    const auto tx = ofdm_mod(sym, cfg);
    REQUIRE(tx.size() == cfg.samples_per_subframe);

    SUBCASE("noiseless round trip")
    {
        const auto back = ofdm_demod(tx, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < sym.size(); ++i) worst = std::max(worst, std::abs(back[i] - sym[i]));
        CHECK(worst < 1e-9);
    }
    SUBCASE("cyclic prefix copies the symbol tail")
    {
        for (std::size_t s = 0; s < cfg.ofdm_symbols; ++s) {
            const std::size_t u = cfg.useful_start(s);
            const std::size_t cp = cfg.cp_lengths[s];
            for (std::size_t n = 0; n < cp; ++n) CHECK(tx[u - cp + n] == tx[u + cfg.subcarriers - cp + n]);
        }
    }
    SUBCASE("guard bins are empty and energy is preserved")
    {
        for (std::size_t s = 0; s < cfg.ofdm_symbols; ++s) {
            const std::size_t u = cfg.useful_start(s);
            // plain DFT as an independent reference
            double guard = 0.0, occupied = 0.0, time_energy = 0.0;
            for (std::size_t n = 0; n < cfg.subcarriers; ++n) time_energy += std::norm(tx[u + n]);
            for (std::size_t k = 0; k < cfg.subcarriers; ++k) {
                cplx acc = 0.0;
                for (std::size_t n = 0; n < cfg.subcarriers; ++n)
                    acc += tx[u + n] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * n % cfg.subcarriers) /
                                                           static_cast<double>(cfg.subcarriers));
                const double e = std::norm(acc) / static_cast<double>(cfg.subcarriers);
                const long f = static_cast<long>(k) >= 1024 ? static_cast<long>(k) - 2048 : static_cast<long>(k);
                (f >= -918 && f < 918 ? occupied : guard) += e;
            }
            CHECK(guard < 1e-18 * occupied + 1e-20);
            CHECK(occupied == doctest::Approx(static_cast<double>(cfg.occupied())));
            CHECK(time_energy == doctest::Approx(static_cast<double>(cfg.occupied())));
            if (s == 0) break;  // one symbol is enough for the O(N^2) reference
        }
    }
    SUBCASE("constant channel scales every cell")
    {
        const cplx g = std::polar(0.7, 1.1);
        ChannelSeries ch;
        ch.sample_rate_hz = cfg.sample_rate_hz;
        ch.samples.assign(tx.size(), g);
        const auto rx = apply_channel(tx, cfg.sample_rate_hz, ch, 0.0, 1);
        const auto back = ofdm_demod(rx, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < sym.size(); ++i) worst = std::max(worst, std::abs(back[i] - g * sym[i]));
        CHECK(worst < 1e-9);
        const std::vector<cplx> comp(sym.size(), g);
        CHECK(count_bit_errors(bits, compensate(back, comp)) == 0);
    }
    SUBCASE("shape errors")
    {
        CHECK_THROWS_AS(ofdm_demod(std::vector<cplx>(100), cfg), ShapeError);
        CHECK_THROWS_AS(ofdm_mod(std::vector<cplx>(cfg.qpsk_symbols + 1), cfg), PreconditionError);
    }
}

TEST_CASE("compensation and erasures")
{
    const std::vector<cplx> rx{{1.0, 1.0}, {-2.0, 2.0}, {0.5, -0.5}};
    const std::vector<cplx> ch{{1.0, 0.0}, {0.0, 2.0}, {0.0, 0.0}};
    const auto c = compensate(rx, ch);
    CHECK(std::abs(c.symbols[0] - cplx(1.0, 1.0)) < 1e-15);
    CHECK(std::abs(c.symbols[1] - cplx(1.0, 1.0)) < 1e-15);
    CHECK(c.erased == std::vector<bool>{false, false, true});
    // erased symbols cost both of their bits
    const std::vector<std::uint8_t> sent{0, 0, 0, 0, 0, 0};
    CHECK(count_bit_errors(sent, c) == 2);
    CHECK_THROWS_AS(compensate(rx, std::vector<cplx>(2)), ShapeError);
    CHECK_THROWS_AS(count_bit_errors(std::vector<std::uint8_t>(4), c), ShapeError);
}

TEST_CASE("random bits")
{
    std::mt19937_64 a(5), b(5);
    const auto x = random_bits(100001, a);
    CHECK(x == random_bits(100001, b));
    std::size_t ones = 0, invalid = 0;
    for (const auto v : x) {
        invalid += v > 1;
        ones += v;
    }
    CHECK(invalid == 0);
    CHECK(std::abs(static_cast<double>(ones) / 100001.0 - 0.5) < 0.01);
}
